"""Command-line front end: ``zsm validate|run|compile|unfold|ess|check``.

Exit codes: 0 success, 1 usage error, 2 invalid input system, 3 check failure,
4 exploration budget exhausted.  Diagnostics go to stderr; ``-`` as an output file
means stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import export
from .compile import check_correspondence, compile_system
from .errors import BudgetExceeded, ShapeViolation
from .ess import ess_of
from .parser import parse
from .psystem import PSystemError, rule_count
from .semantics import (
    computations,
    format_vmr,
    reachability_graph,
    state_cap_default,
)
from .unfold import unfold

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_CHECK, EXIT_BUDGET = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="membrane system source (.psys)")
    common.add_argument(
        "--allow-skin-out", action="store_true", help="accept rules sending objects out of the skin"
    )

    def outputs(p, dot=True):
        if dot:
            p.add_argument("--dot", metavar="F", help="write Graphviz DOT to F ('-' = stdout)")
        p.add_argument("--json", metavar="F", help="write JSON to F ('-' = stdout)")

    ap = _Parser(prog="zsm", description="Membrane systems, zero-safe nets and event structures.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="parse and validate a system")
    outputs(p, dot=False)

    p = sub.add_parser("run", parents=[common], help="reachability graph of macro steps")
    p.add_argument("--depth", type=_nonneg, required=True)
    p.add_argument("--all-traces", action="store_true", help="also list every computation")
    p.add_argument("--state-cap", type=_nonneg, help="configuration budget (default: $ZSM_STATE_CAP or 100000)")
    outputs(p)

    p = sub.add_parser("compile", parents=[common], help="compile to a zero-safe net")
    outputs(p)

    p = sub.add_parser("unfold", parents=[common], help="layer-bounded unfolding of the net")
    p.add_argument("--layers", type=_nonneg, required=True)
    p.add_argument("--events", type=_nonneg, help="event budget")
    outputs(p)

    p = sub.add_parser("ess", parents=[common], help="event structure with simultaneity")
    p.add_argument("--layers", type=_nonneg, required=True)
    p.add_argument("--events", type=_nonneg, help="event budget")
    outputs(p)

    p = sub.add_parser("check", parents=[common], help="membrane/net correspondence report")
    p.add_argument("--depth", type=_nonneg, required=True)
    p.add_argument("--state-cap", type=_nonneg)
    outputs(p, dot=False)
    return ap


def _write(target: str, text: str) -> None:
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def _emit(args, kind: str, bounds: dict, data: dict, dot: str | None, text: str) -> None:
    if args.json:
        man = export.manifest(args.file, args.command, bounds)
        _write(args.json, export.dumps(export.document(kind, man, data)))
    if getattr(args, "dot", None) and dot is not None:
        _write(args.dot, dot)
    if not args.json and not getattr(args, "dot", None):
        sys.stdout.write(text)


def _cmd_validate(args, psys) -> int:
    text = f"ok: {psys.n} membranes, {len(psys.alphabet)} objects, {rule_count(psys)} rules\n"
    _emit(args, "system", {}, export.system_data(psys), None, text)
    return EXIT_OK


def _cmd_run(args, psys) -> int:
    cap = args.state_cap if args.state_cap is not None else state_cap_default()
    g = reachability_graph(psys, args.depth, cap)
    order = psys.alphabet

    def word(C):
        return "(" + ", ".join(w.word(order) for w in C) + ")"

    lines = []
    for layer in range(max(g.layer, default=0) + 1):
        here = [word(C) + (" halting" if k in g.halting else "")
                for k, C in enumerate(g.nodes) if g.layer[k] == layer]
        if here:
            lines.append(f"layer {layer}: " + "  ".join(here))
    traces = None
    if args.all_traces:
        traces = []
        for comp in computations(psys, args.depth):
            ids = [0] + [g.index[C] for _, C in comp]
            traces.append(ids)
            parts = [word(g.nodes[0])]
            for R, C in comp:
                parts.append(f"={format_vmr(R)}=> {word(C)}")
            lines.append("trace: " + " ".join(parts))
    bounds = {"depth": args.depth, "state_cap": cap}
    _emit(args, "reachability", bounds, export.reachability_data(g, traces), export.reachability_dot(g),
          "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_compile(args, psys) -> int:
    net = compile_system(psys)
    lines = [f"{len(net.places)} places, {len(net.transitions)} transitions"]
    for t in net.transitions:
        pre = net.pre_of(t).format(net.places)
        post = net.post_of(t).format(net.places)
        lines.append(f"  {t}: {pre} -> {post}")
    lines.append("m0 = " + net.m0.format(net.places))
    _emit(args, "net", {}, export.net_data(net), export.net_dot(net), "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_unfold(args, psys) -> int:
    net = compile_system(psys)
    on, _ = unfold(net, args.layers, args.events)
    text = (
        f"{len(on.conditions)} conditions, {len(on.events)} events"
        f"{' (truncated)' if on.truncated else ''}\n"
    )
    bounds = {"layers": args.layers, "events": args.events}
    _emit(args, "unfolding", bounds, export.unfolding_data(on), export.unfolding_dot(on), text)
    if on.truncated:
        print(f"zsm: event budget {args.events} exhausted; output is partial", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_ess(args, psys) -> int:
    net = compile_system(psys)
    on, fm = unfold(net, args.layers, args.events)
    e = ess_of(on, fm)
    lines = [f"{len(e.events)} events, {len(e.sim)} simultaneity classes"]
    for k, s in enumerate(e.sim):
        labels = ", ".join(f"{t}:{c}" for t, c in export._class_labels(e, s).items())
        lines.append(f"  Sim {k}: {sorted(s)}  {{{labels}}}")
    bounds = {"layers": args.layers, "events": args.events}
    _emit(args, "ess", bounds, export.ess_data(e), export.ess_dot(e), "\n".join(lines) + "\n")
    if e.truncated:
        print("zsm: unfolding was truncated; classes may be missing", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_check(args, psys) -> int:
    cap = args.state_cap if args.state_cap is not None else state_cap_default()
    rep = check_correspondence(psys, args.depth, state_cap=cap)
    bounds = {"depth": args.depth, "state_cap": cap}
    if args.json:
        _emit(args, "check", bounds, rep.to_json(), None, "")
    if args.json != "-":
        sys.stdout.write(rep.to_text())
    return EXIT_OK if rep.passed else EXIT_CHECK


COMMANDS = {
    "validate": _cmd_validate,
    "run": _cmd_run,
    "compile": _cmd_compile,
    "unfold": _cmd_unfold,
    "ess": _cmd_ess,
    "check": _cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        source = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"zsm: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        psys = parse(source, allow_skin_out=args.allow_skin_out)
    except PSystemError as exc:
        for d in exc.diagnostics:
            where = f"{args.file}:{d.line}:{d.col}" if d.line is not None else args.file
            print(f"{where}: error: {d.message}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](args, psys)
    except BudgetExceeded as exc:
        print(f"zsm: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ShapeViolation as exc:
        print(f"zsm: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
