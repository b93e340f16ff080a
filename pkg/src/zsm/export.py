"""JSON and DOT renderings of every artifact.

JSON documents share one envelope: ``{"schema": ..., "manifest": ..., "data": ...}``; the
matching JSON Schema files live in ``zsm/schemas``.  Output is deterministic: every list is
built in a canonical order and keys are emitted in insertion order.
"""

from __future__ import annotations

import json
from importlib import resources

from .ess import ESS
from .psystem import MembraneSystem, system_to_json
from .semantics import ReachabilityGraph, format_configuration, format_vmr
from .unfold import OccurrenceNet
from .zsnet import ZSNet

SCHEMA_VERSION = 1
KINDS = ("system", "reachability", "net", "unfolding", "ess", "check")


def manifest(input_path: str, command: str, bounds: dict, fmt: str = "json") -> dict:
    return {
        "input": input_path,
        "command": command,
        "bounds": bounds,
        "format": fmt,
        "deterministic": True,
    }


def document(kind: str, man: dict, data: dict) -> dict:
    if kind not in KINDS:
        raise ValueError(f"unknown document kind {kind}")
    return {"schema": f"zsm.{kind}.v{SCHEMA_VERSION}", "manifest": man, "data": data}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_schema(kind: str) -> dict:
    text = resources.files("zsm").joinpath("schemas", f"{kind}.schema.json").read_text()
    return json.loads(text)


# -- JSON bodies ------------------------------------------------------------


def system_data(sys: MembraneSystem) -> dict:
    return system_to_json(sys)


def _vmr_json(R, order=None) -> list[dict]:
    return [Ri.to_json(order) for Ri in R]


def reachability_data(g: ReachabilityGraph, traces: list | None = None) -> dict:
    order = g.system.alphabet
    rule_order = [r.name for r in g.system.all_rules()]
    nodes = [
        {
            "id": k,
            "layer": g.layer[k],
            "configuration": [w.to_json(order) for w in C],
            "text": format_configuration(C, order),
            "halting": k in g.halting,
        }
        for k, C in enumerate(g.nodes)
    ]
    edges = []
    for s, R, d in g.edges:
        edge = {"source": s, "target": d, "rules": _vmr_json(R, rule_order), "text": format_vmr(R)}
        lost = g.expelled.get((s, d))
        if lost is not None:
            edge["expelled"] = lost.to_json(order)
        edges.append(edge)
    out = {"depth": g.depth, "nodes": nodes, "edges": edges}
    if traces is not None:
        out["traces"] = traces
    return out


def net_data(net: ZSNet) -> dict:
    def arcs(ms):
        return {str(p): ms[p] for p in ms.ordered(net.places)}

    return {
        "places": [
            {"id": str(p), "zero": p in net.zero, "initial": net.m0[p]} for p in net.places
        ],
        "transitions": [
            {"id": str(t), "pre": arcs(net.pre_of(t)), "post": arcs(net.post_of(t))}
            for t in net.transitions
        ],
    }


def unfolding_data(on: OccurrenceNet) -> dict:
    initial = set(on.initial)
    return {
        "bounds": {"layers": on.layers, "events": on.event_budget},
        "truncated": on.truncated,
        "conditions": [
            {
                "id": b.id,
                "key": b.key,
                "place": str(b.place),
                "origin": b.origin,
                "copy": b.copy,
                "layer": b.layer,
                "zero": b.zero,
                "initial": b.id in initial,
            }
            for b in on.conditions
        ],
        "events": [
            {
                "id": e.id,
                "key": e.key,
                "transition": str(e.transition),
                "layer": e.layer,
                "preset": list(e.preset),
                "postset": list(e.postset),
            }
            for e in on.events
        ],
    }


def _class_labels(ess: ESS, s) -> dict:
    counts: dict = {}
    for e in s:
        key = str(ess.labels[e])
        counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items()))


def ess_data(ess: ESS) -> dict:
    pes = ess.pes
    return {
        "truncated": ess.truncated,
        "events": [
            {"id": e, "label": str(ess.labels[e]), "layer": ess.layer.get(e)} for e in pes.events
        ],
        "order": sorted([e, f] for e, f in pes.covering_pairs()),
        "conflicts": sorted(sorted([e, f]) for e, f in pes.immediate_conflicts()),
        "conflict_heredity": True,
        "sim": [
            {
                "events": sorted(s),
                "labels": _class_labels(ess, s),
                "enabled_at": [sorted(S) for S in ess.provenance.get(s, ())],
            }
            for s in ess.sim
        ],
    }


# -- DOT ----------------------------------------------------------------------


def _q(text) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def reachability_dot(g: ReachabilityGraph) -> str:
    order = g.system.alphabet
    lines = ["digraph reachability {", "  rankdir=LR;", "  node [shape=ellipse];"]
    for k, C in enumerate(g.nodes):
        shape = ", peripheries=2" if k in g.halting else ""
        lines.append(f"  n{k} [label={_q(format_configuration(C, order))}{shape}];")
    for s, R, d in g.edges:
        lines.append(f"  n{s} -> n{d} [label={_q(format_vmr(R))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def net_dot(net: ZSNet) -> str:
    ids = {p: f"p{k}" for k, p in enumerate(net.places)}
    tids = {t: f"t{k}" for k, t in enumerate(net.transitions)}
    lines = ["digraph net {", "  rankdir=LR;"]
    for p in net.places:
        tokens = net.m0[p]
        label = f"{p}" + (f"\\n{tokens}" if tokens else "")
        style = "shape=circle, width=0.3, style=filled, fillcolor=lightgray" if p in net.zero else "shape=circle"
        lines.append(f"  {ids[p]} [label=\"{label}\", {style}];")
    for t in net.transitions:
        lines.append(f"  {tids[t]} [label={_q(t)}, shape=box];")
    for t in net.transitions:
        for p in net.pre_of(t).ordered(net.places):
            w = net.pre_of(t)[p]
            lines.append(f"  {ids[p]} -> {tids[t]}" + (f" [label={w}]" if w > 1 else "") + ";")
        for p in net.post_of(t).ordered(net.places):
            w = net.post_of(t)[p]
            lines.append(f"  {tids[t]} -> {ids[p]}" + (f" [label={w}]" if w > 1 else "") + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


def unfolding_dot(on: OccurrenceNet) -> str:
    initial = set(on.initial)
    lines = ["digraph unfolding {", "  rankdir=LR;"]
    for b in on.conditions:
        attrs = ["shape=circle", f"label={_q(b.place)}"]
        if b.zero:
            attrs += ["width=0.2", "fontsize=8", "style=filled", "fillcolor=lightgray"]
        if b.id in initial:
            attrs.append("peripheries=2")
        lines.append(f"  b{b.id} [{', '.join(attrs)}];")
    for e in on.events:
        lines.append(f"  e{e.id} [shape=box, label={_q(e.transition)}];")
    for e in on.events:
        for b in e.preset:
            lines.append(f"  b{b} -> e{e.id};")
        for b in e.postset:
            lines.append(f"  e{e.id} -> b{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ess_dot(ess: ESS) -> str:
    pes = ess.pes
    lines = ["digraph ess {", "  rankdir=LR;", "  compound=true;"]
    for e in pes.events:
        lines.append(f"  e{e} [shape=box, label={_q(f'{e}: {ess.labels[e]}')}];")
    for e, f in sorted(pes.covering_pairs()):
        lines.append(f"  e{e} -> e{f};")
    for e, f in sorted(pes.immediate_conflicts()):
        lines.append(f"  e{e} -> e{f} [style=dashed, dir=none, constraint=false];")
    # a node may belong to one cluster only; later classes are drawn as dotted hulls of edges
    drawn: set = set()
    for k, s in enumerate(ess.sim):
        members = sorted(s)
        if drawn.isdisjoint(members):
            drawn.update(members)
            lines.append(f"  subgraph cluster_sim{k} {{")
            lines.append(f"    style=dotted; label={_q(f'Sim {k}')};")
            lines.append("    " + " ".join(f"e{e};" for e in members))
            lines.append("  }")
        else:
            for e, f in zip(members, members[1:]):
                lines.append(
                    f"  e{e} -> e{f} [style=dotted, dir=none, constraint=false, label={_q(f'Sim {k}')}];"
                )
    lines.append("}")
    return "\n".join(lines) + "\n"
