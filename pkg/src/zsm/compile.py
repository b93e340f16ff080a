"""Translation of membrane systems into zero-safe nets, and the correspondence checker.

Every object ``a`` and membrane ``i`` get a stable place ``(a,i,nz)`` and a zero place
``(a,i,z)``.  A rule ``r`` of membrane ``i`` becomes ``t_i^r``, consuming its lhs from
stable places of ``i`` and producing every product into the zero place of the target
membrane.  The heating transition ``t^h_(a,i)`` moves one token from ``(a,i,z)`` to
``(a,i,nz)``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

from .errors import InvalidSequence, NotEnabled, ShapeViolation
from .multiset import EMPTY, Multiset
from .psystem import HERE, OUT, MembraneSystem
from .semantics import (
    Configuration,
    PartialConfiguration,
    VectorMultiRule,
    applicable,
    format_configuration,
    format_partial,
    format_vmr,
    heated,
    macro_steps,
    micro_step,
    partial_of,
    reachability_graph,
)
from .zsnet import (
    ZSNet,
    check_stable_transaction,
    enumerate_stable_transactions,
    fire,
    format_marking,
    format_step,
)


@dataclass(frozen=True, order=True)
class PlaceId:
    obj: str
    membrane: int
    kind: str  # "nz" | "z"

    def __str__(self) -> str:
        return f"({self.obj},{self.membrane},{self.kind})"

    @property
    def zero(self) -> bool:
        return self.kind == "z"


@dataclass(frozen=True, order=True)
class RuleT:
    rule: str
    membrane: int

    def __str__(self) -> str:
        return f"t_{self.membrane}^{self.rule}"


@dataclass(frozen=True, order=True)
class HeatT:
    obj: str
    membrane: int

    def __str__(self) -> str:
        return f"t^h_({self.obj},{self.membrane})"


def compile_system(sys: MembraneSystem) -> ZSNet:
    places = tuple(
        PlaceId(a, i, k) for a in sys.alphabet for i in sys.membranes for k in ("nz", "z")
    )
    transitions = []
    pre: dict = {}
    post: dict = {}
    for i in sys.membranes:
        for r in sys.rules_of(i):
            t = RuleT(r.name, i)
            transitions.append(t)
            pre[t] = Multiset({PlaceId(a, i, "nz"): c for a, c in r.lhs.items()})
            out: dict = {}
            for (a, tgt), c in r.rhs.items():
                if tgt == HERE:
                    j = i
                elif tgt == OUT:
                    j = sys.father(i)
                    if j is None:  # skin-out: the objects leave the system
                        continue
                else:
                    j = tgt.membrane
                p = PlaceId(a, j, "z")
                out[p] = out.get(p, 0) + c
            post[t] = Multiset(out)
    for a in sys.alphabet:
        for i in sys.membranes:
            t = HeatT(a, i)
            transitions.append(t)
            pre[t] = Multiset({PlaceId(a, i, "z"): 1})
            post[t] = Multiset({PlaceId(a, i, "nz"): 1})
    m0 = Multiset({PlaceId(a, i, "nz"): c for i in sys.membranes for a, c in sys.init[i - 1].items()})
    zero = frozenset(p for p in places if p.zero)
    return ZSNet(places, tuple(transitions), pre, post, m0, zero)


def nu(sys: MembraneSystem, gamma: PartialConfiguration) -> Multiset:
    """Marking of a partial configuration: consumable part on ``nz``, produced part on ``z``."""
    out = {}
    for i, (w, wb) in enumerate(gamma, start=1):
        for a, c in w.items():
            out[PlaceId(a, i, "nz")] = c
        for a, c in wb.items():
            out[PlaceId(a, i, "z")] = c
    return Multiset(out)


def nu_config(sys: MembraneSystem, C: Configuration) -> Multiset:
    return nu(sys, partial_of(C))


def configuration_of(sys: MembraneSystem, m: Mapping) -> Configuration:
    """Inverse of :func:`nu_config` on stable markings."""
    per = [dict() for _ in sys.membranes]
    for p, c in m.items():
        if p.zero:
            raise ValueError(f"marking is not stable: {p} holds {c}")
        per[p.membrane - 1][p.obj] = c
    return tuple(Multiset(d) for d in per)


def rule_step(sys: MembraneSystem, R: VectorMultiRule) -> Multiset:
    return Multiset({RuleT(name, i): k for i in sys.membranes for name, k in R[i - 1].items()})


def vmr_of_step(sys: MembraneSystem, U: Mapping) -> VectorMultiRule:
    per = [dict() for _ in sys.membranes]
    for t, k in U.items():
        if isinstance(t, RuleT):
            per[t.membrane - 1][t.rule] = k
    return tuple(Multiset(d) for d in per)


def heat_step(sys: MembraneSystem, gamma: PartialConfiguration) -> Multiset:
    return Multiset({HeatT(a, i): c for i, (_, wb) in enumerate(gamma, start=1) for a, c in wb.items()})


def produced_partial(sys: MembraneSystem, C: Configuration, R: VectorMultiRule) -> PartialConfiguration:
    """Partial configuration reached from ``C`` after firing every instance of ``R`` as micro steps."""
    gamma = partial_of(C)
    for i in sys.membranes:
        for name in R[i - 1].ordered():
            for _ in range(R[i - 1][name]):
                gamma = micro_step(sys, gamma, name, i)
    return gamma


def zero_partition(net: ZSNet) -> tuple[frozenset, frozenset]:
    """(transitions producing into Z, transitions consuming from Z)."""
    into = frozenset(t for t in net.transitions if any(p in net.zero for p in net.post_of(t)))
    outof = frozenset(t for t in net.transitions if any(p in net.zero for p in net.pre_of(t)))
    return into, outof


# ---------------------------------------------------------------------------
# correspondence report


PROPOSITIONS = (
    ("effects", "rule effects match transition firings"),
    ("heating", "heating step maps a partial configuration to its heated form"),
    ("forward", "every macro step is a stable transaction"),
    ("converse", "every stable transaction is a macro step"),
    ("partition", "zero places split transitions into producers and heaters"),
)


@dataclass
class PropositionResult:
    key: str
    title: str
    checked: int = 0
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return self.witness is None

    def fail(self, msg: str) -> None:
        if self.witness is None:
            self.witness = msg

    def to_json(self) -> dict:
        return {
            "proposition": self.key,
            "title": self.title,
            "passed": self.passed,
            "checked": self.checked,
            "witness": self.witness,
        }


@dataclass
class Report:
    depth: int
    configurations: int = 0
    transactions: int = 0
    results: list[PropositionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def result(self, key: str) -> PropositionResult:
        return next(r for r in self.results if r.key == key)

    def summary(self) -> str:
        ok = sum(r.passed for r in self.results)
        return f"{ok}/{len(self.results)} propositions verified"

    def to_text(self) -> str:
        lines = [
            f"depth {self.depth}: {self.configurations} configurations, "
            f"{self.transactions} transactions"
        ]
        for r in self.results:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"  [{mark}] {r.key}: {r.title} ({r.checked} checked)")
            if r.witness:
                lines.append(f"         witness: {r.witness}")
        lines.append(self.summary())
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "configurations": self.configurations,
            "transactions": self.transactions,
            "passed": self.passed,
            "summary": self.summary(),
            "propositions": [r.to_json() for r in self.results],
        }


def _partials_from(sys: MembraneSystem, C: Configuration) -> set:
    seen = set()
    stack = [partial_of(C)]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        for name, i in applicable(sys, g):
            stack.append(micro_step(sys, g, name, i))
    return seen


def check_correspondence(
    sys: MembraneSystem,
    depth: int,
    net: ZSNet | None = None,
    state_cap: int | None = None,
) -> Report:
    """Check the five membrane/net correspondences over the reachability graph up to ``depth``.

    ``net`` defaults to ``compile_system(sys)``; pass a modified net to test fault detection.
    """
    net = compile_system(sys) if net is None else net
    order = sys.alphabet
    graph = reachability_graph(sys, depth, state_cap)
    rep = Report(depth, configurations=len(graph.nodes))
    res = {k: PropositionResult(k, title) for k, title in PROPOSITIONS}
    rep.results = list(res.values())
    tset = set(net.transitions)

    def fire_or_none(m, U):
        try:
            return fire(net, m, U)
        except (NotEnabled, KeyError):
            return None

    for C in graph.nodes:
        for g in sorted(_partials_from(sys, C), key=lambda g: format_partial(g, order)):
            m = nu(sys, g)
            for name, i in applicable(sys, g):
                g2 = micro_step(sys, g, name, i)
                t = RuleT(name, i)
                res["effects"].checked += 1
                got = fire_or_none(m, {t: 1}) if t in tset else None
                if got != nu(sys, g2):
                    res["effects"].fail(
                        f"{format_partial(g, order)} --({name},{i})--> {format_partial(g2, order)}"
                        f" but {t} gives {format_marking(net, got) if got is not None else 'no firing'}"
                    )
            H = heat_step(sys, g)
            res["heating"].checked += 1
            got = fire_or_none(m, H) if all(t in tset for t in H) else None
            if got != nu_config(sys, heated(g)):
                missing = [str(t) for t in H if t not in tset]
                why = f"missing {', '.join(missing)}" if missing else (
                    format_marking(net, got) if got is not None else "not enabled"
                )
                res["heating"].fail(f"heating {format_partial(g, order)}: {why}")

    for k, C in enumerate(graph.nodes):
        steps = macro_steps(sys, C)
        m = nu_config(sys, C)
        by_rules = {}
        for R, C2 in steps:
            g2 = produced_partial(sys, C, R)
            U = rule_step(sys, R)
            H = heat_step(sys, g2)
            seq = [U] + ([H] if not H.is_empty() else [])
            res["forward"].checked += 1
            label = f"{format_configuration(C, order)} ={format_vmr(R)}=> {format_configuration(C2, order)}"
            try:
                ok = check_stable_transaction(net, m, seq)
                final = fire(net, fire(net, m, U), H)
            except (InvalidSequence, NotEnabled, KeyError) as exc:
                res["forward"].fail(f"{label}: not a firing sequence ({exc})")
                continue
            if not ok:
                res["forward"].fail(f"{label}: {format_step(net, U + H)} is not a stable transaction")
            elif final != nu_config(sys, C2):
                res["forward"].fail(f"{label}: net reaches {format_marking(net, final)}")
            by_rules[U] = C2

        try:
            txs = enumerate_stable_transactions(net, m)
        except ShapeViolation as exc:
            res["converse"].fail(f"net is not membrane-shaped: {exc}")
            continue
        rep.transactions += len(txs)
        for tx in txs:
            res["converse"].checked += 1
            R = vmr_of_step(sys, tx.rules)
            C2 = by_rules.get(tx.rules)
            if C2 is None:
                res["converse"].fail(
                    f"at {format_marking(net, m)}: transaction {format_step(net, tx.step)} "
                    f"has no macro step {format_vmr(R)}"
                )
            elif nu_config(sys, C2) != tx.target:
                res["converse"].fail(
                    f"at {format_marking(net, m)}: transaction {format_step(net, tx.step)} "
                    f"reaches {format_marking(net, tx.target)}, macro step gives "
                    f"{format_configuration(C2, order)}"
                )
        if len(txs) != len(steps):
            res["converse"].fail(
                f"at {format_configuration(C, order)}: {len(txs)} transactions vs {len(steps)} macro steps"
            )

    into, outof = zero_partition(net)
    res["partition"].checked = len(net.transitions)
    both = sorted(map(str, into & outof))
    neither = sorted(str(t) for t in net.transitions if t not in into and t not in outof)
    if both:
        res["partition"].fail(f"transitions both producing and consuming zero tokens: {both}")
    elif neither:
        res["partition"].fail(f"transitions touching no zero place: {neither}")
    return rep


# ---------------------------------------------------------------------------
# fault injection


def drop_transition(net: ZSNet, t) -> ZSNet:
    return net.replace(
        transitions=tuple(x for x in net.transitions if x != t),
        pre={k: v for k, v in net.pre.items() if k != t},
        post={k: v for k, v in net.post.items() if k != t},
    )


def reweight(net: ZSNet, t, place, weight: int, side: str = "post") -> ZSNet:
    """Set the weight of one arc of ``t`` (``side`` is ``"pre"`` or ``"post"``)."""
    flow = dict(net.pre if side == "pre" else net.post)
    arcs = dict(flow.get(t, EMPTY).items())
    arcs[place] = weight
    flow[t] = Multiset(arcs)
    return net.replace(**{side: flow})

