"""Maximally parallel semantics of membrane systems.

A configuration is a tuple of multisets, one per membrane (index ``i`` at position
``i - 1``).  A partial configuration pairs each membrane's consumable multiset with
the multiset produced so far in the current step.  Micro steps apply one rule
instance; a macro step is a maximal multiset of rule instances per membrane,
after which the produced objects are merged back ("heated").
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

from .errors import BudgetExceeded, NotApplicable
from .multiset import EMPTY, Multiset
from .psystem import HERE, IN, OUT, MembraneSystem, Rule

Configuration = tuple[Multiset, ...]
PartialConfiguration = tuple[tuple[Multiset, Multiset], ...]
VectorMultiRule = tuple[Multiset, ...]

DEFAULT_STATE_CAP = 100_000


def state_cap_default() -> int:
    env = os.environ.get("ZSM_STATE_CAP")
    return int(env) if env else DEFAULT_STATE_CAP


def configuration(*parts) -> Configuration:
    return tuple(Multiset(p) for p in parts)


def partial_of(C: Configuration) -> PartialConfiguration:
    return tuple((w, EMPTY) for w in C)


def initial(sys: MembraneSystem) -> PartialConfiguration:
    return partial_of(sys.init)


def heated(gamma: PartialConfiguration) -> Configuration:
    return tuple(w + wb for w, wb in gamma)


def format_configuration(C: Configuration, order: Sequence[str] | None = None) -> str:
    return "(" + ", ".join(w.format(order) for w in C) + ")"


def format_partial(gamma: PartialConfiguration, order: Sequence[str] | None = None) -> str:
    return "(" + ", ".join(f"({w.format(order)}, {wb.format(order)})" for w, wb in gamma) + ")"


def format_vmr(R: VectorMultiRule) -> str:
    return "(" + ", ".join(Ri.format() for Ri in R) + ")"


def vmr_from_pairs(sys: MembraneSystem, pairs) -> VectorMultiRule:
    """Build a vector multi-rule from an iterable of ``(rule name, membrane)``."""
    per = [dict() for _ in sys.membranes]
    for name, i in pairs:
        sys.rule(name, i)
        per[i - 1][name] = per[i - 1].get(name, 0) + 1
    return tuple(Multiset(d) for d in per)


def vmr_is_empty(R: VectorMultiRule) -> bool:
    return all(Ri.is_empty() for Ri in R)


def _distribute(sys: MembraneSystem, rule: Rule, k: int, produced: list[dict]) -> Multiset:
    """Add ``k`` copies of the rule's products into ``produced``; return objects expelled from the skin."""
    lost: dict = {}
    i = rule.membrane
    for (a, t), c in rule.rhs.items():
        c *= k
        if t == HERE:
            dest = i
        elif t == OUT:
            dest = sys.father(i)
            if dest is None:
                lost[a] = lost.get(a, 0) + c
                continue
        else:
            dest = t.membrane
        produced[dest - 1][a] = produced[dest - 1].get(a, 0) + c
    return Multiset(lost)


def micro_step(
    sys: MembraneSystem, gamma: PartialConfiguration, r: str, i: int
) -> PartialConfiguration:
    """Apply one instance of rule ``r`` of membrane ``i``.

    Objects sent ``out`` of the skin are dropped (only accepted with ``allow_skin_out``).
    """
    rule = sys.rule(r, i)
    w_i = gamma[i - 1][0]
    if not rule.lhs <= w_i:
        raise NotApplicable(f"{r} needs {rule.lhs.format()} in membrane {i}, has {w_i.format()}")
    produced = [dict() for _ in sys.membranes]
    _distribute(sys, rule, 1, produced)
    out = []
    for j, (w, wb) in enumerate(gamma, start=1):
        if j == i:
            w = w - rule.lhs
        out.append((w, wb + produced[j - 1]))
    return tuple(out)


def applicable(sys: MembraneSystem, gamma: PartialConfiguration) -> Iterator[tuple[str, int]]:
    for i in sys.membranes:
        w = gamma[i - 1][0]
        for rule in sys.rules_of(i):
            if rule.lhs <= w:
                yield rule.name, i


def is_quiescent(sys: MembraneSystem, gamma: PartialConfiguration) -> bool:
    return next(applicable(sys, gamma), None) is None


def _max_copies(lhs: Multiset, w: Multiset) -> int:
    return min(w[a] // c for a, c in lhs.items())


def maximal_rule_multisets(rules: Sequence[Rule], w: Multiset) -> list[Multiset]:
    """Every multiset of ``rules`` whose summed lhs fits in ``w`` and whose residual enables none of them.

    Enumerated with rules in declaration order and counts ascending.
    """
    names = [r.name for r in rules]
    results: list[Multiset] = []

    def rec(k: int, left: Multiset, counts: list[int]) -> None:
        if k == len(rules):
            if not any(r.lhs <= left for r in rules):
                results.append(Multiset(dict(zip(names, counts))))
            return
        rule = rules[k]
        for c in range(_max_copies(rule.lhs, left) + 1):
            rec(k + 1, left - rule.lhs.scale(c), counts + [c])

    rec(0, w, [])
    return results


def apply_vmr(
    sys: MembraneSystem, C: Configuration, R: VectorMultiRule
) -> tuple[Configuration, Multiset]:
    """Fire a whole vector multi-rule at once and heat; returns (C', objects expelled from the skin).

    Raises :class:`NotApplicable` if some membrane lacks the objects.  Maximality is not checked.
    """
    produced = [dict() for _ in sys.membranes]
    consumed = []
    lost = EMPTY
    for i in sys.membranes:
        need = EMPTY
        for name, k in R[i - 1].items():
            rule = sys.rule(name, i)
            need = need + rule.lhs.scale(k)
            lost = lost + _distribute(sys, rule, k, produced)
        if not need <= C[i - 1]:
            raise NotApplicable(f"membrane {i} cannot supply {need.format()}")
        consumed.append(need)
    return tuple(C[j] - consumed[j] + produced[j] for j in range(sys.n)), lost


def is_macro_step(sys: MembraneSystem, C: Configuration, R: VectorMultiRule) -> bool:
    if vmr_is_empty(R):
        return False
    for i in sys.membranes:
        need = EMPTY
        for name, k in R[i - 1].items():
            need = need + sys.rule(name, i).lhs.scale(k)
        if not need <= C[i - 1]:
            return False
        left = C[i - 1] - need
        if any(r.lhs <= left for r in sys.rules_of(i)):
            return False
    return True


def macro_steps(sys: MembraneSystem, C: Configuration) -> list[tuple[VectorMultiRule, Configuration]]:
    """All ``(R, C')`` with ``C =R=> C'``; empty iff no rule is applicable anywhere."""
    per_membrane = [maximal_rule_multisets(sys.rules_of(i), C[i - 1]) for i in sys.membranes]
    out = []
    for R in itertools.product(*per_membrane):
        if vmr_is_empty(R):
            continue
        C2, _ = apply_vmr(sys, C, R)
        out.append((tuple(R), C2))
    return out


def micro_macro_steps(sys: MembraneSystem, C: Configuration) -> set[tuple[VectorMultiRule, Configuration]]:
    """Brute-force oracle: explore every micro-step interleaving from ``C`` to quiescence."""
    start = partial_of(C)
    zero = tuple(EMPTY for _ in sys.membranes)
    seen = set()
    results = set()
    stack = [(start, zero)]
    while stack:
        gamma, used = stack.pop()
        if (gamma, used) in seen:
            continue
        seen.add((gamma, used))
        moves = list(applicable(sys, gamma))
        if not moves:
            if not vmr_is_empty(used):
                results.add((used, heated(gamma)))
            continue
        for name, i in moves:
            nxt = micro_step(sys, gamma, name, i)
            u = list(used)
            u[i - 1] = u[i - 1] + Multiset({name: 1})
            stack.append((nxt, tuple(u)))
    return results


@dataclass
class ReachabilityGraph:
    system: MembraneSystem
    depth: int
    nodes: list[Configuration] = field(default_factory=list)
    layer: list[int] = field(default_factory=list)
    edges: list[tuple[int, VectorMultiRule, int]] = field(default_factory=list)
    halting: set[int] = field(default_factory=set)
    expelled: dict[tuple[int, int], Multiset] = field(default_factory=dict)
    index: dict[Configuration, int] = field(default_factory=dict)

    def add(self, C: Configuration, layer: int) -> tuple[int, bool]:
        if C in self.index:
            return self.index[C], False
        self.index[C] = len(self.nodes)
        self.nodes.append(C)
        self.layer.append(layer)
        return self.index[C], True

    def successors(self, k: int) -> list[tuple[VectorMultiRule, int]]:
        return [(R, d) for s, R, d in self.edges if s == k]

    def words(self) -> set[tuple[str, ...]]:
        """Node set in juxtaposition form, e.g. ``{("ab",), ("bc",)}``."""
        order = self.system.alphabet
        return {tuple(w.word(order) for w in C) for C in self.nodes}


def reachability_graph(
    sys: MembraneSystem, depth: int, state_cap: int | None = None
) -> ReachabilityGraph:
    """Breadth-first closure of macro steps from the initial configuration, ``depth`` layers deep.

    Halting nodes are only known for nodes whose successors were computed, i.e. those
    above the last layer; last-layer nodes are probed too so the flag is exact.
    """
    cap = state_cap_default() if state_cap is None else state_cap
    g = ReachabilityGraph(sys, depth)
    g.add(heated(initial(sys)), 0)
    frontier = deque([0])
    while frontier:
        k = frontier.popleft()
        steps = macro_steps(sys, g.nodes[k])
        if not steps:
            g.halting.add(k)
            continue
        if g.layer[k] >= depth:
            continue
        for R, C2 in steps:
            d, new = g.add(C2, g.layer[k] + 1)
            _, lost = apply_vmr(sys, g.nodes[k], R)
            g.edges.append((k, R, d))
            if not lost.is_empty():
                g.expelled[(k, d)] = lost
            if new:
                if len(g.nodes) > cap:
                    raise BudgetExceeded(f"state cap {cap} exceeded", partial=g)
                frontier.append(d)
    return g


def computations(sys: MembraneSystem, depth: int) -> Iterator[list[tuple[VectorMultiRule, Configuration]]]:
    """Every macro-step sequence of length 0..depth from the initial configuration."""
    start = heated(initial(sys))

    def rec(C, path):
        yield list(path)
        if len(path) == depth:
            return
        for R, C2 in macro_steps(sys, C):
            path.append((R, C2))
            yield from rec(C2, path)
            path.pop()

    yield from rec(start, [])
