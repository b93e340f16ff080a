"""Zero-safe Petri nets: token game, stable steps and stable transactions, states."""

from __future__ import annotations

from collections import deque
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .errors import BudgetExceeded, InvalidSequence, NotEnabled, ShapeViolation
from .multiset import EMPTY, Multiset, msum

Marking = Multiset
Step = Multiset


@dataclass(frozen=True)
class ZSNet:
    """``pre[t]`` / ``post[t]`` are multisets of places (arc weights); ``zero`` is the set Z."""

    places: tuple
    transitions: tuple
    pre: Mapping[Hashable, Multiset]
    post: Mapping[Hashable, Multiset]
    m0: Multiset
    zero: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        P = set(self.places)
        if len(P) != len(self.places) or len(set(self.transitions)) != len(self.transitions):
            raise ValueError("duplicate place or transition")
        if not self.zero <= P:
            raise ValueError("zero places must be places")
        if self.zero and self.zero == P:
            raise ValueError("at least one place must be stable")
        for t in self.transitions:
            for s in list(self.pre.get(t, EMPTY)) + list(self.post.get(t, EMPTY)):
                if s not in P:
                    raise ValueError(f"arc of {t} touches unknown place {s}")
        for s in self.m0:
            if s not in P:
                raise ValueError(f"initial marking on unknown place {s}")
        for z in self.zero:
            if self.m0[z]:
                raise ValueError(f"zero place {z} is initially marked")

    def F(self, x, y) -> int:
        """Arc weight ``F(x, y)`` for place->transition or transition->place."""
        if x in self._tset:
            return self.post_of(x)[y]
        return self.pre_of(y)[x]

    def pre_of(self, t) -> Multiset:
        return self.pre.get(t, EMPTY)

    def post_of(self, t) -> Multiset:
        return self.post.get(t, EMPTY)

    @cached_property
    def _tset(self) -> frozenset:
        return frozenset(self.transitions)

    @cached_property
    def stable_places(self) -> tuple:
        return tuple(s for s in self.places if s not in self.zero)

    def stable_pre(self, t) -> Multiset:
        return Multiset({s: c for s, c in self.pre_of(t).items() if s not in self.zero})

    def replace(self, **changes) -> ZSNet:
        data = dict(
            places=self.places,
            transitions=self.transitions,
            pre=self.pre,
            post=self.post,
            m0=self.m0,
            zero=self.zero,
        )
        data.update(changes)
        return ZSNet(**data)


def _check_step(net: ZSNet, U: Mapping) -> None:
    for t in U:
        if t not in net._tset:
            raise KeyError(f"unknown transition {t}")


def step_pre(net: ZSNet, U: Mapping) -> Multiset:
    return msum(net.pre_of(t).scale(k) for t, k in U.items())


def step_post(net: ZSNet, U: Mapping) -> Multiset:
    return msum(net.post_of(t).scale(k) for t, k in U.items())


def enabled(net: ZSNet, m: Marking, U: Mapping) -> bool:
    _check_step(net, U)
    return step_pre(net, U) <= m


def fire(net: ZSNet, m: Marking, U: Mapping) -> Marking:
    _check_step(net, U)
    need = step_pre(net, U)
    if not need <= m:
        raise NotEnabled(f"step needs {need} but marking is {m}")
    return Multiset(m) - need + step_post(net, U)


def is_stable(net: ZSNet, m: Marking) -> bool:
    return not any(m[z] for z in net.zero)


def _run(net: ZSNet, m: Marking, seq: Sequence[Mapping]) -> list[Marking]:
    marks = [Multiset(m)]
    for k, U in enumerate(seq):
        try:
            marks.append(fire(net, marks[-1], U))
        except NotEnabled as exc:
            raise InvalidSequence(f"step {k} not enabled: {exc}") from None
    return marks


def stably_enabled(net: ZSNet, m: Marking, U: Mapping) -> bool:
    need = step_pre(net, U)
    return all(need[s] <= m[s] for s in need if s not in net.zero)


def check_stable_step(net: ZSNet, m: Marking, seq: Sequence[Mapping]) -> bool:
    marks = _run(net, m, seq)
    U = msum(seq)
    return stably_enabled(net, m, U) and is_stable(net, marks[0]) and is_stable(net, marks[-1])


def leaves_nothing_enabled(net: ZSNet, m: Marking, U: Mapping) -> bool:
    """Maximality: after reserving the stable preset of ``U``, no transition with a
    non-empty stable preset can still be stably enabled."""
    need = step_pre(net, U)
    residual = {s: m[s] - need[s] for s in net.stable_places}
    for t in net.transitions:
        sp = net.stable_pre(t)
        if sp and all(c <= residual[s] for s, c in sp.items()):
            return False
    return True


def check_stable_transaction(net: ZSNet, m: Marking, seq: Sequence[Mapping]) -> bool:
    if not seq:
        return False
    marks = _run(net, m, seq)
    U = msum(seq)
    if U.is_empty() or not check_stable_step(net, m, seq):
        return False
    if any(is_stable(net, mi) for mi in marks[1:-1]):
        return False
    return leaves_nothing_enabled(net, m, U)


@dataclass(frozen=True)
class Transaction:
    rules: Step
    heat: Step
    source: Marking
    target: Marking

    @property
    def step(self) -> Step:
        return self.rules + self.heat

    def serialization(self) -> list[Step]:
        return [self.rules] + ([self.heat] if not self.heat.is_empty() else [])


@dataclass(frozen=True)
class Shape:
    """Partition of a membrane-shaped net's transitions."""

    producers: tuple  # consume stable tokens only, produce into zero places only
    heaters: Mapping  # zero place -> its unique consumer


def membrane_shape(net: ZSNet) -> Shape:
    producers = []
    heaters: dict = {}
    for t in net.transitions:
        pre, post = net.pre_of(t), net.post_of(t)
        pre_z = [s for s in pre if s in net.zero]
        post_z = [s for s in post if s in net.zero]
        if not pre_z:
            if not pre:
                raise ShapeViolation(f"{t} has an empty preset")
            if len(post_z) != len(post):
                raise ShapeViolation(f"{t} consumes stable tokens but produces into a stable place")
            producers.append(t)
        else:
            if len(pre) != 1 or pre[pre_z[0]] != 1 or post_z:
                raise ShapeViolation(f"{t} consumes zero tokens but is not a one-token mover")
            z = pre_z[0]
            if z in heaters:
                raise ShapeViolation(f"zero place {z} has two consumers")
            heaters[z] = t
    for z in net.zero:
        if z not in heaters:
            raise ShapeViolation(f"zero place {z} has no consumer")
    return Shape(tuple(producers), heaters)


def _maximal_multisets(net: ZSNet, ts: Sequence, m: Marking) -> list[Multiset]:
    avail = {s: m[s] for s in net.stable_places}
    pres = [net.stable_pre(t) for t in ts]
    out: list[Multiset] = []

    def fits(p, left):
        return all(c <= left[s] for s, c in p.items())

    def rec(k, left, counts):
        if k == len(ts):
            if not any(p and fits(p, left) for p in pres):
                out.append(Multiset(dict(zip(ts, counts))))
            return
        p = pres[k]
        limit = min((left[s] // c for s, c in p.items()), default=0)
        for c in range(limit + 1):
            nxt = dict(left)
            for s, w in p.items():
                nxt[s] -= c * w
            rec(k + 1, nxt, counts + [c])

    rec(0, avail, [])
    return out


def enumerate_stable_transactions(net: ZSNet, m: Marking) -> list[Transaction]:
    """All stable transactions from stable ``m`` in a membrane-shaped net.

    Rule part: a maximal stably-enabled multiset of producers; heat part: one firing
    of each zero place's consumer per produced token.
    """
    if not is_stable(net, m):
        raise ValueError("transactions start from stable markings")
    shape = membrane_shape(net)
    out = []
    for U in _maximal_multisets(net, shape.producers, m):
        if U.is_empty():
            continue
        mid = fire(net, m, U)
        heat = Multiset({shape.heaters[z]: mid[z] for z in net.zero if mid[z]})
        out.append(Transaction(U, heat, Multiset(m), fire(net, mid, heat)))
    return out


def state_vector(net: ZSNet, X: Mapping) -> dict:
    """``m0 + sum X(t) (post(t) - pre(t))`` as a possibly negative vector."""
    _check_step(net, X)
    vec = {s: net.m0[s] for s in net.places}
    for t, k in X.items():
        for s, c in net.pre_of(t).items():
            vec[s] -= k * c
        for s, c in net.post_of(t).items():
            vec[s] += k * c
    return vec


def _fire_all(net: ZSNet, m: Marking, X: Multiset, seen: set) -> bool:
    if X.is_empty():
        return True
    if X in seen:
        return False
    seen.add(X)
    for t in X:
        if net.pre_of(t) <= m:
            if _fire_all(net, fire(net, m, {t: 1}), X - Multiset({t: 1}), seen):
                return True
    return False


def state_marking(net: ZSNet, X: Mapping, budget: int = 100_000) -> Marking | None:
    """The marking reached by the state ``X``, or ``None`` when ``X`` is not a state.

    A state's marking must be non-negative and reachable; reachability is tried first by
    firing ``X`` itself, then by a bounded breadth-first search of the whole net.
    """
    X = Multiset(X)
    vec = state_vector(net, X)
    if any(v < 0 for v in vec.values()):
        return None
    target = Multiset(vec)
    if _fire_all(net, net.m0, X, set()):
        return target
    seen = {net.m0}
    queue = deque([net.m0])
    while queue:
        m = queue.popleft()
        if m == target:
            return target
        for t in net.transitions:
            if net.pre_of(t) <= m:
                m2 = fire(net, m, {t: 1})
                if m2 not in seen:
                    if len(seen) >= budget:
                        raise BudgetExceeded(f"reachability search exceeded {budget} markings")
                    seen.add(m2)
                    queue.append(m2)
    return None


def reachable_markings(net: ZSNet, max_firings: int, budget: int = 100_000) -> dict[Marking, int]:
    """Markings reachable with at most ``max_firings`` single-transition firings -> min distance."""
    dist = {net.m0: 0}
    queue = deque([net.m0])
    while queue:
        m = queue.popleft()
        if dist[m] == max_firings:
            continue
        for t in net.transitions:
            if net.pre_of(t) <= m:
                m2 = fire(net, m, {t: 1})
                if m2 not in dist:
                    if len(dist) >= budget:
                        raise BudgetExceeded(f"reachability search exceeded {budget} markings")
                    dist[m2] = dist[m] + 1
                    queue.append(m2)
    return dist


def format_marking(net: ZSNet, m: Marking) -> str:
    return m.format(net.places)


def format_step(net: ZSNet, U: Mapping) -> str:
    return Multiset(U).format(net.transitions)


def net_from_arcs(
    places: Iterable,
    transitions: Iterable,
    arcs: Mapping[tuple, int],
    m0: Mapping,
    zero: Iterable = (),
) -> ZSNet:
    """Build a net from ``{(x, y): weight}``; the direction is inferred from which side is a place."""
    places, transitions = tuple(places), tuple(transitions)
    P = set(places)
    pre = {t: {} for t in transitions}
    post = {t: {} for t in transitions}
    for (x, y), w in arcs.items():
        if x in P:
            pre[y][x] = w
        else:
            post[x][y] = w
    return ZSNet(
        places,
        transitions,
        {t: Multiset(d) for t, d in pre.items()},
        {t: Multiset(d) for t, d in post.items()},
        Multiset(m0),
        frozenset(zero),
    )
