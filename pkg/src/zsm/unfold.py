"""Individual-token unfolding of a (zero-safe) net into an occurrence net.

Conditions are token instances: the ``i``-th initial token of a place, or the ``i``-th
token an event put on a place.  Events are ``(X, t)`` for every co-set ``X`` of
conditions whose places are exactly the preset of ``t``.  Construction is bounded by
*layers*: an event consuming only stable conditions opens a new layer (one more than
the deepest condition it consumes); events consuming zero conditions stay in the layer
of their input.  For nets compiled from membrane systems the layer of a rule event is
the macro step in which it fires.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from collections import deque
from collections.abc import Hashable, Iterable
from dataclasses import dataclass, field

from .multiset import Multiset
from .zsnet import ZSNet, fire, reachable_markings


def _digest(text: str) -> str:
    return hashlib.sha1(text.encode()).hexdigest()[:12]


@dataclass(eq=False)
class Condition:
    id: int
    place: Hashable
    origin: int | None  # producing event id; None for initial tokens
    copy: int
    layer: int
    zero: bool
    key: str

    def __repr__(self) -> str:
        return f"b{self.id}{self.place}"


@dataclass(eq=False)
class Event:
    id: int
    preset: tuple[int, ...]
    transition: Hashable
    layer: int
    key: str
    postset: tuple[int, ...] = ()

    def __repr__(self) -> str:
        return f"e{self.id}:{self.transition}"


@dataclass
class OccurrenceNet:
    net: ZSNet
    layers: int | None
    event_budget: int | None
    conditions: list[Condition] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    initial: tuple[int, ...] = ()
    truncated: bool = False
    consumers: list[list[int]] = field(default_factory=list)
    event_index: dict = field(default_factory=dict)
    _past: list[int] = field(default_factory=list, repr=False)
    _confl: list[int] = field(default_factory=list, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    # -- basic structure -------------------------------------------------

    @property
    def zero_conditions(self) -> frozenset[int]:
        return frozenset(b.id for b in self.conditions if b.zero)

    def event(self, preset: Iterable[int], t) -> Event | None:
        k = self.event_index.get((frozenset(preset), t))
        return None if k is None else self.events[k]

    def producer(self, b: int) -> Event | None:
        o = self.conditions[b].origin
        return None if o is None else self.events[o]

    def fold(self, A: Iterable[int]) -> Multiset:
        """Image of a set of conditions as a marking of the folded net."""
        return Multiset([self.conditions[b].place for b in A])

    def finalize(self) -> None:
        """Compute causal pasts and inherited conflicts (bitsets over event ids)."""
        n = len(self.events)
        self.consumers = [[] for _ in self.conditions]
        for e in self.events:
            for b in e.preset:
                self.consumers[b].append(e.id)
        past = [0] * n
        for e in self.events:  # events are created after their preset's producers
            p = 1 << e.id
            for b in e.preset:
                o = self.conditions[b].origin
                if o is not None:
                    p |= past[o]
            past[e.id] = p
        ic = [0] * n
        for users in self.consumers:
            if len(users) > 1:
                mask = 0
                for u in users:
                    mask |= 1 << u
                for u in users:
                    ic[u] |= mask & ~(1 << u)
        confl = [0] * n
        for e in self.events:
            c = ic[e.id]
            for b in e.preset:
                o = self.conditions[b].origin
                if o is not None:
                    c |= confl[o]
            confl[e.id] = c
        self._past = past
        self._confl = confl
        self._cache.clear()

    # -- relations; nodes are ("b", id) or ("e", id) ------------------------

    def _past_of(self, node) -> int:
        kind, k = node
        if kind == "e":
            return self._past[k]
        o = self.conditions[k].origin
        return 0 if o is None else self._past[o]

    def _confl_of(self, node) -> int:
        kind, k = node
        if kind == "e":
            return self._confl[k]
        o = self.conditions[k].origin
        return 0 if o is None else self._confl[o]

    def causally_before(self, x, y) -> bool:
        """``x F+ y``."""
        self._check(x)
        self._check(y)
        if x == y:
            return False
        py = self._past_of(y)
        if x[0] == "e":
            return bool(py >> x[1] & 1)
        return any(py >> e & 1 for e in self.consumers[x[1]])

    def conflict(self, x, y) -> bool:
        self._check(x)
        self._check(y)
        return bool(self._confl_of(x) & self._past_of(y))

    def concurrent(self, x, y) -> bool:
        return (
            x != y
            and not self.conflict(x, y)
            and not self.causally_before(x, y)
            and not self.causally_before(y, x)
        )

    def _check(self, node) -> None:
        kind, k = node
        size = len(self.events) if kind == "e" else len(self.conditions) if kind == "b" else -1
        if not (0 <= k < size):
            raise KeyError(f"unknown node {node}")

    def co_set(self, A: Iterable[int]) -> bool:
        A = sorted(set(A))
        return all(self.concurrent(("b", x), ("b", y)) for x, y in itertools.combinations(A, 2))

    def event_leq(self, e: int, f: int) -> bool:
        return bool(self._past[f] >> e & 1)

    def event_conflict(self, e: int, f: int) -> bool:
        return bool(self._confl[e] & self._past[f])

    def past_events(self, e: int) -> list[int]:
        return _bits(self._past[e])

    def conflict_masks(self) -> list[int]:
        """For each event, the bitset of all events in conflict with it."""
        cached = self._cache.get("conflict-masks")
        if cached is not None:
            return cached
        above = [0] * len(self.events)
        for f in range(len(self.events)):
            for g in _bits(self._past[f]):
                above[g] |= 1 << f
        masks = []
        for e in range(len(self.events)):
            m = 0
            for g in _bits(self._confl[e]):
                m |= above[g]
            masks.append(m)
        self._cache["conflict-masks"] = masks
        return masks

    # -- token game --------------------------------------------------------

    def enabled_events(self, marking: frozenset[int]) -> list[int]:
        cands = {e for b in marking for e in self.consumers[b]}
        return sorted(e for e in cands if marking.issuperset(self.events[e].preset))

    def fire(self, marking: frozenset[int], e: int) -> frozenset[int]:
        ev = self.events[e]
        if not marking.issuperset(ev.preset):
            raise ValueError(f"{ev!r} not enabled")
        rest = marking.difference(ev.preset)
        if rest.intersection(ev.postset):
            raise AssertionError(f"safety violated firing {ev!r}")
        return rest.union(ev.postset)

    def is_configuration(self, X: Iterable[int]) -> bool:
        X = set(X)
        for e in X:
            if any(f not in X for f in self.past_events(e)):
                return False
        mask = sum(1 << e for e in X)
        return not any(self._confl[e] & mask for e in X)

    def state_marking(self, X: Iterable[int]) -> frozenset[int] | None:
        """``m_X`` for a set of events, or ``None`` when ``X`` is not a state."""
        X = set(X)
        if not self.is_configuration(X):
            return None
        out = set(self.initial)
        for e in X:
            out.update(self.events[e].postset)
        for e in X:
            out.difference_update(self.events[e].preset)
        return frozenset(out)

    def find_state(self, A: Iterable[int], budget: int = 200_000) -> frozenset[int] | None:
        """Some set of events ``X`` with ``m_X == A``, or ``None``."""
        A = frozenset(A)
        X0: set[int] = set()
        for b in A:
            o = self.conditions[b].origin
            if o is not None:
                X0.update(self.past_events(o))
        m0 = self.state_marking(X0)
        if m0 is None or not A <= m0:
            return None
        seen = set()
        stack = [(m0, frozenset(X0))]
        while stack:
            m, X = stack.pop()
            if m == A:
                return X
            if m in seen:
                continue
            seen.add(m)
            if len(seen) > budget:
                return None
            for e in self.enabled_events(m - A):
                if A.isdisjoint(self.events[e].preset):
                    stack.append((self.fire(m, e), X | {e}))
        return None

    def is_slice(self, A: Iterable[int]) -> bool:
        A = frozenset(A)
        return self.co_set(A) and self.find_state(A) is not None


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class FoldingMorphism:
    on: OccurrenceNet

    def eta(self, e: int):
        return self.on.events[e].transition

    def beta(self, b: int):
        return self.on.conditions[b].place

    def fold_marking(self, A: Iterable[int]) -> Multiset:
        return self.on.fold(A)

    def fold_step(self, X: Iterable[int]) -> Multiset:
        return Multiset([self.eta(e) for e in X])


def _opens_layer(net: ZSNet, t) -> bool:
    return not any(s in net.zero for s in net.pre_of(t))


def unfold(
    net: ZSNet, layers: int | None = None, event_budget: int | None = None
) -> tuple[OccurrenceNet, FoldingMorphism]:
    """Build the unfolding up to ``layers`` (``None`` = unbounded) and ``event_budget`` events.

    When the budget runs out, the partial result is returned with ``truncated`` set.
    At least one bound must be given.
    """
    if layers is None and event_budget is None:
        raise ValueError("give a layer bound or an event budget")
    on = OccurrenceNet(net, layers, event_budget)
    consumers_of_place: dict = {}
    for t in net.transitions:
        for s in net.pre_of(t):
            consumers_of_place.setdefault(s, []).append(t)
    co: list[int] = []  # bitset of conditions concurrent with each condition
    by_place: dict = {}
    processed: list[bool] = []
    queue: deque[int] = deque()

    def new_condition(place, origin, copy, layer, origin_key) -> int:
        k = len(on.conditions)
        key = _digest(f"{origin_key}|{place}|{copy}")
        on.conditions.append(Condition(k, place, origin, copy, layer, place in net.zero, key))
        co.append(0)
        processed.append(False)
        by_place.setdefault(place, []).append(k)
        queue.append(k)
        return k

    for s in net.places:
        for i in range(net.m0[s]):
            new_condition(s, None, i, 0, "init")
    init = list(range(len(on.conditions)))
    on.initial = tuple(init)
    all_init = sum(1 << b for b in init)
    for b in init:
        co[b] = all_init & ~(1 << b)

    def add_event(preset: tuple[int, ...], t) -> bool:
        if (frozenset(preset), t) in on.event_index:
            return True
        depth = max((on.conditions[b].layer for b in preset), default=0)
        layer = depth + 1 if _opens_layer(net, t) else depth
        if layers is not None and layer > layers:
            return True
        if event_budget is not None and len(on.events) >= event_budget:
            on.truncated = True
            return False
        k = len(on.events)
        key = _digest("|".join(sorted(on.conditions[b].key for b in preset)) + f"#{t}")
        ev = Event(k, preset, t, layer, key)
        on.events.append(ev)
        on.event_index[(frozenset(preset), t)] = k
        if preset:
            common = ~0
            for b in preset:
                common &= co[b]
        else:
            common = sum(1 << b for b in range(len(on.conditions)))
        post = []
        for s in net.post_of(t).ordered(net.places):
            for i in range(net.post_of(t)[s]):
                post.append(new_condition(s, k, i, layer, key))
        ev.postset = tuple(post)
        sib = sum(1 << b for b in post)
        for c in post:
            co[c] = (common | sib) & ~(1 << c)
        rest = common
        while rest:
            low = rest & -rest
            d = low.bit_length() - 1
            rest ^= low
            co[d] |= sib
        return True

    def extensions_with(c: int):
        """Yield (preset, t) for co-sets containing ``c`` whose other members were processed earlier."""
        place = on.conditions[c].place
        for t in consumers_of_place.get(place, ()):
            need = dict(net.pre_of(t).items())
            need[place] -= 1
            slots = []
            for s, w in need.items():
                if w == 0:
                    continue
                cands = [b for b in by_place.get(s, ()) if processed[b] and co[c] >> b & 1]
                slots.append((w, cands))
            yield from ((tuple(sorted(p + (c,))), t) for p in _choose(slots, co))

    # transitions with an empty preset fire once, from nothing
    for t in net.transitions:
        if not net.pre_of(t):
            add_event((), t)
    while queue:
        c = queue.popleft()
        for preset, t in list(extensions_with(c)):
            if not add_event(preset, t):
                queue.clear()
                break
        processed[c] = True
    on.finalize()
    return on, FoldingMorphism(on)


def _choose(slots, co):
    """Pairwise-concurrent picks: ``w`` conditions from each ``(w, candidates)`` slot."""
    if not slots:
        yield ()
        return

    def rec(k, chosen, mask):
        if k == len(slots):
            yield tuple(chosen)
            return
        w, cands = slots[k]
        ok = [b for b in cands if all(co[x] >> b & 1 for x in chosen)]
        for combo in itertools.combinations(ok, w):
            if all(co[x] >> y & 1 for x, y in itertools.combinations(combo, 2)):
                yield from rec(k + 1, chosen + list(combo), mask)

    yield from rec(0, [], 0)


# ---------------------------------------------------------------------------
# morphism and marking checks


def morphism_violations(on: OccurrenceNet) -> list[str]:
    """Per-event and initial-marking checks of the folding morphism."""
    net = on.net
    out = []
    if on.fold(on.initial) != net.m0:
        out.append(f"initial conditions fold to {on.fold(on.initial)}, expected {net.m0}")
    for e in on.events:
        if on.fold(e.preset) != net.pre_of(e.transition):
            out.append(f"{e!r}: preset folds to {on.fold(e.preset)}")
        if on.fold(e.postset) != net.post_of(e.transition):
            out.append(f"{e!r}: postset folds to {on.fold(e.postset)}")
    keys = {}
    for e in on.events:
        k = (frozenset(e.preset), e.transition)
        if k in keys:
            out.append(f"{e!r} duplicates e{keys[k]}")
        keys[k] = e.id
    return out


def random_firing_violations(
    on: OccurrenceNet, runs: int = 1000, max_len: int = 30, seed: int = 0
) -> list[str]:
    """Fire random event sequences; the unfolding must stay safe and its folded
    marking must follow the folded net's token game."""
    rng = random.Random(seed)
    net = on.net
    out = []
    start = frozenset(on.initial)
    for run in range(runs):
        M, m = start, net.m0
        for _ in range(max_len):
            en = on.enabled_events(M)
            if not en:
                break
            e = rng.choice(en)
            ev = on.events[e]
            rest = M.difference(ev.preset)
            if rest.intersection(ev.postset):
                out.append(f"run {run}: {ev!r} puts a second token on a condition")
                break
            M = rest.union(ev.postset)
            m = fire(net, m, {ev.transition: 1})
            if len(M) != sum(1 for _ in M) or on.fold(M) != m:
                out.append(f"run {run}: folded marking {on.fold(M)} differs from net marking {m}")
                break
    return out


@dataclass
class CoverReport:
    markings: int
    uncovered: list[Multiset]

    @property
    def passed(self) -> bool:
        return not self.uncovered


def states_cover_markings(
    net: ZSNet, on: OccurrenceNet, fm: FoldingMorphism, depth: int, budget: int = 200_000
) -> CoverReport:
    """Every marking reachable in ``net`` within ``depth`` firings is the fold of some state.

    States are collected by exploring the unfolding's own token game to the same depth.
    """
    targets = reachable_markings(net, depth, budget)
    folded = set()
    seen = {frozenset(on.initial)}
    frontier = [frozenset(on.initial)]
    for _ in range(depth + 1):
        nxt = []
        for M in frontier:
            folded.add(fm.fold_marking(M))
            for e in on.enabled_events(M):
                M2 = on.fire(M, e)
                if M2 not in seen:
                    seen.add(M2)
                    if len(seen) > budget:
                        from .errors import BudgetExceeded

                        raise BudgetExceeded(f"state exploration exceeded {budget}")
                    nxt.append(M2)
        frontier = nxt
    missing = [m for m in targets if m not in folded]
    missing.sort(key=lambda m: m.format(net.places))
    return CoverReport(len(targets), missing)


def drop_event(on: OccurrenceNet, e: int) -> OccurrenceNet:
    """Copy of ``on`` without event ``e`` and everything causally after it (fault injection)."""
    doomed = {f.id for f in on.events if on.event_leq(e, f.id)}
    dead_conds = {b for f in doomed for b in on.events[f].postset}
    cmap, emap = {}, {}
    out = OccurrenceNet(on.net, on.layers, on.event_budget, truncated=on.truncated)
    for b in on.conditions:
        if b.id in dead_conds:
            continue
        cmap[b.id] = len(out.conditions)
        out.conditions.append(
            Condition(cmap[b.id], b.place, b.origin, b.copy, b.layer, b.zero, b.key)
        )
    for ev in on.events:
        if ev.id in doomed:
            continue
        emap[ev.id] = len(out.events)
        out.events.append(
            Event(emap[ev.id], tuple(cmap[b] for b in ev.preset), ev.transition, ev.layer, ev.key,
                  tuple(cmap[b] for b in ev.postset))
        )
    for b in out.conditions:
        if b.origin is not None:
            b.origin = emap[b.origin]
    out.initial = tuple(cmap[b] for b in on.initial)
    out.event_index = {(frozenset(ev.preset), ev.transition): ev.id for ev in out.events}
    out.finalize()
    return out
