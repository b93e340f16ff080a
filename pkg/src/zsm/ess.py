"""Prime event structures, event structures with simultaneity, and their extraction
from the unfolding of a membrane-compiled net."""

from __future__ import annotations

import enum
import heapq
import itertools
from collections import deque
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field

from .compile import RuleT
from .errors import BudgetExceeded
from .multiset import Multiset
from .semantics import VectorMultiRule, computations, macro_steps
from .unfold import FoldingMorphism, OccurrenceNet
from .zsnet import check_stable_transaction, enumerate_stable_transactions, membrane_shape


@dataclass(frozen=True)
class PES:
    """``below[e]`` holds every event ``<= e`` (including ``e``); ``conflicts[e]`` every event in conflict with ``e``."""

    events: tuple
    below: Mapping[Hashable, frozenset]
    conflicts: Mapping[Hashable, frozenset]

    def leq(self, e, f) -> bool:
        return e in self.below[f]

    def conflict(self, e, f) -> bool:
        return f in self.conflicts[e]

    def concurrent(self, e, f) -> bool:
        return e != f and not self.conflict(e, f) and not self.leq(e, f) and not self.leq(f, e)

    def is_conflict_free(self, X: Iterable) -> bool:
        X = set(X)
        return all(self.conflicts[e].isdisjoint(X) for e in X)

    def is_closed(self, X: Iterable) -> bool:
        X = set(X)
        return all(self.below[e] <= X for e in X)

    def is_configuration(self, X: Iterable) -> bool:
        X = set(X)
        return X <= set(self.events) and self.is_closed(X) and self.is_conflict_free(X)

    def restrict(self, keep: Iterable) -> PES:
        keep = frozenset(keep)
        events = tuple(e for e in self.events if e in keep)
        return PES(
            events,
            {e: self.below[e] & keep for e in events},
            {e: self.conflicts[e] & keep for e in events},
        )

    def configurations(self, size_bound: int = 100_000) -> set[frozenset]:
        """All configurations, grown one enabled event at a time."""
        seen = {frozenset()}
        queue = deque(seen)
        while queue:
            X = queue.popleft()
            for e in self.events:
                if e in X or not self.below[e] - {e} <= X or not self.conflicts[e].isdisjoint(X):
                    continue
                Y = X | {e}
                if Y not in seen:
                    if len(seen) >= size_bound:
                        raise BudgetExceeded(f"more than {size_bound} configurations", partial=seen)
                    seen.add(Y)
                    queue.append(Y)
        return seen

    def immediate_conflicts(self) -> set[tuple]:
        """Conflict pairs not inherited from a conflict between strict predecessors."""
        out = set()
        for e in self.events:
            for f in self.conflicts[e]:
                if repr(e) >= repr(f) and e != f:
                    continue
                inherited = any(
                    self.conflict(e2, f2)
                    for e2 in self.below[e]
                    for f2 in self.below[f]
                    if (e2, f2) != (e, f)
                )
                if not inherited:
                    out.add((e, f))
        return out

    def covering_pairs(self) -> set[tuple]:
        """Transitive reduction of the strict order."""
        out = set()
        for f in self.events:
            strict = self.below[f] - {f}
            for e in strict:
                if not any(e in self.below[g] and g != e for g in strict):
                    out.add((e, f))
        return out


def pes_violations(pes: PES) -> list[str]:
    out = []
    E = set(pes.events)
    above: dict = {}
    for g in pes.events:
        for f in pes.below[g]:
            above.setdefault(f, set()).add(g)
    for e in pes.events:
        if e not in pes.below[e]:
            out.append(f"order not reflexive at {e}")
        if e in pes.conflicts[e]:
            out.append(f"conflict not irreflexive at {e}")
        for f in pes.below[e]:
            if f not in E:
                out.append(f"{f} below {e} is not an event")
            elif f != e and e in pes.below[f]:
                out.append(f"order not antisymmetric on {e}, {f}")
            elif not pes.below[f] <= pes.below[e]:
                out.append(f"order not transitive through {f} <= {e}")
        for f in pes.conflicts[e]:
            if e not in pes.conflicts[f]:
                out.append(f"conflict not symmetric on {e}, {f}")
            for g in sorted(above.get(f, set()) - pes.conflicts[e], key=repr):
                out.append(f"heredity: {e} # {f} <= {g} but not {e} # {g}")
    return out


@dataclass(frozen=True)
class ESS:
    pes: PES
    sim: tuple[frozenset, ...]
    labels: Mapping[Hashable, Hashable]
    layer: Mapping[Hashable, int] = field(default_factory=dict)
    provenance: Mapping[frozenset, tuple] = field(default_factory=dict)
    membranes: int = 0
    truncated: bool = False

    @property
    def events(self) -> tuple:
        return self.pes.events

    def classes_of(self, e) -> list[frozenset]:
        return [s for s in self.sim if e in s]


def ess_violations(ess: ESS) -> list[str]:
    """The structural conditions an ESS must meet, each violation with a witness."""
    pes = ess.pes
    out = pes_violations(pes)
    E = set(pes.events)
    if frozenset() in ess.sim:
        out.append("empty set in Sim")
    covered = set().union(*ess.sim) if ess.sim else set()
    if covered != E:
        missing = sorted(E - covered, key=repr)
        extra = sorted(covered - E, key=repr)
        out.append(f"union of Sim differs from events: uncovered {missing}, unknown {extra}")
    for s in ess.sim:
        for e, f in itertools.combinations(sorted(s, key=repr), 2):
            if e in E and f in E and not pes.concurrent(e, f):
                out.append(f"class {sorted(s, key=repr)}: {e} and {f} are not concurrent")
    for s, t in itertools.combinations(ess.sim, 2):
        if not s & t:
            continue
        if s <= t or t <= s:
            out.append(f"overlapping classes {sorted(s, key=repr)} and {sorted(t, key=repr)}: one contains the other")
        for e in s - t:
            for f in t - s:
                if e in E and f in E and not pes.conflict(e, f):
                    out.append(
                        f"overlapping classes {sorted(s, key=repr)} and {sorted(t, key=repr)}: "
                        f"{e} and {f} not in conflict"
                    )
    for e in pes.events:
        if e not in ess.labels:
            out.append(f"event {e} has no label")
    return out


def ess_to_pes(ess: ESS) -> PES:
    return ess.pes


def pes_to_ess(pes: PES) -> ESS:
    return ESS(pes, tuple(frozenset({e}) for e in pes.events), {e: e for e in pes.events})


def _exact_covers(ess: ESS, X: frozenset, limit: int | None = None):
    """Families of pairwise-disjoint Sim classes whose union is exactly ``X``."""
    inside = [s for s in ess.sim if s <= X]
    by_event: dict = {}
    for s in inside:
        for e in s:
            by_event.setdefault(e, []).append(s)
    order = sorted(X, key=lambda e: (len(by_event.get(e, ())), repr(e)))
    found = 0

    def rec(left: frozenset, chosen: list):
        nonlocal found
        if not left:
            found += 1
            yield list(chosen)
            return
        e = next(x for x in order if x in left)
        for s in by_event.get(e, ()):
            if s <= left:
                chosen.append(s)
                yield from rec(left - s, chosen)
                chosen.pop()
                if limit is not None and found >= limit:
                    return

    yield from rec(X, [])


def is_ess_configuration(ess: ESS, X: Iterable) -> bool:
    X = frozenset(X)
    if not ess.pes.is_configuration(X):
        return False
    return next(_exact_covers(ess, X, limit=1), None) is not None


def ess_configurations(ess: ESS, size_bound: int = 100_000) -> set[frozenset]:
    """Every conflict-free, downward-closed union of pairwise-disjoint Sim classes.

    ``size_bound`` caps the number of configurations returned.
    """
    pes = ess.pes
    classes = sorted(set(ess.sim), key=lambda s: sorted(map(repr, s)))
    last_class: dict = {}
    for k, s in enumerate(classes):
        for e in s:
            last_class[e] = k
    result: set[frozenset] = set()

    def hopeless(U: frozenset, k: int) -> bool:
        for e in U:
            for p in pes.below[e]:
                if p not in U and last_class.get(p, -1) < k:
                    return True
        return False

    def rec(k: int, U: frozenset):
        if hopeless(U, k):
            return
        if k == len(classes):
            if pes.is_closed(U) and U not in result:
                if len(result) >= size_bound:
                    raise BudgetExceeded(f"more than {size_bound} configurations", partial=result)
                result.add(U)
            return
        rec(k + 1, U)
        s = classes[k]
        if U.isdisjoint(s) and pes.is_conflict_free(U | s):
            rec(k + 1, U | s)

    rec(0, frozenset())
    return result


def _class_order(ess: ESS, parts: list[frozenset]) -> list[frozenset]:
    """Topological order: ``s`` before ``t`` when an event of ``s`` is below an event of ``t``."""
    pes = ess.pes
    key = [min(map(repr, s)) for s in parts]
    succ = {i: set() for i in range(len(parts))}
    indeg = [0] * len(parts)
    for i, j in itertools.permutations(range(len(parts)), 2):
        if any(pes.leq(e, f) for e in parts[i] for f in parts[j]):
            succ[i].add(j)
            indeg[j] += 1
    heap = [(key[i], i) for i in range(len(parts)) if indeg[i] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, i = heapq.heappop(heap)
        out.append(parts[i])
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (key[j], j))
    if len(out) != len(parts):
        raise ValueError("the classes of this configuration are causally cyclic")
    return out


def decompose(ess: ESS, X: Iterable) -> list[frozenset]:
    """Sim-partition of a configuration in causal order.

    The layer partition is used when each layer is itself a class; otherwise the exact
    cover with fewest classes (ties: canonical order).
    """
    X = frozenset(X)
    if not ess.pes.is_configuration(X):
        raise ValueError("not a configuration: not closed or not conflict-free")
    sim = set(ess.sim)
    if ess.layer:
        groups: dict = {}
        for e in X:
            groups.setdefault(ess.layer[e], set()).add(e)
        parts = [frozenset(g) for _, g in sorted(groups.items())]
        if all(p in sim for p in parts):
            return _class_order(ess, parts)
    covers = list(_exact_covers(ess, X))
    if not covers:
        raise ValueError("not a configuration: no partition into Sim classes")
    best = min(covers, key=lambda c: (len(c), sorted(sorted(map(repr, s)) for s in c)))
    return _class_order(ess, best)


def class_to_vmr(ess: ESS, s: Iterable) -> VectorMultiRule:
    per = [dict() for _ in range(ess.membranes)]
    for e in s:
        t = ess.labels[e]
        if not isinstance(t, RuleT):
            raise ValueError(f"event {e} is labelled {t}, not a rule transition")
        per[t.membrane - 1][t.rule] = per[t.membrane - 1].get(t.rule, 0) + 1
    return tuple(Multiset(d) for d in per)


def configuration_to_rules(ess: ESS, X: Iterable) -> list[VectorMultiRule]:
    return [class_to_vmr(ess, s) for s in decompose(ess, X)]


# ---------------------------------------------------------------------------
# slices and simultaneity in an unfolding


class SliceKind(enum.Enum):
    NOT_A_SLICE = "NotASlice"
    STABLE = "StableSlice"
    UNSTABLE = "UnstableSlice"
    MAXIMAL_UNSTABLE = "MaximalUnstable"
    MAXIMALLY_SIMULTANEOUS = "MaximallySimultaneous"

    def __str__(self) -> str:
        return self.value


def _is_rule_event(on: OccurrenceNet, e: int) -> bool:
    return any(on.conditions[b].zero for b in on.events[e].postset)


def _heats_of(on: OccurrenceNet, zs: Iterable[int]) -> list[int] | None:
    out = []
    for z in zs:
        users = on.consumers[z]
        if len(users) != 1:
            return None
        out.append(users[0])
    return out


def _fire_set(on: OccurrenceNet, S: frozenset, events: Iterable[int]) -> frozenset:
    S = set(S)
    for e in events:
        S.difference_update(on.events[e].preset)
        S.update(on.events[e].postset)
    return frozenset(S)


def _stable_successors_brute(on: OccurrenceNet, S: frozenset):
    """Stable transactions from slice ``S``, found by trying every set of enabled rule events."""
    net = on.net
    rules = [
        e
        for e in on.enabled_events(S)
        if not any(on.conditions[b].zero for b in on.events[e].preset)
    ]
    out = []

    def rec(k, chosen, used):
        if k == len(rules):
            if not chosen:
                return
            zs = [b for e in chosen for b in on.events[e].postset if on.conditions[b].zero]
            heats = _heats_of(on, zs)
            if heats is None:
                return
            steps = [Multiset([on.events[e].transition for e in chosen])]
            if heats:
                steps.append(Multiset([on.events[h].transition for h in heats]))
            if check_stable_transaction(net, on.fold(S), steps):
                out.append((frozenset(chosen), _fire_set(on, S, chosen + heats)))
            return
        rec(k + 1, chosen, used)
        pre = set(on.events[rules[k]].preset)
        if used.isdisjoint(pre):
            rec(k + 1, chosen + [rules[k]], used | pre)

    rec(0, [], frozenset())
    return out


def transaction_reachable_slices(on: OccurrenceNet) -> set[frozenset]:
    """Stable slices reached from the initial one by stable transactions only (brute force)."""
    cache = on._cache.get("tr-slices")
    if cache is not None:
        return cache
    start = frozenset(on.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        S = queue.popleft()
        for _, S2 in _stable_successors_brute(on, S):
            if S2 not in seen:
                seen.add(S2)
                queue.append(S2)
    on._cache["tr-slices"] = seen
    return seen


def classify_slice(on: OccurrenceNet, A: Iterable[int]) -> SliceKind:
    A = frozenset(A)
    if not on.co_set(A) or on.find_state(A) is None:
        return SliceKind.NOT_A_SLICE
    zs = sorted(b for b in A if on.conditions[b].zero)
    if not zs:
        return SliceKind.STABLE
    producers = sorted({on.conditions[z].origin for z in zs})
    heats = _heats_of(on, zs)
    if heats is None or any(not _is_rule_event(on, e) for e in producers):
        return SliceKind.UNSTABLE
    feed = {b for e in producers for b in on.events[e].preset}
    A1 = (A - set(zs)) | feed
    steps = [Multiset([on.events[e].transition for e in producers])]
    steps.append(Multiset([on.events[h].transition for h in heats]))
    if any(on.conditions[b].zero for b in A1) or not check_stable_transaction(
        on.net, on.fold(A1), steps
    ):
        return SliceKind.UNSTABLE
    if A1 in transaction_reachable_slices(on):
        return SliceKind.MAXIMALLY_SIMULTANEOUS
    return SliceKind.MAXIMAL_UNSTABLE


@dataclass
class Replay:
    """Forward replay of stable transactions over individual tokens.

    ``steps[S]`` lists ``(class, unstable slice, next stable slice)`` from stable slice ``S``;
    ``round[S]`` is the number of transactions needed to reach ``S``.
    """

    on: OccurrenceNet
    start: frozenset
    steps: dict = field(default_factory=dict)
    round: dict = field(default_factory=dict)
    truncated: bool = False

    def classes(self) -> tuple[frozenset, ...]:
        found = {c for succ in self.steps.values() for c, _, _ in succ}
        return tuple(sorted(found, key=lambda s: (min(s), sorted(s))))

    def provenance(self) -> dict[frozenset, tuple[frozenset, ...]]:
        prov: dict = {}
        for S, succ in self.steps.items():
            for c, _, _ in succ:
                prov.setdefault(c, set()).add(S)
        return {c: tuple(sorted(v, key=sorted)) for c, v in prov.items()}

    def runs(self, depth: int):
        """Every sequence of at most ``depth`` classes from the start, with its final slice."""

        def rec(S, path):
            yield list(path), S
            if len(path) == depth:
                return
            for c, _, S2 in self.steps.get(S, ()):
                path.append(c)
                yield from rec(S2, path)
                path.pop()

        yield from rec(self.start, [])


def _assignments(on: OccurrenceNet, S: frozenset, U: Multiset, order: list):
    """Ways to give each transition instance of ``U`` its own preset of conditions from ``S``."""
    net = on.net
    by_place: dict = {}
    for b in sorted(S):
        by_place.setdefault(on.conditions[b].place, []).append(b)
    instances = [t for t in order for _ in range(U[t])]

    def presets(t, free):
        pre = net.pre_of(t)
        slots = [
            itertools.combinations([b for b in by_place.get(s, ()) if b in free], pre[s])
            for s in pre.ordered(net.places)
        ]
        for parts in itertools.product(*slots):
            yield tuple(sorted(b for p in parts for b in p))

    def rec(k, free, chosen, prev):
        if k == len(instances):
            yield list(chosen)
            return
        t = instances[k]
        for p in presets(t, free):
            if k and instances[k - 1] == t and p <= prev:
                continue
            chosen.append((t, p))
            yield from rec(k + 1, free - set(p), chosen, p)
            chosen.pop()

    yield from rec(0, set(S), [], ())


def replay(on: OccurrenceNet, budget: int | None = None) -> Replay:
    """Replay every stable transaction, with every token assignment, from every reached slice.

    ``budget`` caps the number of (slice, class) steps; exceeding it raises
    :class:`BudgetExceeded` carrying the partial replay.
    """
    cached = on._cache.get("replay")
    if cached is not None:
        return cached
    count = 0
    net = on.net
    membrane_shape(net)
    order = list(net.transitions)
    rp = Replay(on, frozenset(on.initial))
    rp.round[rp.start] = 0
    rp.truncated = on.truncated
    queue = deque([rp.start])
    while queue:
        S = queue.popleft()
        k = rp.round[S]
        if on.layers is not None and k >= on.layers:
            continue
        succ = []
        for tx in enumerate_stable_transactions(net, on.fold(S)):
            for assignment in _assignments(on, S, tx.rules, order):
                events = [on.event(p, t) for t, p in assignment]
                if any(e is None for e in events):
                    rp.truncated = True
                    continue
                ids = [e.id for e in events]
                zs = [b for e in events for b in e.postset if on.conditions[b].zero]
                heats = _heats_of(on, zs)
                if heats is None:
                    rp.truncated = True
                    continue
                mid = _fire_set(on, S, ids)
                S2 = _fire_set(on, mid, heats)
                succ.append((frozenset(ids), mid, S2))
                count += 1
                if budget is not None and count > budget:
                    rp.steps[S] = succ
                    rp.truncated = True
                    raise BudgetExceeded(f"replay exceeded {budget} transaction steps", partial=rp)
                if S2 not in rp.round:
                    rp.round[S2] = k + 1
                    queue.append(S2)
        rp.steps[S] = succ
    on._cache["replay"] = rp
    return rp


def sim_classes(
    on: OccurrenceNet, fm: FoldingMorphism | None = None, budget: int | None = None
) -> tuple[frozenset, ...]:
    """Event sets of the maximally simultaneous slices, by forward replay."""
    return replay(on, budget).classes()


def sim_classes_by_slices(on: OccurrenceNet, max_size: int | None = None) -> set[frozenset]:
    """Checking oracle: classify every co-set holding a zero condition and collect the
    producers of its zero conditions for the maximally simultaneous ones.  Small nets only."""
    n = len(on.conditions)
    co = [
        {y for y in range(n) if y != x and on.concurrent(("b", x), ("b", y))} for x in range(n)
    ]
    found = set()

    def rec(start, chosen, cands):
        if chosen and any(on.conditions[b].zero for b in chosen):
            A = frozenset(chosen)
            if classify_slice(on, A) is SliceKind.MAXIMALLY_SIMULTANEOUS:
                found.add(frozenset(on.conditions[b].origin for b in A if on.conditions[b].zero))
        if max_size is not None and len(chosen) >= max_size:
            return
        for y in sorted(cands):
            if y >= start:
                rec(y + 1, chosen + [y], cands & co[y])

    rec(0, [], set(range(n)))
    return found


def pes_of(on: OccurrenceNet, keep: Iterable[int] | None = None) -> PES:
    """Events of ``on`` with causality and conflict; ``keep`` restricts to a subset."""
    events = tuple(e.id for e in on.events) if keep is None else tuple(sorted(set(keep)))
    mask = sum(1 << e for e in events)
    masks = on.conflict_masks()
    below = {e: frozenset(on.past_events(e)) for e in events}
    conflicts = {e: frozenset(_bit_list(masks[e] & mask)) for e in events}
    if keep is not None:
        below = {e: b & frozenset(events) for e, b in below.items()}
    return PES(events, below, conflicts)


def _bit_list(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def ess_of(on: OccurrenceNet, fm: FoldingMorphism | None = None, budget: int | None = None) -> ESS:
    """Events producing into zero conditions, with the replayed Sim classes and transition labels."""
    rp = replay(on, budget)
    keep = [e.id for e in on.events if _is_rule_event(on, e.id)]
    pes = pes_of(on, keep)
    membranes = max((p.membrane for p in on.net.places), default=0)
    return ESS(
        pes,
        rp.classes(),
        {e: on.events[e].transition for e in keep},
        {e: on.events[e].layer for e in keep},
        rp.provenance(),
        membranes,
        rp.truncated,
    )


# ---------------------------------------------------------------------------
# correspondence between computations and configurations


@dataclass
class RoundTrip:
    computations: int
    configurations: int
    forward_failures: list[str] = field(default_factory=list)
    converse_failures: list[str] = field(default_factory=list)
    count_failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.forward_failures or self.converse_failures or self.count_failures)


def _fmt_vmrs(seq) -> str:
    return " ; ".join("(" + ", ".join(R.format() for R in vmr) + ")" for vmr in seq)


def round_trip(sys, on: OccurrenceNet, ess: ESS, depth: int, size_bound: int = 100_000) -> RoundTrip:
    """Compare bounded computations of ``sys`` with the configurations of ``ess``.

    forward: each computation has token runs, and each induced event set is a configuration
    that decomposes back into the computation's vector multi-rules.
    converse: each configuration is induced by some computation (exact), and reaches a
    configuration reachable with the same total rule counts (counts).
    """
    from .compile import configuration_of

    rp = replay(on)
    by_seq: dict = {}
    induced = set()
    for path, S in rp.runs(depth):
        seq = tuple(class_to_vmr(ess, c) for c in path)
        X = frozenset().union(*path) if path else frozenset()
        by_seq.setdefault(seq, []).append(X)
        induced.add(X)
    comps = list(computations(sys, depth))
    out = RoundTrip(len(comps), 0)
    for comp in comps:
        seq = tuple(R for R, _ in comp)
        runs = by_seq.get(seq)
        if not runs:
            out.forward_failures.append(f"computation [{_fmt_vmrs(seq)}] has no token run")
            continue
        for X in runs:
            if not is_ess_configuration(ess, X):
                out.forward_failures.append(f"[{_fmt_vmrs(seq)}]: {sorted(X)} is not a configuration")
            elif tuple(configuration_to_rules(ess, X)) != seq:
                got = configuration_to_rules(ess, X)
                out.forward_failures.append(
                    f"[{_fmt_vmrs(seq)}]: {sorted(X)} decomposes to [{_fmt_vmrs(got)}]"
                )
    reach = _reachable_with_counts(sys, depth)
    configs = ess_configurations(ess, size_bound)
    out.configurations = len(configs)
    for X in sorted(configs, key=lambda X: (len(X), sorted(X))):
        if X not in induced:
            try:
                got = _fmt_vmrs(configuration_to_rules(ess, X))
            except ValueError as exc:
                got = str(exc)
            out.converse_failures.append(f"{sorted(X)} [{got}] is induced by no computation")
        C = _final_configuration(sys, on, X, configuration_of)
        counts = _rule_counts(ess, X)
        if C is None or (C, counts) not in reach:
            out.count_failures.append(f"{sorted(X)} reaches no configuration with its rule counts")
    return out


def _rule_counts(ess: ESS, X) -> Multiset:
    return Multiset([(ess.labels[e].rule, ess.labels[e].membrane) for e in X])


def _final_configuration(sys, on: OccurrenceNet, X, configuration_of):
    full = {f for e in X for f in on.past_events(e)}
    M = on.state_marking(full)
    if M is None:
        return None
    zs = [b for b in M if on.conditions[b].zero]
    heats = _heats_of(on, zs)
    if heats is None:
        return None
    return configuration_of(sys, on.fold(_fire_set(on, M, heats)))


def _reachable_with_counts(sys, depth: int) -> set:
    from .semantics import heated, initial

    start = (heated(initial(sys)), Multiset())
    seen = {start}
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for C, counts in frontier:
            for R, C2 in macro_steps(sys, C):
                c2 = counts + Multiset(
                    {(name, i): k for i, Ri in enumerate(R, start=1) for name, k in Ri.items()}
                )
                if (C2, c2) not in seen:
                    seen.add((C2, c2))
                    nxt.append((C2, c2))
        frontier = nxt
    return seen
