from __future__ import annotations

import pytest

from zsm import fixtures
from zsm.compile import HeatT, PlaceId, RuleT, compile_system
from zsm.multiset import Multiset
from zsm.unfold import (
    FoldingMorphism,
    drop_event,
    morphism_violations,
    random_firing_violations,
    states_cover_markings,
    unfold,
)

NAMES = ["pi1", "intro1", "intro2"]


@pytest.fixture(scope="module")
def pi1_on(pi1):
    return unfold(compile_system(pi1), 2)


def test_pi1_sizes(pi1):
    net = compile_system(pi1)
    on1, _ = unfold(net, 1)
    assert (len(on1.conditions), len(on1.events)) == (8, 6)
    on2, _ = unfold(net, 2)
    assert (len(on2.conditions), len(on2.events)) == (14, 12)
    assert not on2.truncated


def test_pi1_structure(pi1_on):
    on, fm = pi1_on
    assert on.initial == (0, 1)
    assert [fm.beta(b) for b in on.initial] == [PlaceId("a", 1, "nz"), PlaceId("b", 1, "nz")]
    e0, e1, e2 = on.events[:3]
    assert (fm.eta(0), e0.preset) == (RuleT("r1", 1), (0,))
    # r2 and r3 compete for the single initial b
    assert e1.preset == e2.preset == (1,)
    assert {fm.eta(1), fm.eta(2)} == {RuleT("r2", 1), RuleT("r3", 1)}
    assert all(e.layer == 1 for e in on.events[:6])
    assert all(e.layer == 2 for e in on.events[6:])


def test_relations(pi1_on):
    on, _ = pi1_on
    assert on.conflict(("e", 1), ("e", 2))
    assert on.concurrent(("e", 0), ("e", 1))
    assert on.causally_before(("b", 1), ("e", 2))
    assert not on.causally_before(("e", 2), ("b", 1))
    # heat of r1's b precedes the layer-2 events consuming that b
    heat_b = next(e.id for e in on.events if e.transition == HeatT("b", 1))
    later = [e.id for e in on.events if heat_b in on.past_events(e.id) and e.id != heat_b]
    assert later and all(on.event_leq(0, f) for f in later)
    # conflict is inherited along causality: whatever follows r2 clashes with r3
    after_r2 = [f for f in range(len(on.events)) if f != 1 and on.event_leq(1, f)]
    assert after_r2 and all(on.event_conflict(2, f) for f in after_r2)
    with pytest.raises(KeyError):
        on.concurrent(("e", 99), ("e", 0))


def test_co_sets_and_slices(pi1_on):
    on, _ = pi1_on
    assert on.co_set(on.initial)
    assert on.is_slice(on.initial)
    z = on.events[0].postset
    assert on.co_set((1,) + z)
    assert on.is_slice((1,) + z)
    assert not on.co_set(on.events[1].postset + on.events[2].postset)


def test_state_markings(pi1_on):
    on, fm = pi1_on
    assert on.state_marking([]) == frozenset(on.initial)
    assert on.state_marking([1, 2]) is None
    m = on.state_marking([0, 2])
    assert fm.fold_marking(m) == Multiset({PlaceId("b", 1, "z"): 1, PlaceId("a", 1, "z"): 1})
    assert on.find_state(m) is not None


def test_firing_is_safe(pi1_on):
    on, _ = pi1_on
    M = frozenset(on.initial)
    assert on.enabled_events(M) == [0, 1, 2]
    M = on.fire(M, 0)
    with pytest.raises(ValueError):
        on.fire(M, 0)


def test_requires_a_bound(pi1):
    with pytest.raises(ValueError):
        unfold(compile_system(pi1))


def test_event_budget_truncates(pi1):
    on, _ = unfold(compile_system(pi1), 5, event_budget=4)
    assert on.truncated and len(on.events) == 4


def test_keys_are_canonical(pi1):
    net = compile_system(pi1)
    a, _ = unfold(net, 2)
    b, _ = unfold(net, 3)
    assert [e.key for e in a.events] == [e.key for e in b.events[: len(a.events)]]


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("layers", [1, 2, 3])
def test_morphism_and_token_game(name, layers):
    net = compile_system(fixtures.load(name))
    on, fm = unfold(net, layers)
    assert isinstance(fm, FoldingMorphism)
    assert morphism_violations(on) == []
    assert random_firing_violations(on, runs=200) == []


@pytest.mark.parametrize("name", NAMES)
def test_states_cover_reachable_markings(name):
    net = compile_system(fixtures.load(name))
    on, fm = unfold(net, 3)
    rep = states_cover_markings(net, on, fm, 4)
    assert rep.passed and rep.markings > 0


def test_missing_event_is_noticed(pi1):
    net = compile_system(pi1)
    on, _ = unfold(net, 2)
    broken = drop_event(on, 1)
    rep = states_cover_markings(net, broken, FoldingMorphism(broken), 2)
    assert not rep.passed
