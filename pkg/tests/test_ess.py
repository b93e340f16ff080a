from __future__ import annotations

import pytest

from conftest import extract
from zsm.compile import RuleT, compile_system
from zsm.errors import BudgetExceeded
from zsm.ess import (
    PES,
    SliceKind,
    classify_slice,
    configuration_to_rules,
    decompose,
    ess_configurations,
    ess_to_pes,
    ess_violations,
    is_ess_configuration,
    pes_of,
    pes_to_ess,
    pes_violations,
    replay,
    round_trip,
    sim_classes_by_slices,
)
from zsm.multiset import Multiset
from zsm.unfold import unfold


def vmr(*parts):
    return tuple(Multiset(p) for p in parts)


def test_intro1_single_class(intro1):
    _, on, _, ess = extract(intro1, 1)
    assert [sorted(s) for s in ess.sim] == [[0, 1, 2]]
    assert ess_violations(ess) == []
    assert configuration_to_rules(ess, {0, 1, 2}) == [vmr({}, {"r2": 2, "r3": 1})]


def test_intro2_concurrent_but_not_simultaneous(intro2):
    _, on, _, ess = extract(intro2, 2)
    pes = ess.pes
    r1 = [e for e in pes.events if ess.labels[e] == RuleT("r1", 1)]
    r2 = [e for e in pes.events if ess.labels[e] == RuleT("r2", 2)]
    pairs = [
        (e, f) for e in r1 for f in r2
        if pes.concurrent(e, f) and not any(e in s and f in s for s in ess.sim)
    ]
    assert pairs
    assert ess_violations(ess) == []


def test_pi1_layer_one(pi1):
    _, on, _, ess = extract(pi1, 1)
    assert {frozenset(s) for s in ess.sim} == {frozenset({0, 1}), frozenset({0, 2})}
    assert ess_configurations(ess) == {frozenset(), frozenset({0, 1}), frozenset({0, 2})}
    assert configuration_to_rules(ess, {0, 2}) == [vmr({"r1": 1, "r3": 1})]
    assert not is_ess_configuration(ess, {0})
    assert not is_ess_configuration(ess, {0, 1, 2})
    with pytest.raises(ValueError):
        decompose(ess, {1, 2})


def test_configurations_are_pes_configurations(intro1, intro2, pi1):
    for sys in (intro1, intro2, pi1):
        _, _, _, ess = extract(sys, 2)
        assert ess_configurations(ess) <= ess.pes.configurations()


def test_configuration_cap(pi1):
    _, _, _, ess = extract(pi1, 2)
    with pytest.raises(BudgetExceeded):
        ess_configurations(ess, size_bound=2)


def test_two_stable_b_tokens_slice(pi1):
    on, _ = unfold(compile_system(pi1), 2)
    # c produced by r2 on the initial b, and c produced by r2 on the b made by r1
    first = next(e for e in on.events if e.transition == RuleT("r2", 1) and e.layer == 1)
    second = next(e for e in on.events if e.transition == RuleT("r2", 1) and e.layer == 2)
    A = first.postset + second.postset
    assert classify_slice(on, A) is SliceKind.MAXIMAL_UNSTABLE
    assert classify_slice(on, on.initial) is SliceKind.STABLE
    r3 = next(e for e in on.events if e.transition == RuleT("r3", 1) and e.layer == 1)
    r1 = on.events[0]
    assert classify_slice(on, r1.postset + r3.postset) is SliceKind.MAXIMALLY_SIMULTANEOUS
    assert classify_slice(on, r1.postset) is SliceKind.NOT_A_SLICE
    # r1 alone leaves the initial b idle, so this is no transaction
    assert classify_slice(on, r1.postset + (1,)) is SliceKind.UNSTABLE
    assert classify_slice(on, first.postset + r3.postset) is SliceKind.NOT_A_SLICE


@pytest.mark.parametrize("name", ["pi1", "intro1", "intro2"])
@pytest.mark.parametrize("layers", [1, 2])
def test_replay_matches_slice_oracle(name, layers):
    from zsm import fixtures

    on, _ = unfold(compile_system(fixtures.load(name)), layers)
    assert set(replay(on).classes()) == sim_classes_by_slices(on)


def test_pes_embedding_round_trips(pi1):
    _, on, _, ess = extract(pi1, 2)
    pes = ess_to_pes(ess)
    assert pes == pes_of(on, ess.pes.events)
    back = pes_to_ess(pes)
    assert ess_to_pes(back) == pes
    assert ess_violations(back) == []
    assert ess_configurations(back) == pes.configurations()


def test_pes_axioms_detect_broken_heredity():
    below = {0: frozenset({0}), 1: frozenset({1}), 2: frozenset({1, 2})}
    ok = PES((0, 1, 2), below, {0: frozenset({1, 2}), 1: frozenset({0}), 2: frozenset({0})})
    assert pes_violations(ok) == []
    bad = PES((0, 1, 2), below, {0: frozenset({1}), 1: frozenset({0}), 2: frozenset()})
    assert pes_violations(bad)


def test_intro_round_trips(intro1, intro2):
    for sys in (intro1, intro2):
        for k in (1, 2, 3):
            _, on, _, ess = extract(sys, k)
            rt = round_trip(sys, on, ess, k)
            assert rt.passed, rt
