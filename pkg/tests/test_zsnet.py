from __future__ import annotations

import pytest

from zsm.compile import HeatT, PlaceId, RuleT, compile_system
from zsm.errors import NotEnabled, ShapeViolation
from zsm.multiset import Multiset
from zsm.zsnet import (
    check_stable_step,
    check_stable_transaction,
    enabled,
    enumerate_stable_transactions,
    fire,
    is_stable,
    membrane_shape,
    net_from_arcs,
    state_marking,
    stably_enabled,
)

a, az = PlaceId("a", 1, "nz"), PlaceId("a", 1, "z")
b, bz = PlaceId("b", 1, "nz"), PlaceId("b", 1, "z")
c, cz = PlaceId("c", 1, "nz"), PlaceId("c", 1, "z")
r1, r2, r3 = RuleT("r1", 1), RuleT("r2", 1), RuleT("r3", 1)
ha, hb, hc = HeatT("a", 1), HeatT("b", 1), HeatT("c", 1)


@pytest.fixture(scope="module")
def net(pi1):
    return compile_system(pi1)


def M(d):
    return Multiset(d)


def test_enabling_and_firing(net):
    m0 = net.m0
    assert enabled(net, m0, M({r1: 1, r2: 1}))
    assert not enabled(net, m0, M({r2: 1, r3: 1}))
    m1 = fire(net, m0, M({r1: 1, r2: 1}))
    assert m1 == M({bz: 1, cz: 1})
    assert not is_stable(net, m1)
    assert fire(net, m1, M({hb: 1, hc: 1})) == M({b: 1, c: 1})
    with pytest.raises(NotEnabled):
        fire(net, m0, M({r2: 2}))


def test_stable_enabling_ignores_zero_tokens(net):
    assert stably_enabled(net, net.m0, M({r1: 1, r3: 1}))
    assert not stably_enabled(net, net.m0, M({r1: 2}))


def test_stable_step_and_transaction(net):
    seq = [M({r1: 1, r3: 1}), M({ha: 1, hb: 1})]
    assert check_stable_step(net, net.m0, seq)
    assert check_stable_transaction(net, net.m0, seq)
    # not maximal: the b token could still feed r2 or r3
    lazy = [M({r1: 1}), M({hb: 1})]
    assert check_stable_step(net, net.m0, lazy)
    assert not check_stable_transaction(net, net.m0, lazy)
    # ends with a zero token
    assert not check_stable_transaction(net, net.m0, [M({r1: 1, r3: 1})])


def test_enumerated_transactions(net):
    ts = enumerate_stable_transactions(net, net.m0)
    got = {(t.rules, t.target) for t in ts}
    assert got == {
        (M({r1: 1, r3: 1}), M({a: 1, b: 1})),
        (M({r1: 1, r2: 1}), M({b: 1, c: 1})),
    }
    for t in ts:
        assert check_stable_transaction(net, net.m0, t.serialization())


def test_membrane_shape(net):
    shape = membrane_shape(net)
    assert set(shape.producers) == {r1, r2, r3}
    assert shape.heaters == {az: ha, bz: hb, cz: hc}


def test_shape_violations():
    bad = net_from_arcs(["p", "z"], ["t", "h"], {("p", "t"): 1, ("t", "p"): 1, ("z", "h"): 1, ("h", "p"): 1},
                        {"p": 1}, ["z"])
    with pytest.raises(ShapeViolation):
        membrane_shape(bad)
    orphan = net_from_arcs(["p", "z"], ["t"], {("p", "t"): 1, ("t", "z"): 1}, {"p": 1}, ["z"])
    with pytest.raises(ShapeViolation):
        membrane_shape(orphan)


def test_state_marking(net):
    assert state_marking(net, M({})) == net.m0
    assert state_marking(net, M({r1: 1, r3: 1, ha: 1, hb: 1})) == M({a: 1, b: 1})
    # heating a token nobody produced is not a state
    assert state_marking(net, M({hc: 1})) is None
