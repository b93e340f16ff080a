from __future__ import annotations

import pytest

from zsm.compile import (
    HeatT,
    PlaceId,
    RuleT,
    check_correspondence,
    compile_system,
    configuration_of,
    drop_transition,
    heat_step,
    nu,
    nu_config,
    produced_partial,
    reweight,
    rule_step,
    vmr_of_step,
    zero_partition,
)
from zsm.multiset import Multiset
from zsm.semantics import configuration, heated, initial, macro_steps
from zsm.zsnet import fire


def test_pi1_net_structure(pi1):
    net = compile_system(pi1)
    assert len(net.places) == 6 and len(net.transitions) == 6
    assert net.zero == {PlaceId(x, 1, "z") for x in "abc"}
    assert net.m0 == Multiset({PlaceId("a", 1, "nz"): 1, PlaceId("b", 1, "nz"): 1})
    t = RuleT("r1", 1)
    assert net.pre_of(t) == Multiset({PlaceId("a", 1, "nz"): 1})
    assert net.post_of(t) == Multiset({PlaceId("b", 1, "z"): 1})
    h = HeatT("c", 1)
    assert net.pre_of(h) == Multiset({PlaceId("c", 1, "z"): 1})
    assert net.post_of(h) == Multiset({PlaceId("c", 1, "nz"): 1})
    assert str(t) == "t_1^r1" and str(PlaceId("a", 1, "z")) == "(a,1,z)"


def test_communication_targets(intro1):
    net = compile_system(intro1)
    post = net.post_of(RuleT("r2", 2))
    assert post == Multiset({PlaceId("b", 1, "z"): 1})


def test_nu_and_inverse(pi1, intro1):
    g = ((Multiset("a"), Multiset("bc")),)
    assert nu(pi1, g) == Multiset(
        {PlaceId("a", 1, "nz"): 1, PlaceId("b", 1, "z"): 1, PlaceId("c", 1, "z"): 1}
    )
    C = configuration("bbc", "c")
    assert configuration_of(intro1, nu_config(intro1, C)) == C
    with pytest.raises(ValueError):
        configuration_of(pi1, nu(pi1, g))


def test_steps_track_rules(intro1):
    C = heated(initial(intro1))
    net = compile_system(intro1)
    for R, C2 in macro_steps(intro1, C):
        U = rule_step(intro1, R)
        assert vmr_of_step(intro1, U) == R
        gamma = produced_partial(intro1, C, R)
        m = fire(net, nu_config(intro1, C), U)
        assert m == nu(intro1, gamma)
        assert fire(net, m, heat_step(intro1, gamma)) == nu_config(intro1, C2)


def test_zero_partition(pi1):
    into, outof = zero_partition(compile_system(pi1))
    assert into == {RuleT(r, 1) for r in ("r1", "r2", "r3")}
    assert outof == {HeatT(x, 1) for x in "abc"}


@pytest.mark.parametrize("name", ["pi1", "intro1", "intro2"])
def test_fixture_correspondence(name):
    from zsm import fixtures

    rep = check_correspondence(fixtures.load(name), 4)
    assert rep.passed, rep.to_text()
    assert rep.summary() == "5/5 propositions verified"


def test_dropped_heater_is_detected(pi1):
    net = drop_transition(compile_system(pi1), HeatT("b", 1))
    rep = check_correspondence(pi1, 2, net=net)
    assert not rep.passed
    assert not rep.result("heating").passed
    assert "no consumer" in rep.result("converse").witness


def test_reweighted_arc_is_detected(pi1):
    net = reweight(compile_system(pi1), RuleT("r1", 1), PlaceId("b", 1, "z"), 2)
    rep = check_correspondence(pi1, 2, net=net)
    assert not rep.passed
    assert not rep.result("effects").passed
