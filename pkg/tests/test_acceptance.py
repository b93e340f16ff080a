"""One test per acceptance criterion; each prints a PASS/FAIL line."""

from __future__ import annotations

import time

import pytest

from conftest import extract, extract_within
from zsm import fixtures
from zsm.compile import (
    HeatT,
    PlaceId,
    RuleT,
    check_correspondence,
    compile_system,
    drop_transition,
    nu_config,
    reweight,
)
from zsm.ess import (
    SliceKind,
    classify_slice,
    ess_configurations,
    ess_to_pes,
    ess_violations,
    pes_to_ess,
    round_trip,
)
from zsm.generate import random_system
from zsm.multiset import Multiset
from zsm.semantics import (
    configuration,
    heated,
    initial,
    macro_steps,
    micro_macro_steps,
    reachability_graph,
)
from zsm.unfold import morphism_violations, random_firing_violations, unfold
from zsm.zsnet import check_stable_transaction

FIXTURES = ("pi1", "intro1", "intro2")
RANDOM_SEEDS = range(50)


@pytest.fixture
def verdict(request):
    """Print the criterion's verdict whatever the outcome."""
    start = time.perf_counter()
    state = {"ok": False}
    yield state
    name = request.node.name
    took = time.perf_counter() - start
    print(f"\n{name}: {'PASS' if state['ok'] else 'FAIL'} ({took:.2f}s)")


def vmr(*parts):
    return tuple(Multiset(p) for p in parts)


def within(seconds, start):
    took = time.perf_counter() - start
    assert took < seconds, f"took {took:.1f}s, limit {seconds}s"


def test_criterion_1_pi1_reachability(verdict):
    start = time.perf_counter()
    pi1 = fixtures.load("pi1")
    g = reachability_graph(pi1, 3)
    assert g.words() == {("ab",), ("bc",), ("ac",), ("cc",)}
    assert {g.nodes[k] for k in g.halting} == {configuration("cc")}
    assert set(macro_steps(pi1, configuration("ab"))) == {
        (vmr({"r1": 1, "r3": 1}), configuration("ab")),
        (vmr({"r1": 1, "r2": 1}), configuration("bc")),
    }
    within(1, start)
    verdict["ok"] = True


def test_criterion_2_intro1_first_step(verdict):
    start = time.perf_counter()
    intro1 = fixtures.load("intro1")
    steps = macro_steps(intro1, heated(initial(intro1)))
    assert steps == [(vmr({}, {"r2": 2, "r3": 1}), configuration("bbc", "c"))]
    _, _, _, ess = extract(intro1, 1)
    assert len(ess.sim) == 1 and len(ess.sim[0]) == 3
    within(1, start)
    verdict["ok"] = True


def test_criterion_3_concurrency_without_simultaneity(verdict):
    start = time.perf_counter()
    _, _, _, ess = extract(fixtures.load("intro2"), 2)
    pes = ess.pes
    witnesses = [
        (e, f)
        for e in pes.events
        if ess.labels[e] == RuleT("r1", 1)
        for f in pes.events
        if ess.labels[f] == RuleT("r2", 2)
        and pes.concurrent(e, f)
        and not any(e in s and f in s for s in ess.sim)
    ]
    assert witnesses
    within(1, start)
    verdict["ok"] = True


def test_criterion_4_pi1_transaction(verdict):
    start = time.perf_counter()
    pi1 = fixtures.load("pi1")
    net = compile_system(pi1)
    m = nu_config(pi1, configuration("ab"))
    rules = Multiset({RuleT("r1", 1): 1, RuleT("r3", 1): 1})
    heats = Multiset({HeatT("a", 1): 1, HeatT("b", 1): 1})
    assert check_stable_transaction(net, m, [rules, heats])
    assert not check_stable_transaction(net, m, [Multiset({RuleT("r1", 1): 1})])
    within(1, start)
    verdict["ok"] = True


def test_criterion_5_correspondence_suite(verdict):
    start = time.perf_counter()
    systems = [(n, fixtures.load(n)) for n in FIXTURES]
    systems += [(f"seed {k}", random_system(k)) for k in RANDOM_SEEDS]
    failures = []
    for name, sys in systems:
        rep = check_correspondence(sys, 4)
        if not rep.passed:
            failures.append(f"{name}: {rep.summary()}")
    assert failures == []

    # injected faults on the running example must be caught
    pi1 = fixtures.load("pi1")
    net = compile_system(pi1)
    mutants = [drop_transition(net, HeatT(a, 1)) for a in "abc"]
    mutants += [
        reweight(net, RuleT("r1", 1), PlaceId("b", 1, "z"), 2),
        reweight(net, RuleT("r3", 1), PlaceId("b", 1, "nz"), 2, side="pre"),
        reweight(net, HeatT("b", 1), PlaceId("b", 1, "nz"), 2),
    ]
    undetected = [k for k, mut in enumerate(mutants) if check_correspondence(pi1, 4, net=mut).passed]
    assert undetected == []
    within(60, start)
    verdict["ok"] = True


def test_criterion_6_unfolding_morphism(verdict):
    start = time.perf_counter()
    problems = []
    for name in FIXTURES:
        net = compile_system(fixtures.load(name))
        for k in (1, 2, 3):
            on, _ = unfold(net, k)
            problems += [f"{name}/{k}: {v}" for v in morphism_violations(on)]
            problems += [f"{name}/{k}: {v}" for v in random_firing_violations(on, runs=1000)]
    assert problems == []
    within(30, start)
    verdict["ok"] = True


def test_criterion_7_maximal_unstable_slice(verdict):
    start = time.perf_counter()
    on, _ = unfold(compile_system(fixtures.load("pi1")), 2)
    r2 = [e for e in on.events if e.transition == RuleT("r2", 1)]
    first = next(e for e in r2 if e.layer == 1)
    second = next(e for e in r2 if e.layer == 2)
    kind = classify_slice(on, first.postset + second.postset)
    assert kind is SliceKind.MAXIMAL_UNSTABLE
    assert kind is not SliceKind.MAXIMALLY_SIMULTANEOUS
    within(1, start)
    verdict["ok"] = True


def _axiom_problems(label, ess):
    out = [f"{label}: {v}" for v in ess_violations(ess)]
    if not ess_configurations(ess) <= ess.pes.configurations():
        out.append(f"{label}: a configuration is not a PES configuration")
    single = pes_to_ess(ess_to_pes(ess))
    if ess_to_pes(single) != ess.pes or ess_configurations(single) != ess.pes.configurations():
        out.append(f"{label}: singleton embedding does not round-trip")
    return out


def test_criterion_8_ess_axioms(verdict):
    start = time.perf_counter()
    problems = []
    for name in FIXTURES:
        for k in (1, 2, 3):
            _, _, _, ess = extract(fixtures.load(name), k)
            problems += _axiom_problems(f"{name}/{k}", ess)
    for seed in RANDOM_SEEDS:
        k, _, _, ess = extract_within(random_system(seed))
        problems += _axiom_problems(f"seed {seed}/{k}", ess)
    within(60, start)
    per_system: dict = {}
    for p in problems:
        label = p.split(":", 1)[0]
        per_system[label] = per_system.get(label, 0) + 1
    assert problems == [], f"violations per system {per_system}; first: {problems[:3]}"
    verdict["ok"] = True


def test_criterion_9_final_round_trip(verdict):
    start = time.perf_counter()
    problems = []
    for name in FIXTURES:
        sys = fixtures.load(name)
        for depth in (1, 2, 3):
            _, on, _, ess = extract(sys, depth)
            rt = round_trip(sys, on, ess, depth)
            for kind in ("forward_failures", "converse_failures", "count_failures"):
                problems += [f"{name}/{depth} {kind}: {w}" for w in getattr(rt, kind)]
    within(60, start)
    assert problems == [], f"{len(problems)} mismatches, first: {problems[:5]}"
    verdict["ok"] = True


def test_criterion_10_macro_step_oracle(verdict):
    start = time.perf_counter()
    systems = [fixtures.load(n) for n in FIXTURES]
    systems += [random_system(k, max_init=6) for k in range(200)]
    checked = 0
    mismatches = []
    for sys in systems:
        if sum(w.size for w in sys.init) > 6:
            continue
        g = reachability_graph(sys, 3)
        for C in g.nodes:
            checked += 1
            if set(macro_steps(sys, C)) != micro_macro_steps(sys, C):
                mismatches.append((sys, C))
    assert checked > 0 and mismatches == []
    within(30, start)
    verdict["ok"] = True
