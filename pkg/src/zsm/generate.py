"""Seeded random membrane systems for property tests and the correspondence suite."""

from __future__ import annotations

import random

from .multiset import Multiset
from .psystem import HERE, IN, OUT, MembraneSystem, Rule, build_system

OBJECTS = "abcd"


def random_system(
    seed: int | random.Random,
    max_membranes: int = 3,
    max_objects: int = 4,
    max_rules: int = 5,
    max_init: int = 4,
    growth: int = 0,
) -> MembraneSystem:
    """A small valid system where some rule applies at the start.

    Rules have nonempty sides and ``|rhs| <= |lhs| + growth``.  With the default ``growth=0`` the object count never increases, so every state space
    stays finite and small.  Rules in the skin never send objects out.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    for _ in range(1000):
        sys = _draw(rng, max_membranes, max_objects, max_rules, max_init, growth)
        if any(r.lhs <= sys.init[r.membrane - 1] for r in sys.all_rules()):
            return sys
    return sys


def _draw(rng, max_membranes, max_objects, max_rules, max_init, growth) -> MembraneSystem:
    n = rng.randint(1, max_membranes)
    alphabet = tuple(OBJECTS[: rng.randint(1, max_objects)])
    parents = [None] + [rng.randint(1, j - 1) for j in range(2, n + 1)]
    children = {i: [j for j in range(2, n + 1) if parents[j - 1] == i] for i in range(1, n + 1)}

    total = rng.randint(1, max_init)
    init = [dict() for _ in range(n)]
    for _ in range(total):
        a = rng.choice(alphabet)
        i = rng.randrange(n)
        init[i][a] = init[i].get(a, 0) + 1

    rules: list[list[Rule]] = [[] for _ in range(n)]
    for k in range(1, rng.randint(1, max_rules) + 1):
        i = rng.randint(1, n)
        lhs = Multiset(rng.choice(alphabet) for _ in range(rng.randint(1, 2)))
        targets = [HERE] + ([OUT] if i != 1 else []) + [IN(j) for j in children[i]]
        rhs: dict = {}
        for _ in range(rng.randint(1, lhs.size + growth)):
            key = (rng.choice(alphabet), rng.choice(targets))
            rhs[key] = rhs.get(key, 0) + 1
        rules[i - 1].append(Rule(f"r{k}", i, lhs, Multiset(rhs)))
    return build_system(alphabet, parents, [Multiset(w) for w in init], rules)
