"""Membrane systems: tree-shaped membrane structure, rules with targets, initial multisets."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .multiset import EMPTY, Multiset


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int | None = None
    col: int | None = None

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"{self.line}:{self.col}: {self.message}"


class PSystemError(Exception):
    """Raised when a system fails to parse or validate; carries every diagnostic found."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True, order=True)
class Target:
    kind: str  # "here" | "out" | "in"
    membrane: int = 0

    def __post_init__(self):
        if self.kind not in ("here", "out", "in"):
            raise ValueError(f"bad target kind {self.kind!r}")
        if (self.kind == "in") != (self.membrane > 0):
            raise ValueError("only 'in' targets carry a membrane index")

    def __str__(self) -> str:
        return f"in({self.membrane})" if self.kind == "in" else self.kind


HERE = Target("here")
OUT = Target("out")


def IN(j: int) -> Target:
    return Target("in", j)


@dataclass(frozen=True)
class Rule:
    """An evolution rule ``u -> v`` of membrane ``membrane``.

    ``lhs`` is a multiset of objects, ``rhs`` a multiset of ``(object, Target)`` pairs.
    """

    name: str
    membrane: int
    lhs: Multiset
    rhs: Multiset

    def projection(self, target: Target) -> Multiset:
        """Objects of the right-hand side sent to ``target``."""
        return Multiset({a: c for (a, t), c in self.rhs.items() if t == target})

    def targets(self) -> set[Target]:
        return {t for (_, t) in self.rhs}

    def label(self) -> str:
        return f"{self.name}@{self.membrane}"


@dataclass(frozen=True)
class MembraneSystem:
    alphabet: tuple[str, ...]
    parents: tuple[int | None, ...]  # parents[i-1] is the father of membrane i; None for the skin
    init: tuple[Multiset, ...]
    rules: tuple[tuple[Rule, ...], ...]
    allow_skin_out: bool = False
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {(r.membrane, r.name): r for rs in self.rules for r in rs}
        )

    @property
    def n(self) -> int:
        return len(self.parents)

    @property
    def membranes(self) -> range:
        return range(1, self.n + 1)

    def _check_index(self, i: int) -> None:
        if not (isinstance(i, int) and 1 <= i <= self.n):
            raise IndexError(f"membrane index {i} out of range 1..{self.n}")

    def father(self, i: int) -> int | None:
        self._check_index(i)
        return self.parents[i - 1]

    def children(self, i: int) -> frozenset[int]:
        self._check_index(i)
        return self._children[i]

    @cached_property
    def _children(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {i: set() for i in self.membranes}
        for j in self.membranes:
            p = self.parents[j - 1]
            if p is not None:
                out[p].add(j)
        return {i: frozenset(s) for i, s in out.items()}

    def rules_of(self, i: int) -> tuple[Rule, ...]:
        self._check_index(i)
        return self.rules[i - 1]

    def rule(self, name: str, i: int) -> Rule:
        try:
            return self._index[(i, name)]
        except KeyError:
            raise KeyError(f"no rule {name!r} in membrane {i}") from None

    def all_rules(self) -> list[Rule]:
        return [r for rs in self.rules for r in rs]

    def initial_configuration(self) -> tuple[Multiset, ...]:
        return self.init

    def with_options(self, *, allow_skin_out: bool) -> MembraneSystem:
        return build_system(
            self.alphabet, self.parents, self.init, self.rules, allow_skin_out=allow_skin_out
        )


def mem(sys: MembraneSystem, root: int = 1) -> int:
    """Number of membranes in the subtree rooted at ``root``."""
    return 1 + sum(mem(sys, j) for j in sys.children(root))


def depth(sys: MembraneSystem, root: int = 1) -> int:
    """Nesting depth; a membrane with no children has depth 1."""
    kids = sys.children(root)
    if not kids:
        return 1
    return 1 + max(depth(sys, j) for j in kids)


def validation_errors(
    alphabet: Sequence[str],
    parents: Sequence[int | None],
    init: Sequence[Mapping],
    rules: Sequence[Sequence[Rule]],
    *,
    allow_skin_out: bool = False,
    positions: Mapping | None = None,
) -> list[Diagnostic]:
    """Check every structural constraint; ``positions`` maps keys to (line, col) for messages.

    Keys used in ``positions``: ``("membrane", i)``, ``("rule", i, name)``, ``("init", i)``.
    """
    positions = positions or {}
    diags: list[Diagnostic] = []

    def err(msg, key=None):
        line, col = positions.get(key, (None, None))
        diags.append(Diagnostic(msg, line, col))

    if len(set(alphabet)) != len(alphabet):
        err("duplicate object in alphabet")
    V = set(alphabet)
    n = len(parents)
    if n == 0:
        err("system has no membranes")
        return diags
    if parents[0] is not None:
        err("membrane 1 must be the skin (outermost) membrane", ("membrane", 1))
    for j in range(2, n + 1):
        p = parents[j - 1]
        if p is None:
            err(f"membrane {j} has no parent; only membrane 1 may be the skin", ("membrane", j))
        elif not (1 <= p < j):
            err(f"membrane {j} nested in {p}: parent index must be smaller", ("membrane", j))
    if len(init) != n or len(rules) != n:
        err("init/rules must list exactly one entry per membrane")
        return diags
    children = {i: {j for j in range(1, n + 1) if parents[j - 1] == i} for i in range(1, n + 1)}
    for i in range(1, n + 1):
        for a in init[i - 1]:
            if a not in V:
                err(f"unknown object {a!r} in init of membrane {i}", ("init", i))
        seen = set()
        for r in rules[i - 1]:
            key = ("rule", i, r.name)
            if r.membrane != i:
                err(f"rule {r.name} listed under membrane {i} but belongs to {r.membrane}", key)
            if r.name in seen:
                err(f"duplicate rule name {r.name!r} in membrane {i}", key)
            seen.add(r.name)
            if r.lhs.is_empty():
                err(f"rule {r.name}: empty lhs", key)
            for a in r.lhs:
                if a not in V:
                    err(f"rule {r.name}: unknown object {a!r}", key)
            for a, t in r.rhs:
                if a not in V:
                    err(f"rule {r.name}: unknown object {a!r}", key)
                if t.kind == "in" and t.membrane not in children[i]:
                    err(f"rule {r.name}: in({t.membrane}) is not a child of membrane {i}", key)
                if t.kind == "out" and i == 1 and not allow_skin_out:
                    err(
                        f"rule {r.name}: 'out' in the skin membrane discards objects "
                        "(use --allow-skin-out to accept)",
                        key,
                    )
    return diags


def build_system(
    alphabet: Iterable[str],
    parents: Sequence[int | None],
    init: Sequence[Mapping | Iterable],
    rules: Sequence[Sequence[Rule]],
    *,
    allow_skin_out: bool = False,
) -> MembraneSystem:
    alphabet = tuple(alphabet)
    init = tuple(Multiset(w) for w in init)
    rules = tuple(tuple(rs) for rs in rules)
    diags = validation_errors(alphabet, parents, init, rules, allow_skin_out=allow_skin_out)
    if diags:
        raise PSystemError(diags)
    return MembraneSystem(alphabet, tuple(parents), init, rules, allow_skin_out)


def make_rule(name: str, membrane: int, lhs: Iterable[str] | Mapping, rhs: Iterable) -> Rule:
    """Convenience constructor: ``rhs`` is an iterable of ``(object, target)`` pairs.

    Targets may be given as ``Target`` values or as the strings ``"here"``, ``"out"``, ``"in(j)"``.
    """
    pairs = []
    for a, t in rhs:
        if isinstance(t, str):
            t = parse_target(t)
        pairs.append((a, t))
    return Rule(name, membrane, Multiset(lhs), Multiset(pairs))


def parse_target(text: str) -> Target:
    text = text.replace(" ", "")
    if text == "here":
        return HERE
    if text == "out":
        return OUT
    if text.startswith("in(") and text.endswith(")"):
        return IN(int(text[3:-1]))
    if text.startswith("in_"):
        return IN(int(text[3:]))
    raise ValueError(f"bad target {text!r}")


def _objs(m: Multiset, order: Sequence[str]) -> str:
    return " ".join(a for a in m.ordered(order) for _ in range(m[a]))


def _rhs_key(order: Sequence[str]):
    rank = {a: k for k, a in enumerate(order)}
    return lambda pair: (rank.get(pair[0], len(rank)), pair[0], pair[1])


def to_dsl(sys: MembraneSystem) -> str:
    """Pretty-print in the DSL accepted by :func:`zsm.parser.parse`."""
    out = ["psystem {", f"  objects: {' '.join(sys.alphabet)};"]

    def emit(i: int, indent: str) -> None:
        out.append(f"{indent}membrane {i} {{")
        init = _objs(sys.init[i - 1], sys.alphabet)
        out.append(f"{indent}  init:{' ' + init if init else ''};")
        for r in sys.rules_of(i):
            lhs = _objs(r.lhs, sys.alphabet)
            prods = []
            for pair in sorted(r.rhs, key=_rhs_key(sys.alphabet)):
                prods.extend([f"({pair[0]}, {pair[1]})"] * r.rhs[pair])
            rhs = " " + ", ".join(prods) if prods else ""
            out.append(f"{indent}  rule {r.name}: {lhs} ->{rhs};")
        for j in sorted(sys.children(i)):
            emit(j, indent + "  ")
        out.append(f"{indent}}}")

    emit(1, "  ")
    out.append("}")
    return "\n".join(out) + "\n"


def system_to_json(sys: MembraneSystem) -> dict:
    order = sys.alphabet
    return {
        "objects": list(sys.alphabet),
        "membranes": [
            {
                "index": i,
                "parent": sys.father(i),
                "init": sys.init[i - 1].to_json(order),
                "rules": [
                    {
                        "name": r.name,
                        "lhs": r.lhs.to_json(order),
                        "rhs": [
                            {"object": a, "target": str(t), "count": r.rhs[(a, t)]}
                            for (a, t) in sorted(r.rhs, key=_rhs_key(order))
                        ],
                    }
                    for r in sys.rules_of(i)
                ],
            }
            for i in sys.membranes
        ],
        "allow_skin_out": sys.allow_skin_out,
    }


def rule_count(sys: MembraneSystem) -> int:
    return sum(len(rs) for rs in sys.rules)


def empty_init(n: int) -> tuple[Multiset, ...]:
    return tuple(EMPTY for _ in range(n))
