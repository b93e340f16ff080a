"""Recursive-descent parser for the ``.psys`` membrane-system language.

Example::

    psystem {
      objects: a b c;
      membrane 1 {
        init: a b;
        rule r1: a -> (b, here);
        membrane 2 { init: ; rule r2: b b -> (c, out), (a, here); }
      }
    }

``#`` starts a comment running to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .multiset import Multiset
from .psystem import (
    HERE,
    IN,
    OUT,
    Diagnostic,
    MembraneSystem,
    PSystemError,
    Rule,
    validation_errors,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[{}(),;:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


class ParseError(PSystemError):
    pass


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError([Diagnostic(f"unexpected character {text[pos]!r}", line, col)])
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass
class _RawMembrane:
    index: int
    parent: int | None
    init: list
    rules: list
    pos: tuple[int, int]
    init_pos: tuple[int, int]


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.k = 0
        self.membranes: list[_RawMembrane] = []
        self.positions: dict = {}

    @property
    def cur(self) -> Token:
        return self.toks[self.k]

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.cur
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError([Diagnostic(f"{msg}, found {found}", tok.line, tok.col)])

    def expect(self, text: str) -> Token:
        if self.cur.text != text or self.cur.kind == "eof":
            self.fail(f"expected {text!r}")
        tok = self.cur
        self.k += 1
        return tok

    def ident(self, what: str) -> Token:
        if self.cur.kind != "ident":
            self.fail(f"expected {what}")
        tok = self.cur
        self.k += 1
        return tok

    def integer(self) -> Token:
        if self.cur.kind != "int":
            self.fail("expected membrane index")
        tok = self.cur
        self.k += 1
        return tok

    def idents_until(self, stop: str) -> list[Token]:
        out = []
        while self.cur.kind == "ident":
            out.append(self.ident("object"))
        if self.cur.text != stop:
            self.fail(f"expected object name or {stop!r}")
        return out

    def system(self) -> list[str]:
        self.expect("psystem")
        self.expect("{")
        self.expect("objects")
        self.expect(":")
        objects = [t.text for t in self.idents_until(";")]
        self.expect(";")
        if self.cur.text != "membrane":
            self.fail("expected 'membrane'")
        self.membrane(None)
        self.expect("}")
        if self.cur.kind != "eof":
            self.fail("expected end of input")
        return objects

    def membrane(self, parent: int | None) -> None:
        start = self.expect("membrane")
        idx = int(self.integer().text)
        self.expect("{")
        init_tok = self.expect("init")
        self.expect(":")
        init = [t.text for t in self.idents_until(";")]
        self.expect(";")
        raw = _RawMembrane(idx, parent, init, [], (start.line, start.col), (init_tok.line, init_tok.col))
        self.membranes.append(raw)
        while self.cur.text == "rule":
            raw.rules.append(self.rule(idx))
        while self.cur.text == "membrane":
            self.membrane(idx)
        if self.cur.text == "rule":
            self.fail("rules must precede nested membranes")
        self.expect("}")

    def rule(self, membrane: int) -> Rule:
        start = self.expect("rule")
        name = self.ident("rule name").text
        self.expect(":")
        lhs = []
        while self.cur.kind == "ident":
            lhs.append(self.ident("object").text)
        self.expect("->")
        rhs = []
        if self.cur.text != ";":
            rhs.append(self.product())
            while self.cur.text == ",":
                self.k += 1
                rhs.append(self.product())
        self.expect(";")
        self.positions.setdefault(("rule", membrane, name), (start.line, start.col))
        return Rule(name, membrane, Multiset(lhs), Multiset(rhs))

    def product(self):
        self.expect("(")
        obj = self.ident("object").text
        self.expect(",")
        tok = self.cur
        if tok.text == "here":
            self.k += 1
            target = HERE
        elif tok.text == "out":
            self.k += 1
            target = OUT
        elif tok.text == "in":
            self.k += 1
            self.expect("(")
            j = int(self.integer().text)
            self.expect(")")
            target = IN(j)
        else:
            self.fail("expected target 'here', 'out' or 'in(j)'")
        self.expect(")")
        return (obj, target)


def parse(text: str, *, allow_skin_out: bool = False) -> MembraneSystem:
    """Parse and validate; raises :class:`PSystemError` with positioned diagnostics."""
    p = _Parser(text)
    objects = p.system()

    diags: list[Diagnostic] = []
    by_index: dict[int, _RawMembrane] = {}
    for raw in p.membranes:
        if raw.index in by_index:
            diags.append(Diagnostic(f"duplicate membrane index {raw.index}", *raw.pos))
        else:
            by_index[raw.index] = raw
    n = len(by_index)
    if sorted(by_index) != list(range(1, n + 1)):
        missing = sorted(set(range(1, n + 1)) - set(by_index))
        raw = max(by_index.values(), key=lambda r: r.index)
        diags.append(
            Diagnostic(f"membrane indices must be 1..{n}; missing {missing}", *raw.pos)
        )
    if diags:
        raise PSystemError(diags)

    positions = dict(p.positions)
    for raw in by_index.values():
        positions[("membrane", raw.index)] = raw.pos
        positions[("init", raw.index)] = raw.init_pos
    ordered = [by_index[i] for i in range(1, n + 1)]
    parents = tuple(r.parent for r in ordered)
    init = tuple(Multiset(r.init) for r in ordered)
    rules = tuple(tuple(r.rules) for r in ordered)
    diags = validation_errors(
        objects, parents, init, rules, allow_skin_out=allow_skin_out, positions=positions
    )
    if diags:
        raise PSystemError(diags)
    return MembraneSystem(tuple(objects), parents, init, rules, allow_skin_out)


def parse_file(path, *, allow_skin_out: bool = False) -> MembraneSystem:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), allow_skin_out=allow_skin_out)
