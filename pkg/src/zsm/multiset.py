"""Finite multisets with the union / truncated difference / scalar algebra."""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from typing import Any

# Counts are kept inside signed 64-bit range; anything larger is a bug upstream.
COUNT_MAX = 2**63 - 1


def _check_count(symbol: Hashable, count: Any) -> int:
    if isinstance(count, bool) or not isinstance(count, int):
        raise TypeError(f"count for {symbol!r} must be an int, got {count!r}")
    if count < 0:
        raise ValueError(f"negative count {count} for {symbol!r}")
    if count > COUNT_MAX:
        raise OverflowError(f"count for {symbol!r} exceeds {COUNT_MAX}")
    return count


def _default_key(symbol: Any) -> tuple:
    return (type(symbol).__name__, str(symbol))


class Multiset(Mapping):
    """Immutable finite map ``symbol -> count`` with no zero entries.

    Accepts a mapping of counts or an iterable of symbols (each occurrence
    counts once)::

        >>> Multiset("aab") == Multiset({"a": 2, "b": 1})
        True
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, items: Mapping | Iterable | None = None) -> None:
        data: dict = {}
        if items is None:
            pass
        elif isinstance(items, Mapping):
            for s, c in items.items():
                c = _check_count(s, c)
                if c:
                    data[s] = c
        else:
            for s in items:
                data[s] = _check_count(s, data.get(s, 0) + 1)
        self._items = data
        self._hash: int | None = None

    # Mapping protocol; absent symbols have count 0
    def __getitem__(self, symbol: Hashable) -> int:
        return self._items.get(symbol, 0)

    def __iter__(self) -> Iterator:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._items.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._items == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __repr__(self) -> str:
        return f"Multiset({self._items!r})"

    def __str__(self) -> str:
        return self.format()

    @property
    def size(self) -> int:
        """Cardinality: the sum of all counts."""
        return sum(self._items.values())

    def is_empty(self) -> bool:
        return not self._items

    def __add__(self, other: Mapping) -> Multiset:
        if not isinstance(other, Mapping):
            return NotImplemented
        out = dict(self._items)
        for s, c in other.items():
            out[s] = out.get(s, 0) + c
        return Multiset(out)

    def __sub__(self, other: Mapping) -> Multiset:
        if not isinstance(other, Mapping):
            return NotImplemented
        out = {}
        for s, c in self._items.items():
            d = c - other.get(s, 0)
            if d > 0:
                out[s] = d
        return Multiset(out)

    def scale(self, j: int) -> Multiset:
        j = _check_count("scalar", j)
        return Multiset({s: j * c for s, c in self._items.items()})

    def __mul__(self, j: int) -> Multiset:
        if isinstance(j, bool) or not isinstance(j, int):
            return NotImplemented
        return self.scale(j)

    __rmul__ = __mul__

    def __le__(self, other: Mapping) -> bool:
        if not isinstance(other, Mapping):
            return NotImplemented
        return all(c <= other.get(s, 0) for s, c in self._items.items())

    def __lt__(self, other: Mapping) -> bool:
        return self <= other and self != other

    def __ge__(self, other: Mapping) -> bool:
        if not isinstance(other, Mapping):
            return NotImplemented
        return all(c <= self[s] for s, c in other.items())

    def __gt__(self, other: Mapping) -> bool:
        return self >= other and self != other

    def support(self) -> frozenset:
        return frozenset(self._items)

    def elements(self) -> Iterator:
        """Each symbol repeated by its count, in canonical order."""
        for s in self.ordered():
            for _ in range(self._items[s]):
                yield s

    def ordered(self, order: Sequence | None = None) -> list:
        """Symbols of the support, in ``order`` first, then by a stable fallback key."""
        if order is None:
            try:
                return sorted(self._items)
            except TypeError:
                return sorted(self._items, key=_default_key)
        rank = {s: i for i, s in enumerate(order)}
        known = sorted((s for s in self._items if s in rank), key=rank.__getitem__)
        rest = [s for s in self._items if s not in rank]
        try:
            rest.sort()
        except TypeError:
            rest.sort(key=_default_key)
        return known + rest

    def format(self, order: Sequence | None = None) -> str:
        """Canonical text form, e.g. ``{a:2, b:1}``."""
        body = ", ".join(f"{s}:{self._items[s]}" for s in self.ordered(order))
        return "{" + body + "}"

    def word(self, order: Sequence | None = None) -> str:
        """Juxtaposition form used in examples (``aab``); ``0`` for the empty multiset."""
        if not self._items:
            return "0"
        return "".join(str(s) * self._items[s] for s in self.ordered(order))

    def to_json(self, order: Sequence | None = None) -> dict:
        return {str(s): self._items[s] for s in self.ordered(order)}


EMPTY = Multiset()


def union(m: Mapping, n: Mapping) -> Multiset:
    return Multiset(m) + n


def difference(m: Mapping, n: Mapping) -> Multiset:
    """Truncated difference: counts never go below zero."""
    return Multiset(m) - n


def scalar(j: int, m: Mapping) -> Multiset:
    return Multiset(m).scale(j)


def leq(m: Mapping, n: Mapping) -> bool:
    return Multiset(m) <= n


def support(m: Mapping) -> frozenset:
    return Multiset(m).support()


def msum(items: Iterable[Mapping]) -> Multiset:
    out: dict = {}
    for m in items:
        for s, c in m.items():
            out[s] = out.get(s, 0) + c
    return Multiset(out)
