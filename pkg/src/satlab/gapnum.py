"""Number model: a standard initial segment plus finitely many ordered Z-gaps.

A GapNumber is a pair (gap, offset).  The standard gap holds the ordinary
naturals; every other gap is a copy of Z sitting above all standard numbers,
ordered by the universe's gap order.  Only the arithmetic the constructions
actually consume is defined: +/- standard shifts, order, same-gap differences,
and declared finite maps between gaps (e.g. halving).
"""

from __future__ import annotations

from dataclasses import dataclass, field

STANDARD = "standard"


class GapError(ValueError):
    pass


class UnrepresentableError(GapError):
    """Raised when a value falls outside the decidable gap fragment."""


@dataclass(frozen=True)
class GapNumber:
    gap: str
    offset: int

    def __post_init__(self):
        if self.gap == STANDARD and self.offset < 0:
            raise GapError("standard numbers cannot be negative: %d" % self.offset)

    def is_standard(self) -> bool:
        return self.gap == STANDARD

    def shift(self, k: int) -> "GapNumber":
        """Same gap, offset moved by k.  The free Z-action on each gap."""
        if self.gap == STANDARD and self.offset + k < 0:
            raise GapError("standard underflow: %d%+d" % (self.offset, k))
        return GapNumber(self.gap, self.offset + k)

    def to_json(self):
        return {"gap": self.gap, "offset": self.offset}

    @staticmethod
    def from_json(obj) -> "GapNumber":
        return GapNumber(obj["gap"], obj["offset"])

    def __repr__(self):
        if self.gap == STANDARD:
            return "std(%d)" % self.offset
        return "%s%+d" % (self.gap, self.offset)


def std(n: int) -> GapNumber:
    return GapNumber(STANDARD, n)


@dataclass(frozen=True)
class GapUniverse:
    """Ordered family of nonstandard gaps with optional declared maps.

    declared_maps: {op_name: {gap_label: gap_label}}, each map order-compatible
    with the gap order (monotone, never above the identity).
    """

    gap_labels: tuple
    std_cap: int = 8
    declared_maps: tuple = field(default_factory=tuple)  # ((name, ((g, h), ...)), ...)

    def maps(self) -> dict:
        return {name: dict(pairs) for name, pairs in self.declared_maps}

    def gap_pos(self, gap: str) -> int:
        if gap == STANDARD:
            return -1
        try:
            return self.gap_labels.index(gap)
        except ValueError:
            raise GapError("unknown gap %r in this universe" % gap)

    def contains(self, x: GapNumber) -> bool:
        return x.gap == STANDARD or x.gap in self.gap_labels

    def check(self, x: GapNumber) -> GapNumber:
        if not self.contains(x):
            raise GapError("foreign universe: %r" % (x,))
        return x

    def compare(self, x: GapNumber, y: GapNumber) -> str:
        """Total order: gap position first, then offset."""
        self.check(x)
        self.check(y)
        px, py = self.gap_pos(x.gap), self.gap_pos(y.gap)
        if px != py:
            return "lt" if px < py else "gt"
        if x.offset != y.offset:
            return "lt" if x.offset < y.offset else "gt"
        return "eq"

    def lt(self, x: GapNumber, y: GapNumber) -> bool:
        return self.compare(x, y) == "lt"

    def le(self, x: GapNumber, y: GapNumber) -> bool:
        return self.compare(x, y) != "gt"

    def apply_map(self, name: str, x: GapNumber) -> GapNumber:
        """Apply a declared gap map; standard inputs use real arithmetic."""
        if name == "half" and x.is_standard():
            return std(x.offset // 2)
        table = self.maps().get(name, {})
        if x.gap not in table:
            raise UnrepresentableError("map %r not declared on gap %r" % (name, x.gap))
        return GapNumber(table[x.gap], x.offset)

    def gap_representatives(self):
        """One representative value per gap, standard segment included."""
        out = [std(n) for n in range(self.std_cap + 1)]
        out.extend(GapNumber(g, 0) for g in self.gap_labels)
        return out

    def to_json(self):
        return {"gaps": list(self.gap_labels), "std_cap": self.std_cap,
                "maps": {n: dict(p) for n, p in self.declared_maps}}

    @staticmethod
    def from_json(obj) -> "GapUniverse":
        return make_universe(obj["gaps"], obj.get("maps", {}),
                             std_cap=obj.get("std_cap", 8))


def make_universe(labels, declared_maps=None, std_cap: int = 8) -> GapUniverse:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise GapError("duplicate gap label in %r" % (labels,))
    if STANDARD in labels:
        raise GapError("the standard gap is implicit; do not list it")
    maps = declared_maps or {}
    norm = []
    for name, table in sorted(maps.items()):
        pairs = tuple(sorted(table.items()))
        for g, h in pairs:
            if g not in labels or (h != STANDARD and h not in labels):
                raise GapError("map %r mentions unknown gap" % name)
        # order-compatibility: g < g' must give map(g) <= map(g')
        pos = {g: i for i, g in enumerate(labels)}
        pos[STANDARD] = -1
        seen = sorted(pairs, key=lambda gh: pos[gh[0]])
        for (g1, h1), (g2, h2) in zip(seen, seen[1:]):
            if pos[h1] > pos[h2]:
                raise GapError("map %r is not order-compatible: %s->%s but %s->%s"
                               % (name, g1, h1, g2, h2))
        norm.append((name, pairs))
    return GapUniverse(labels, std_cap, tuple(norm))


def step(x: GapNumber, k: int) -> GapNumber:
    return x.shift(k)


def compare(universe: GapUniverse, x: GapNumber, y: GapNumber) -> str:
    return universe.compare(x, y)


def gap_diff(x: GapNumber, y: GapNumber):
    """x - y when both sit in the same gap, else None ("unbounded")."""
    if x.gap == y.gap:
        return x.offset - y.offset
    return None


@dataclass(frozen=True)
class CutSpec:
    """Threshold cut: everything strictly below a gap or below a GapNumber."""

    kind: str  # "below_gap" | "below_value"
    gap: str = None
    value: GapNumber = None

    @staticmethod
    def below_gap(g: str) -> "CutSpec":
        return CutSpec("below_gap", gap=g)

    @staticmethod
    def below_value(x: GapNumber) -> "CutSpec":
        return CutSpec("below_value", value=x)

    def contains(self, universe: GapUniverse, x: GapNumber) -> bool:
        if self.kind == "below_gap":
            return universe.gap_pos(x.gap) < universe.gap_pos(self.gap)
        return universe.lt(x, self.value)
