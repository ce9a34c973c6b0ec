"""Closure algebra over symbolic formulas.

Sets of formulas here may contain, besides concrete formulas, whole downward
rays of Piece nodes: a Ray (op, pos, gap, max_offset, base) stands for every
Piece at that template position whose index sits in `gap` at offset
<= max_offset.  Rays are what keep closures of nonstandard iterates finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gapnum import STANDARD, GapNumber, GapUniverse
from .operators import (Operator, Piece, TemplateError, f_length_root,
                        instantiate, iterate, make_piece, piece_base,
                        piece_children)
from .syntax import is_formula, subformulas


class ClosureError(ValueError):
    pass


@dataclass(frozen=True)
class Ray:
    op: Operator
    pos: tuple
    gap: str
    max_offset: int
    base: object = None

    def representative(self) -> Piece:
        return Piece(self.op, self.pos, GapNumber(self.gap, self.max_offset),
                     self.base)

    def covers(self, piece: Piece) -> bool:
        return (piece.op == self.op and piece.pos == self.pos
                and piece.base == self.base and piece.index.gap == self.gap
                and piece.index.offset <= self.max_offset)

    def key(self):
        return (self.op.id, self.pos, self.gap, self.base)


class ClosedSet:
    """Container of concrete formulas plus rays.  `cl` produces genuinely
    closed ones; the class itself is just the representation."""

    def __init__(self, explicit=(), rays=()):
        self.explicit = set(explicit)
        self._rays = {}
        for r in rays:
            self._add_ray(r)

    def _add_ray(self, ray: Ray):
        k = ray.key()
        old = self._rays.get(k)
        if old is None or old.max_offset < ray.max_offset:
            self._rays[k] = ray
            return True
        return False

    @property
    def rays(self):
        return set(self._rays.values())

    def add(self, item):
        if isinstance(item, Ray):
            return self._add_ray(item)
        if isinstance(item, Piece):
            return self._add_ray(Ray(item.op, item.pos, item.index.gap,
                                     item.index.offset, item.base))
        if item in self.explicit:
            return False
        self.explicit.add(item)
        return True

    def __contains__(self, item):
        if isinstance(item, Piece):
            k = (item.op.id, item.pos, item.index.gap, item.base)
            r = self._rays.get(k)
            return r is not None and item.index.offset <= r.max_offset
        return item in self.explicit

    def members(self):
        """Explicit formulas followed by ray descriptors."""
        return list(self.explicit) + sorted(
            self._rays.values(), key=lambda r: (r.op.id, r.pos, r.gap))

    def union(self, other: "ClosedSet") -> "ClosedSet":
        return ClosedSet(self.explicit | other.explicit,
                         list(self._rays.values()) + list(other._rays.values()))

    def issubset(self, other: "ClosedSet") -> bool:
        if not self.explicit <= other.explicit:
            return False
        for k, r in self._rays.items():
            o = other._rays.get(k)
            if o is None or o.max_offset < r.max_offset:
                return False
        return True

    def __eq__(self, other):
        return (isinstance(other, ClosedSet) and self.explicit == other.explicit
                and self._rays == other._rays)

    def __len__(self):
        return len(self.explicit) + len(self._rays)

    def __repr__(self):
        return "ClosedSet(%d explicit, %d rays)" % (len(self.explicit),
                                                    len(self._rays))


def immediate_subformulas(f) -> list:
    """One step of the subformula relation; Pieces read off their template."""
    if isinstance(f, Piece):
        return piece_children(f)
    from .syntax import Not, Or, And, Exists, Forall
    if isinstance(f, Not):
        return [f.body]
    if isinstance(f, (Or, And)):
        return [f.left, f.right]
    if isinstance(f, (Exists, Forall)):
        return [f.body]
    return []


def cl(generators, ops=()) -> ClosedSet:
    """Least set containing the generators, closed under immediate subformulas
    and under F-root edges (roots of symbolic iterates are pulled in even
    though the within-gap descent never reaches them)."""
    out = ClosedSet()
    work = list(generators)
    ray_work = []

    def push(item):
        if isinstance(item, Piece):
            ray = Ray(item.op, item.pos, item.index.gap, item.index.offset,
                      item.base)
            if out._add_ray(ray):
                ray_work.append(ray)
            b = piece_base(item)
            if b not in out:
                work.append(b)
        else:
            if item not in out.explicit:
                work.append(item)

    while work or ray_work:
        while work:
            f = work.pop()
            if isinstance(f, Piece):
                push(f)
                continue
            if f in out.explicit:
                continue
            out.explicit.add(f)
            for g in immediate_subformulas(f):
                push(g)
        while ray_work:
            ray = ray_work.pop()
            reps = [ray.representative()]
            if ray.gap == STANDARD and ray.max_offset > ray.op.unfolding_bound:
                reps.append(Piece(ray.op, ray.pos,
                                  GapNumber(STANDARD, ray.op.unfolding_bound),
                                  ray.base))
            for rep in reps:
                for child in piece_children(rep):
                    push(child)
    return out


def rank(nodes, ops=()) -> dict:
    """Minimal rank function on a finite set of symbolic formulas, strictly
    increasing along immediate subformulas and F-root edges within the set."""
    nodes = list(nodes)
    node_set = set(nodes)
    preds = {n: set() for n in nodes}
    for n in nodes:
        for c in immediate_subformulas(n):
            if c in node_set and c != n:
                preds[n].add(c)
        for op in ops:
            try:
                length, root = f_length_root(op, n)
            except TemplateError:
                continue
            nontrivial = (isinstance(length, GapNumber) or length >= 1)
            if nontrivial and root in node_set and root != n:
                preds[n].add(root)

    out = {}
    state = {}

    def visit(n):
        if n in out:
            return out[n]
        if state.get(n) == "open":
            raise ClosureError("cycle through %r" % (n,))
        state[n] = "open"
        r = 0 if not preds[n] else 1 + max(visit(p) for p in preds[n])
        state[n] = "done"
        out[n] = r
        return r

    for n in nodes:
        visit(n)
    return out


def d_closure(Z, d: GapNumber, op: Operator, universe: GapUniverse) -> ClosedSet:
    """All earlier stages of iterates in Z reachable within finitely many d's.

    Accessible operators: the plain closure.  Additive operators: every
    F(c, phi) with F(a, phi) in Z and 0 < a - c < n*d for some standard n.
    Only same-gap differences are representable, so symbolic iterates
    contribute their within-gap rays; that is the decidable fragment.
    """
    items = Z.members() if isinstance(Z, ClosedSet) else list(Z)
    if d == GapNumber(STANDARD, 0):
        # 0 < a-c < n*0 has no solutions
        return ClosedSet() if op.kind == "additive" else cl(
            [it.representative() if isinstance(it, Ray) else it
             for it in items], ops=[op])
    if op.kind == "accessible":
        gens = []
        for it in items:
            gens.append(it.representative() if isinstance(it, Ray) else it)
        return cl(gens, ops=[op])
    out = ClosedSet()
    for it in items:
        if isinstance(it, Ray):
            if it.pos == ():
                out.add(Ray(it.op, it.pos, it.gap, it.max_offset - 1, it.base))
            continue
        if isinstance(it, Piece):
            if it.op == op and it.pos == ():
                out.add(Ray(it.op, (), it.index.gap, it.index.offset - 1,
                            it.base))
            continue
        length, root = f_length_root(op, it)
        stage = root
        for c in range(length):
            out.add(stage)
            stage = instantiate(op.template, None, stage)
    return out
