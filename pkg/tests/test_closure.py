"""Subformula closure with symbolic rays, rank, and bounded downward closure."""
import pytest

from satlab import (ClosedSet, GapNumber, Piece, Ray, cl, d_closure,
                    double_negation_operator, immediate_subformulas, iterate,
                    make_operator, make_universe, parse_formula, rank, std)


def loc_op():
    return make_operator("F", "(or q p)", "local", "(= 0 1)")


def test_immediate_subformulas():
    f = parse_formula("(or (not (= 0 0)) (exists x (= x 0)))")
    subs = immediate_subformulas(f)
    assert parse_formula("(not (= 0 0))") in subs
    assert parse_formula("(exists x (= x 0))") in subs
    assert immediate_subformulas(parse_formula("(= 0 0)")) == []


def test_cl_contains_generators_and_is_idempotent():
    op = loc_op()
    gens = [iterate(op, 3), parse_formula("(not (= 0 0))")]
    c = cl(gens, ops=[op])
    for g in gens:
        assert g in c
    again = cl(list(c.explicit), ops=[op])
    assert again.explicit == c.explicit


def test_cl_is_monotone():
    op = loc_op()
    small = cl([iterate(op, 2)], ops=[op])
    big = cl([iterate(op, 2), iterate(op, 3)], ops=[op])
    assert small.issubset(big)


def test_cl_of_symbolic_iterate_produces_a_ray():
    op = loc_op()
    x = GapNumber("g1", 0)
    c = cl([iterate(op, x)], ops=[op])
    assert iterate(op, x) in c
    # downward gap-uniformity: pieces below the generator are covered
    assert Piece(op, (), x.shift(-5), None) in c
    # the base is pulled in through the root edge
    assert op.theta in c.explicit


def test_closed_set_union_merges_rays():
    op = loc_op()
    a = ClosedSet(rays=[Ray(op, (), "g1", 0, None)])
    b = ClosedSet(rays=[Ray(op, (), "g1", 3, None)])
    u = a.union(b)
    assert Piece(op, (), GapNumber("g1", 3), None) in u
    assert a.issubset(u) and b.issubset(u)


def test_rank_increases_along_subformulas():
    op = loc_op()
    c = cl([iterate(op, 3)], ops=[op])
    r = rank(c.explicit, ops=[op])
    for f in c.explicit:
        for g in immediate_subformulas(f):
            if g in r:
                assert r[g] < r[f]


def test_rank_uses_root_edges():
    op = loc_op()
    f = iterate(op, 2)
    r = rank({f, op.theta}, ops=[op])
    assert r[op.theta] < r[f]


def test_d_closure_laws_smoke():
    uni = make_universe(("g1", "g2"))
    op = double_negation_operator()
    base = parse_formula("(= 0 0)")
    x = GapNumber("g2", 0)
    d = GapNumber("g1", 0)
    Z = cl([iterate(op, x, base)], ops=[op])
    zd = d_closure(Z, d, op, uni)
    # earlier stages only, closed downward: (Z_d)_d never escapes Z_d
    assert d_closure(zd, d, op, uni).issubset(zd)
    # union distributes
    Z2 = cl([iterate(op, GapNumber("g1", 0), base)], ops=[op])
    lhs = d_closure(Z.union(Z2), d, op, uni)
    rhs = d_closure(Z, d, op, uni).union(d_closure(Z2, d, op, uni))
    assert lhs == rhs


def test_d_closure_adds_earlier_stages():
    uni = make_universe(("g1", "g2"))
    op = double_negation_operator()
    base = parse_formula("(= 0 0)")
    f3 = iterate(op, 3, base)
    Z = ClosedSet(explicit=[f3])
    zd = d_closure(Z, GapNumber("g1", 0), op, uni)
    assert iterate(op, 2, base) in zd
    assert iterate(op, 1, base) in zd
