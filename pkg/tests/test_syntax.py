"""Formula AST: parsing, substitution, evaluation, alpha-equivalence."""
import pytest
from hypothesis import given, settings

from satlab import (Assignment, CaptureError, EMPTY, Eq, Exists, GapNumber,
                    Not, One, Or, Plus, UnrepresentableError, Var, Zero,
                    alpha_eq, asn_check, big_and, big_or, complexity,
                    eval_formula, eval_term, formula_size, free_vars,
                    make_universe, numeral, or_disjuncts, parse_formula,
                    parse_term, rename_bound, std, subformulas, substitute,
                    to_sexpr)

from conftest import formulas, terms


@given(formulas())
def test_print_parse_round_trip(f):
    assert parse_formula(to_sexpr(f)) == f


@given(terms())
def test_term_round_trip(t):
    from satlab import term_to_sexpr
    assert parse_term(term_to_sexpr(t)) == t


def test_less_than_is_sugar():
    f = parse_formula("(< v0 v1)")
    assert isinstance(f, Exists)
    # exists u. (v0 + u) + 1 = v1
    assert free_vars(f) == {"v0", "v1"}
    body = f.body
    assert isinstance(body, Eq)
    assert to_sexpr(f).startswith("(exists ")


def test_pinned_substitution_example():
    f = parse_formula("(or (exists v0 (= v0 v1)) (= (+ v0 1) v2))")
    gamma = {"v0": numeral(3), "v1": numeral(1)}
    got = substitute(f, gamma)
    want = parse_formula(
        "(or (exists v0 (= v0 (+ 0 1)))"
        " (= (+ (+ (+ (+ 0 1) 1) 1) 1) v2))")
    assert got == want


@given(formulas())
def test_empty_substitution_is_identity(f):
    assert substitute(f, {}) == f


def test_substitution_simple():
    assert substitute(Eq(Var("v0"), Var("v0")), {"v0": One()}) == Eq(One(), One())


def test_capture_is_avoided_or_reported():
    f = Exists("v0", Eq(Var("v0"), Var("v1")))
    g = substitute(f, {"v1": Plus(Var("v0"), One())})
    # the binder must move out of the way of the incoming v0
    assert g.var != "v0"
    assert alpha_eq(substitute(g, {}), g)
    with pytest.raises(CaptureError):
        substitute(f, {"v1": Var("v0")}, rename=False)


@given(formulas())
def test_alpha_eq_reflexive(f):
    assert alpha_eq(f, f)


def test_alpha_eq_respects_bound_renaming():
    f = parse_formula("(forall x (exists y (= x y)))")
    g = rename_bound(f, {"x": "a", "y": "b"})
    assert alpha_eq(f, g)
    assert not alpha_eq(f, parse_formula("(forall x (exists y (= y y)))"))


def test_complexity_measure():
    assert complexity(parse_formula("(= 0 0)")) == 0
    assert complexity(parse_formula("(not (= 0 0))")) == 1
    assert complexity(parse_formula("(or (= 0 0) (not (= 0 0)))")) == 2
    assert complexity(parse_formula("(exists x (= x 0))")) == 1


@given(formulas())
def test_size_bounds_complexity(f):
    assert 0 <= complexity(f) < formula_size(f)
    assert f in subformulas(f)


def test_numeral_shape():
    assert to_sexpr(Eq(numeral(3), Zero())) == "(= (+ (+ (+ 0 1) 1) 1) 0)"
    assert numeral(0) == Zero()
    assert eval_term(numeral(5), EMPTY) == std(5)


def test_big_or_round_trip():
    parts = [parse_formula("(= 0 %d)" % 0) for _ in range(3)]
    parts = [parse_formula("(= 0 0)"), parse_formula("(= 0 1)"),
             parse_formula("(= 1 1)")]
    assert or_disjuncts(big_or(parts)) == parts
    assert big_and(parts[:1]) == parts[0]


def test_eval_term_gap_arithmetic(uni):
    a = Assignment({"x": GapNumber("g1", 2)})
    assert eval_term(parse_term("(+ x 1)"), a, uni) == GapNumber("g1", 3)
    assert eval_term(parse_term("(* (+ 1 1) (+ 1 1))"), EMPTY, uni) == std(4)
    with pytest.raises(UnrepresentableError):
        eval_term(parse_term("(+ x x)"), a, uni)
    with pytest.raises(UnrepresentableError):
        eval_term(parse_term("(* x (+ 1 1))"), a, uni)


def test_eval_formula_tarskian(uni):
    assert eval_formula(parse_formula("(= 0 0)"), EMPTY, uni)
    assert not eval_formula(parse_formula("(= 0 1)"), EMPTY, uni)
    assert eval_formula(parse_formula("(exists x (= x (+ 0 1)))"), EMPTY, uni)
    assert not eval_formula(parse_formula("(forall x (= x 0))"), EMPTY, uni)
    # quantifiers see the gap representatives
    assert eval_formula(parse_formula("(exists x (not (= x y)))"),
                        Assignment({"y": std(0)}), uni)


def test_asn_check_wants_exactly_the_free_vars():
    f = parse_formula("(= x y)")
    assert asn_check(f, Assignment({"x": std(0), "y": std(1)}))
    assert not asn_check(f, Assignment({"x": std(0)}))
    assert not asn_check(f, Assignment({"x": std(0), "y": std(1), "z": std(2)}))


def test_assignment_is_immutable_and_hashable():
    a = Assignment({"x": std(1)})
    b = a.set("y", std(2))
    assert "y" not in a.domain() and b["y"] == std(2)
    assert hash(a) == hash(Assignment({"x": std(1)}))
    assert b.drop(["y"]) == a
    assert b.restrict(["x"]) == a
