"""Sentential operator templates, classification, iteration, decomposition."""
import itertools

import pytest
from hypothesis import given, strategies as st

from satlab import (Eq, GapNumber, Operator, Piece, TemplateError, Zero,
                    check_additivity, classify_positions,
                    double_negation_operator, enumerate_templates,
                    eval_template, f_length_root, instantiate, iterate,
                    leaf_occurs, make_operator, make_piece, parse_formula,
                    parse_template, std, template_size, template_to_sexpr,
                    theta_truth, to_sexpr, validate_template)
from satlab.operators import P, Q, _match_unfolding


def table_of(t):
    return tuple(eval_template(t, p, q) for p in (False, True)
                 for q in (False, True))


@given(st.integers(1, 3))
def test_template_round_trip(n):
    for t in enumerate_templates(n):
        assert parse_template(template_to_sexpr(t)) == t


def test_truth_table_shapes():
    or_pq = table_of(parse_template("(or p q)"))
    and_pq = table_of(parse_template("(and p q)"))
    just_q = table_of(parse_template("(not (not q))"))
    assert or_pq == (False, True, True, True)
    assert and_pq == (False, False, False, True)
    assert just_q == (False, True, False, True)


def test_quantifiers_are_transparent():
    t = parse_template("(exists y (or p q))")
    assert table_of(t) == table_of(parse_template("(or p q)"))


def test_local_validation():
    theta_t = parse_formula("(= 0 0)")
    theta_f = parse_formula("(= 0 1)")
    # (and q p), theta true: Phi(T,q)=q holds; theta false: Phi(F,q)=F fails at q=T
    validate_template(parse_template("(and q p)"), "local", theta_t)
    with pytest.raises(TemplateError):
        validate_template(parse_template("(and q p)"), "local", theta_f)
    validate_template(parse_template("(or q p)"), "local", theta_f)
    with pytest.raises(TemplateError):
        validate_template(parse_template("(or q p)"), "local", theta_t)


def test_nonlocal_validation():
    tc = validate_template(parse_template("(not (not q))"), "nonlocal")
    assert tc.kind == "additive" and tc.q_monotone
    with pytest.raises(TemplateError):  # equivalent to p
        validate_template(parse_template("(and p p)"), "nonlocal")
    with pytest.raises(TemplateError):  # q must occur
        validate_template(parse_template("(not p)"), "nonlocal")
    with pytest.raises(TemplateError):  # T,T must entail it
        validate_template(parse_template("(not q)"), "nonlocal")


def test_classification_against_truth_tables():
    """Shape assignment is semantic: same table, same shape."""
    want = {(False, True, True, True): "or_pq",
            (False, False, False, True): "and_pq",
            (False, True, False, True): "just_q"}
    for t in enumerate_templates(2):
        if not leaf_occurs(t, Q):
            continue
        try:
            tc = validate_template(t, "nonlocal")
        except TemplateError:
            continue
        assert tc.shape == want[table_of(t)], template_to_sexpr(t)


def test_classify_positions():
    op = make_operator("F", "(or q p)", "local", "(= 0 1)")
    cls = classify_positions(op)
    assert cls[()] == "q"  # root of the unfolding behaves as q at theta false
    assert all(v in ("q", "not_q", "top", "bot") for v in cls.values())


def test_iterate_materializes_small_standard_indices():
    op = make_operator("F", "(or q p)", "local", "(= 0 1)")
    f0 = iterate(op, 0)
    assert f0 == op.theta
    f2 = iterate(op, 2)
    assert to_sexpr(f2) == "(or (or (= 0 1) (= 0 1)) (= 0 1))"
    sym = iterate(op, GapNumber("g1", 0))
    assert isinstance(sym, Piece) and sym.pos == ()


def test_make_piece_normalization():
    op = make_operator("F", "(or q p)", "local", "(= 0 1)")
    x = GapNumber("g1", 3)
    # the q-leaf of the x-th unfolding is the root of the (x-1)-st
    q_pos = next(pos for pos, node in op.positions().items()
                 if isinstance(node, Q))
    p_pos = next(pos for pos, node in op.positions().items()
                 if isinstance(node, P))
    assert make_piece(op, q_pos, x) == Piece(op, (), x.shift(-1), None)
    assert make_piece(op, p_pos, x) == op.theta
    # small standard root indices materialize
    assert make_piece(op, (), std(2)) == iterate(op, 2)


def test_f_length_root_concrete():
    op = make_operator("F", "(or q p)", "local", "(= 0 1)")
    f = iterate(op, 4)
    assert f_length_root(op, f) == (4, op.theta)
    assert f_length_root(op, op.theta) == (0, op.theta)
    other = parse_formula("(= 0 0)")
    assert f_length_root(op, other) == (0, other)


def test_f_length_root_symbolic_and_intermediate():
    op = make_operator("F", "(or q p)", "local", "(= 0 1)")
    x = GapNumber("g2", 1)
    root = Piece(op, (), x, None)
    assert f_length_root(op, root) == (x, op.theta)
    dneg = double_negation_operator()
    inner = make_piece(dneg, (0,), x, parse_formula("(= 0 0)"))
    assert isinstance(inner, Piece) and inner.pos == (0,)
    with pytest.raises(TemplateError):
        f_length_root(dneg, inner)


def test_f_length_is_maximal_against_reiteration():
    op = make_operator("F", "(not (not q))", "nonlocal")
    base = parse_formula("(= 0 0)")
    for n in range(6):
        f = iterate(op, n, base)
        length, root = f_length_root(op, f)
        assert length == n and root == base
        # maximality: no longer decomposition reproduces f
        for m in range(length + 1, length + 3):
            assert all(iterate(op, m, g) != f
                       for g in (base, root, f))


def test_additivity_law():
    op = make_operator("F", "(not (not q))", "nonlocal")
    assert check_additivity(op, parse_formula("(= 0 0)"), bound=6)
    acc = make_operator("G", "(or q p)", "local", "(= 0 1)")
    with pytest.raises(TemplateError):
        check_additivity(acc, parse_formula("(= 0 0)"))


def test_accessible_unfolding_match():
    op = make_operator("F", "(or q p)", "local", "(= 0 1)")
    f = iterate(op, 3)
    m = _match_unfolding(op, f)
    assert m is not None and m[0] == op.theta
    assert m[1] == iterate(op, 2)


def test_operator_identity_is_by_id():
    a = make_operator("F", "(or q p)", "local", "(= 0 1)")
    b = make_operator("F", "(and q p)", "local", "(= 0 0)")
    assert a == b and hash(a) == hash(b)


def test_dummy_quantifier_cannot_capture():
    with pytest.raises(TemplateError):
        make_operator("F", "(exists y (or q p))", "local", "(= y y)")


def test_double_negation_operator():
    op = double_negation_operator()
    assert op.mode == "nonlocal" and op.kind == "additive"
    f = iterate(op, 2, parse_formula("(= 0 1)"))
    assert to_sexpr(f) == "(not (not (not (not (= 0 1)))))"
