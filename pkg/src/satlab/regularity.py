"""Regularity: a class's verdicts depend only on a formula's shape.

The structural template of a formula abstracts away everything but shape:
constants and maximal bound-variable-free terms are pulled out into a
substitution gamma, every free-variable occurrence gets its own fresh
variable, and bound variables are renamed canonically.  Variables are
numbered v0, v1, ... left to right by first occurrence (binders count at
their binding site), which is a deterministic order-isomorphic stand-in for
code minimization.  A class is regular when (phi, alpha) and
(template, hat-assignment) always agree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gapnum import GapNumber, GapUniverse, STANDARD
from .operators import (Operator, P, Piece, Q, TemplateError, eval_template,
                        iterate, make_piece, piece_base)
from .satclass import SatClass, SatClassError, VerificationReport, ray_key, \
    verify_comp
from .syntax import (EMPTY, And, Assignment, Eq, Exists, Forall, Not, Or,
                     Plus, Times, Var, Zero, alpha_eq, eval_formula, eval_term,
                     free_vars, is_formula, substitute, term_vars, to_sexpr)


class RegularityError(ValueError):
    pass


@dataclass(frozen=True)
class StructuralTemplate:
    template: object              # the abstracted formula
    gamma: tuple                  # ((template var, original term), ...)
    bound_renaming: tuple         # ((template binder, original binder), ...)

    def gamma_map(self) -> dict:
        return dict(self.gamma)

    def to_json(self):
        from .syntax import term_to_sexpr
        return {"template": to_sexpr(self.template),
                "gamma": {v: term_to_sexpr(t) for v, t in self.gamma},
                "bound_renaming": dict(self.bound_renaming)}


def structural_template(phi) -> StructuralTemplate:
    """Abstract shape with recovery data.  Idempotent on its own output."""
    counter = [0]
    gamma = []
    renaming = []

    def fresh():
        name = "v%d" % counter[0]
        counter[0] += 1
        return name

    def abstract_term(t, bound: dict):
        if not (term_vars(t) & set(bound)):
            name = fresh()
            gamma.append((name, t))
            return Var(name)
        if isinstance(t, Var):
            return Var(bound[t.name])
        if isinstance(t, (Plus, Times)):
            return type(t)(abstract_term(t.left, bound),
                           abstract_term(t.right, bound))
        raise RegularityError("constant inside bound context? %r" % (t,))

    def go(f, bound: dict):
        if isinstance(f, Eq):
            return Eq(abstract_term(f.left, bound), abstract_term(f.right, bound))
        if isinstance(f, Not):
            return Not(go(f.body, bound))
        if isinstance(f, (Or, And)):
            return type(f)(go(f.left, bound), go(f.right, bound))
        if isinstance(f, (Exists, Forall)):
            name = fresh()
            renaming.append((name, f.var))
            inner = dict(bound)
            inner[f.var] = name
            return type(f)(name, go(f.body, inner))
        raise RegularityError("not a formula: %r" % (f,))

    template = go(phi, {})
    return StructuralTemplate(template, tuple(gamma), tuple(renaming))


def recover(st: StructuralTemplate):
    """Substitute gamma back; equals the original up to bound renaming."""
    return substitute(st.template, st.gamma_map())


def structurally_similar(phi, psi) -> bool:
    return structural_template(phi).template == structural_template(psi).template


def hat_assignment(st: StructuralTemplate, alpha: Assignment,
                   universe: GapUniverse = None) -> Assignment:
    """Template variables get the values their gamma terms take under alpha."""
    out = {}
    for v, t in st.gamma:
        out[v] = eval_term(t, alpha, universe)
    return Assignment(out)


def hat_pair(phi, alpha: Assignment, universe: GapUniverse = None):
    st = structural_template(phi)
    return st.template, hat_assignment(st, alpha, universe)


def is_regular(S: SatClass) -> VerificationReport:
    """Every valued (phi, alpha) must agree with its (template, hat) entry;
    symbolic rays must agree with their template rays (hat flag)."""
    bad = []
    checked = 0
    for (f, alpha), v in list(S.table.items()):
        if isinstance(f, Piece):
            continue
        try:
            t, a = hat_pair(f, alpha, S.universe)
        except Exception as e:
            bad.append(("regular-untemplatable", f, alpha, str(e)))
            continue
        w = S.value(t, a)
        if w is None:
            bad.append(("regular-missing", f, alpha, to_sexpr(t)))
            continue
        checked += 1
        if w != v:
            bad.append(("regular", f, alpha, v, w))
    for key, v in list(S.ray_table.items()):
        op_id, pos, gap, base, hat = key
        if hat:
            continue
        mate = S.ray_table.get((op_id, pos, gap, base, True))
        if mate is None:
            bad.append(("regular-missing-ray", key))
            continue
        checked += 1
        if mate != v:
            bad.append(("regular-ray", key, v, mate))
    return VerificationReport(not bad, bad, checked)


# ---------------------------------------------------------- X-satisfaction

def theta_carrier(op: Operator):
    """theta must be a true atomic sentence or the negation of one; its two
    closed terms then share a value a, making hat assignments constant."""
    theta = op.theta
    flip = False
    atom = theta
    if isinstance(atom, Not):
        atom, flip = atom.body, True
    if not isinstance(atom, Eq) or free_vars(theta):
        raise RegularityError("theta must be a closed literal")
    a = eval_term(atom.left, EMPTY)
    if eval_term(atom.right, EMPTY) != a:
        raise RegularityError(
            "theta's terms must share a value for constant hat assignments")
    return a, (not flip)  # carrier value, truth of theta


def x_satisfies(piece: Piece, alpha: Assignment, X, x: GapNumber,
                universe: GapUniverse = None) -> bool:
    """Evaluate the piece's template with the F(x)-occurrence replaced by a
    fixed truth (x in X) and theta occurrences by theta's truth value.  Only
    x at standard distance below the piece's index is admissible, and the
    verdict is independent of which such x is chosen."""
    op = piece.op
    if op.mode != "local":
        raise RegularityError("X-satisfaction is defined for local operators")
    _, theta_truth = theta_carrier(op)
    in_x = _x_membership(X, x, universe)
    if x.gap != piece.index.gap or x.offset > piece.index.offset:
        raise RegularityError("x must lie a standard distance below the index")
    node = op.positions()[piece.pos]
    # unfolding k root layers preserves the verdict: assert on small k
    vals = {eval_template(node, theta_truth, _chain(op, theta_truth, in_x, k))
            for k in range(3)}
    if len(vals) != 1:
        raise RegularityError("x-independence failed for %r" % (piece,))
    return vals.pop()


def _chain(op: Operator, p: bool, q: bool, k: int) -> bool:
    for _ in range(k):
        q = eval_template(op.template, p, q)
    return q


def _x_membership(X, x: GapNumber, universe):
    if hasattr(X, "contains"):
        return X.contains(universe, x)
    return (x.gap in X) if not x.is_standard() else (STANDARD in X)


# --------------------------------------------------------- regular classes

def build_regular_class(universe: GapUniverse, op: Operator, X,
                        extra=(), base: SatClass = None) -> SatClass:
    """Finite stage of the regular pathological class.

    X: set of gap labels where T(F(x)) is to be equivalent to T(theta) (the
    standard segment is always equivalent and is implied).  Standard-complexity
    sentences are valued semantically, base values are preserved (conflicts
    error out), and intermediate pieces by X-satisfaction; every entry is
    mirrored on its structural template so the class is regular by
    construction.
    """
    a, theta_truth = theta_carrier(op)
    X = set(X) - {STANDARD}
    for g in X:
        universe.gap_pos(g)
    # per-gap truth of F(x): equivalent gaps follow theta, others break it
    gap_truth = {g: (theta_truth if g in X else (not theta_truth))
                 for g in universe.gap_labels}

    gens = [iterate(op, GapNumber(g, 0)) for g in universe.gap_labels]
    from .closure import cl
    domain = cl(list(extra) + gens, ops=[op])

    S = SatClass(universe, domain=domain, ops=(op,))

    def put(f, alpha, v, source):
        old = S.table.get((f, alpha))
        if old is not None and old != v:
            raise RegularityError("conflict at %s from %s" % (to_sexpr(f), source))
        S.table[(f, alpha)] = v
        t, ahat = hat_pair(f, alpha, universe)
        old = S.table.get((t, ahat))
        if old is not None and old != v:
            raise RegularityError("template conflict at %s" % to_sexpr(t))
        S.table[(t, ahat)] = v

    for f in sorted(domain.explicit, key=to_sexpr):
        v = eval_formula(f, EMPTY, universe)
        if base is not None:
            w = base.value(f, EMPTY)
            if w is not None and w != v:
                raise RegularityError("base conflicts with semantics at %s"
                                      % to_sexpr(f))
        put(f, EMPTY, v, "semantics")

    # a few materialized standard iterates keep the forced segment visible
    for n in range(min(3, op.unfolding_bound)):
        f = iterate(op, n)
        if not isinstance(f, Piece):
            put(f, EMPTY, theta_truth, "standard-forcing")

    for ray in domain.rays:
        if ray.op != op:
            continue
        q_val = gap_truth[ray.gap]  # truth of the F(x-1) occupant at this gap
        node = op.positions()[ray.pos]
        v = eval_template(node, theta_truth, q_val)
        S.ray_table[ray_key_tuple(op, ray.pos, ray.gap, None, False)] = v
        S.ray_table[ray_key_tuple(op, ray.pos, ray.gap, None, True)] = v

    rep = verify_comp(S)
    if not rep.ok:
        raise RegularityError("regular stage failed verification: %r"
                              % rep.violations[:3])
    reg = is_regular(S)
    if not reg.ok:
        raise RegularityError("regular stage is not regular: %r"
                              % reg.violations[:3])
    return S


def ray_key_tuple(op, pos, gap, base, hat):
    return (op.id, pos, gap, base, hat)
