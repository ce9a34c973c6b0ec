"""Idempotent sentential operators.

A template is a propositional shape over leaves p and q built from not/or/and
and dummy-variable quantifiers.  An operator iterates its template:

  local      F(0) = theta,      F(x+1) = Phi(theta, F(x))
  nonlocal   F(0, phi) = phi,   F(x+1, phi) = Phi(phi, F(x, phi))

Iterates at nonstandard (or large standard) indices are kept symbolic as
Piece nodes: a Piece names a template position together with a gap index, and
stands for that position's subformula inside the x-th unfolding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import syntax as syn
from .gapnum import GapNumber, GapUniverse, std
from .syntax import (Assignment, EMPTY, Eq, Not, Or, And, Exists, Forall,
                     ParseError, eval_term, free_vars, is_formula)


class TemplateError(ValueError):
    pass


# ------------------------------------------------------------- templates

@dataclass(frozen=True)
class P:
    def __repr__(self):
        return "p"


@dataclass(frozen=True)
class Q:
    def __repr__(self):
        return "q"


@dataclass(frozen=True)
class TNot:
    body: object


@dataclass(frozen=True)
class TOr:
    left: object
    right: object


@dataclass(frozen=True)
class TAnd:
    left: object
    right: object


@dataclass(frozen=True)
class TQuant:
    kind: str  # "exists" | "forall"
    var: str
    body: object


def parse_template(text: str):
    from .syntax import _read_all  # shared s-expression reader

    def go(sx):
        if sx == "p":
            return P()
        if sx == "q":
            return Q()
        if isinstance(sx, list) and sx:
            if sx[0] == "not" and len(sx) == 2:
                return TNot(go(sx[1]))
            if sx[0] in ("or", "and") and len(sx) == 3:
                cls = TOr if sx[0] == "or" else TAnd
                return cls(go(sx[1]), go(sx[2]))
            if sx[0] in ("exists", "forall") and len(sx) == 3 and isinstance(sx[1], str):
                return TQuant(sx[0], sx[1], go(sx[2]))
        raise ParseError("bad template %r" % (sx,))

    return go(_read_all(text))


def template_to_sexpr(t) -> str:
    if isinstance(t, P):
        return "p"
    if isinstance(t, Q):
        return "q"
    if isinstance(t, TNot):
        return "(not %s)" % template_to_sexpr(t.body)
    if isinstance(t, TOr):
        return "(or %s %s)" % (template_to_sexpr(t.left), template_to_sexpr(t.right))
    if isinstance(t, TAnd):
        return "(and %s %s)" % (template_to_sexpr(t.left), template_to_sexpr(t.right))
    return "(%s %s %s)" % (t.kind, t.var, template_to_sexpr(t.body))


def template_size(t) -> int:
    """Number of connectives/quantifiers."""
    if isinstance(t, (P, Q)):
        return 0
    if isinstance(t, (TNot, TQuant)):
        return 1 + template_size(t.body)
    return 1 + template_size(t.left) + template_size(t.right)


def template_depth(t) -> int:
    if isinstance(t, (P, Q)):
        return 0
    if isinstance(t, (TNot, TQuant)):
        return 1 + template_depth(t.body)
    return 1 + max(template_depth(t.left), template_depth(t.right))


def leaf_occurs(t, leaf) -> bool:
    if isinstance(t, leaf):
        return True
    if isinstance(t, (TNot, TQuant)):
        return leaf_occurs(t.body, leaf)
    if isinstance(t, (TOr, TAnd)):
        return leaf_occurs(t.left, leaf) or leaf_occurs(t.right, leaf)
    return False


def eval_template(t, p: bool, q: bool) -> bool:
    """Truth value; dummy quantifiers are transparent (closed substituends)."""
    if isinstance(t, P):
        return p
    if isinstance(t, Q):
        return q
    if isinstance(t, TNot):
        return not eval_template(t.body, p, q)
    if isinstance(t, TOr):
        return eval_template(t.left, p, q) or eval_template(t.right, p, q)
    if isinstance(t, TAnd):
        return eval_template(t.left, p, q) and eval_template(t.right, p, q)
    return eval_template(t.body, p, q)


def positions(t, prefix=()) -> dict:
    """All subtemplate positions: path tuple -> subtemplate."""
    out = {prefix: t}
    if isinstance(t, (TNot, TQuant)):
        out.update(positions(t.body, prefix + (0,)))
    elif isinstance(t, (TOr, TAnd)):
        out.update(positions(t.left, prefix + (0,)))
        out.update(positions(t.right, prefix + (1,)))
    return out


# ----------------------------------------------------------- validation

OR_PQ = "or_pq"
AND_PQ = "and_pq"
JUST_Q = "just_q"


@dataclass(frozen=True)
class TemplateClass:
    shape: str  # OR_PQ | AND_PQ | JUST_Q | None (local-only templates)
    q_monotone: bool
    kind: str  # "accessible" | "additive"

    def to_json(self):
        return {"shape": self.shape, "q_monotone": self.q_monotone, "kind": self.kind}


def theta_truth(theta) -> bool:
    """Truth value of a closed atomic or negated-atomic sentence."""
    f = theta
    neg = False
    if isinstance(f, Not):
        f, neg = f.body, True
    if not isinstance(f, Eq) or free_vars(theta):
        raise TemplateError("theta must be a closed literal: %r" % (theta,))
    val = eval_term(f.left, EMPTY) == eval_term(f.right, EMPTY)
    return val != neg


def _shape_of(t):
    rows = {(p, q): eval_template(t, p, q) for p in (0, 1) for q in (0, 1)}
    for shape, fn in ((OR_PQ, lambda p, q: p or q),
                      (AND_PQ, lambda p, q: p and q),
                      (JUST_Q, lambda p, q: bool(q))):
        if all(rows[(p, q)] == bool(fn(p, q)) for p in (0, 1) for q in (0, 1)):
            return shape
    return None


def validate_template(template, mode: str, theta=None) -> TemplateClass:
    """Check the defining laws and classify.

    local:     Phi(T, q) == q when theta is true, Phi(F, q) == q when false.
    nonlocal:  q occurs; Phi not equivalent to p; p,q |= Phi; -p,-q |= -Phi.
    """
    if template_size(template) < 1:
        raise TemplateError("template must contain a connective")
    if not leaf_occurs(template, Q):
        raise TemplateError("q must occur in the template")
    kind = "accessible" if leaf_occurs(template, P) else "additive"
    shape = _shape_of(template)
    if mode == "local":
        if theta is None:
            raise TemplateError("local mode needs theta")
        tv = theta_truth(theta)
        for q in (False, True):
            if eval_template(template, tv, q) != q:
                raise TemplateError("local law fails at q=%s for theta %s"
                                    % (q, syn.to_sexpr(theta)))
        q_monotone = shape in (OR_PQ, JUST_Q) if shape else False
        return TemplateClass(shape, q_monotone, kind)
    if mode == "nonlocal":
        if all(eval_template(template, p, q) == p for p in (0, 1) for q in (0, 1)):
            raise TemplateError("template equivalent to p")
        if not eval_template(template, True, True):
            raise TemplateError("p,q must entail the template")
        if eval_template(template, False, False):
            raise TemplateError("-p,-q must entail the negated template")
        if shape is None:
            raise TemplateError("valid template escaped the three shapes")
        return TemplateClass(shape, shape in (OR_PQ, JUST_Q), kind)
    raise TemplateError("mode must be local or nonlocal: %r" % mode)


# -------------------------------------------------------------- operator

def _tfv(t) -> set:
    if isinstance(t, TQuant):
        return _tfv(t.body) | {t.var}
    if isinstance(t, (TNot,)):
        return _tfv(t.body)
    if isinstance(t, (TOr, TAnd)):
        return _tfv(t.left) | _tfv(t.right)
    return set()


@dataclass(frozen=True)
class Operator:
    id: str
    template: object
    mode: str  # "local" | "nonlocal"
    theta: object = None  # local only
    tclass: TemplateClass = None
    unfolding_bound: int = 16

    def __post_init__(self):
        if self.tclass is None:
            object.__setattr__(self, "tclass",
                               validate_template(self.template, self.mode, self.theta))
        if self.mode == "local":
            for v in _tfv(self.template):
                if v in free_vars(self.theta):
                    raise TemplateError("dummy variable %s captures theta" % v)

    def __eq__(self, other):
        return isinstance(other, Operator) and self.id == other.id

    def __hash__(self):
        return hash(("op", self.id))

    @property
    def q_monotone(self):
        return self.tclass.q_monotone

    @property
    def kind(self):
        return self.tclass.kind

    def positions(self):
        return positions(self.template)

    def q_leaf_positions(self):
        return [pos for pos, t in self.positions().items() if isinstance(t, Q)]

    def p_leaf_positions(self):
        return [pos for pos, t in self.positions().items() if isinstance(t, P)]

    def theta_value(self) -> bool:
        if self.mode != "local":
            raise TemplateError("theta value only defined for local operators")
        return theta_truth(self.theta)

    def to_json(self):
        out = {"id": self.id, "template": template_to_sexpr(self.template),
               "mode": self.mode, "class": self.tclass.to_json(),
               "unfolding_bound": self.unfolding_bound}
        if self.theta is not None:
            out["theta"] = syn.to_sexpr(self.theta)
        return out


def make_operator(op_id: str, template_text: str, mode: str, theta_text=None,
                  unfolding_bound: int = 16) -> Operator:
    theta = syn.parse_formula(theta_text) if theta_text else None
    return Operator(op_id, parse_template(template_text), mode, theta,
                    unfolding_bound=unfolding_bound)


def double_negation_operator(unfolding_bound: int = 16) -> Operator:
    """The (not (not q)) operator used for deep-negation towers."""
    return make_operator("dneg", "(not (not q))", "nonlocal",
                         unfolding_bound=unfolding_bound)


# ----------------------------------------------------------------- pieces

@dataclass(frozen=True)
class Piece:
    """Template position `pos` of the `index`-th unfolding of op.

    For nonlocal operators `base` is the iterated sentence (itself possibly
    symbolic); local operators carry base=None and use theta.
    Invariant: index is nonstandard or >= the operator's unfolding bound,
    and pos never addresses a p- or q-leaf (those normalize away).
    """

    op: Operator
    pos: tuple
    index: GapNumber
    base: object = None

    def __repr__(self):
        b = "" if self.base is None else ", %r" % (self.base,)
        return "%s[%s]@%r%s" % (self.op.id, "/".join(map(str, self.pos)) or ".",
                                self.index, b)


def is_symformula(x) -> bool:
    return is_formula(x) or isinstance(x, Piece)


def sym_free_vars(f) -> set:
    if isinstance(f, Piece):
        base = f.op.theta if f.base is None else f.base
        return sym_free_vars(base)
    return free_vars(f)


def instantiate(template, p_formula, q_formula):
    """Substitute formulas for the template leaves."""
    if isinstance(template, P):
        if p_formula is None:
            raise TemplateError("template has a p leaf but no p substituend")
        return p_formula
    if isinstance(template, Q):
        return q_formula
    if isinstance(template, TNot):
        return Not(instantiate(template.body, p_formula, q_formula))
    if isinstance(template, TOr):
        return Or(instantiate(template.left, p_formula, q_formula),
                  instantiate(template.right, p_formula, q_formula))
    if isinstance(template, TAnd):
        return And(instantiate(template.left, p_formula, q_formula),
                   instantiate(template.right, p_formula, q_formula))
    cls = Exists if template.kind == "exists" else Forall
    return cls(template.var, instantiate(template.body, p_formula, q_formula))


def iterate(op: Operator, x, phi=None):
    """F(x) (local) or F(x, phi) (nonlocal).  Standard small x materializes to
    a concrete formula; anything else stays a symbolic root Piece."""
    if op.mode == "local":
        if phi is not None:
            raise TemplateError("local operators take no base argument")
        base = op.theta
    else:
        if phi is None:
            raise TemplateError("nonlocal operators need a base sentence")
        base = phi
    if isinstance(x, int):
        x = std(x)
    if x.is_standard() and x.offset < op.unfolding_bound and not isinstance(base, Piece):
        f = base
        for _ in range(x.offset):
            f = instantiate(op.template, base, f)
        return f
    return Piece(op, (), x, None if op.mode == "local" else base)


def make_piece(op: Operator, pos: tuple, index: GapNumber, base=None):
    """Normalizing Piece constructor: leaves resolve to their occupants."""
    node = op.positions().get(pos)
    if node is None:
        raise TemplateError("no position %r in template of %s" % (pos, op.id))
    if isinstance(node, P):
        return op.theta if op.mode == "local" else base
    if isinstance(node, Q):
        return iterate_at(op, index.shift(-1), base)
    if index.is_standard() and index.offset < op.unfolding_bound \
            and not isinstance(base, Piece):
        # materialize: the position's subformula of the concrete unfolding
        pbase = op.theta if op.mode == "local" else base
        prev = iterate(op, index.offset - 1, None if op.mode == "local" else base) \
            if index.offset >= 1 else None
        if prev is None:
            raise TemplateError("position pieces need index >= 1")
        return _subtemplate_formula(node, pbase, prev)
    return Piece(op, pos, index, None if op.mode == "local" else base)


def _subtemplate_formula(node, p_formula, q_formula):
    return instantiate(node, p_formula, q_formula)


def iterate_at(op: Operator, x: GapNumber, base=None):
    return iterate(op, x, None if op.mode == "local" else base)


def piece_children(piece: Piece) -> list:
    """Immediate subformulas of a Piece under the template reading."""
    op = piece.op
    node = op.positions()[piece.pos]
    if isinstance(node, (TNot, TQuant)):
        kids = [piece.pos + (0,)]
    else:
        kids = [piece.pos + (0,), piece.pos + (1,)]
    return [make_piece(op, k, piece.index, piece.base) for k in kids]


def piece_base(piece: Piece):
    return piece.op.theta if piece.base is None else piece.base


# -------------------------------------------------------- position classes

def classify_positions(op: Operator) -> dict:
    """Local operators: each template position, as a function of q at the fixed
    theta truth value, is q, not-q, top, or bottom."""
    tv = op.theta_value()
    out = {}
    for pos, node in op.positions().items():
        lo = eval_template(node, tv, False)
        hi = eval_template(node, tv, True)
        out[pos] = {(False, True): "q", (True, False): "not_q",
                    (True, True): "top", (False, False): "bot"}[(lo, hi)]
    return out


# ------------------------------------------------------------ root algebra

def _match_unfolding(op: Operator, f):
    """If f == Phi(a, b) for (unique) occupants a, b, return (a, b)."""
    p_occ = []
    q_occ = []

    def walk(node, g):
        if isinstance(node, P):
            p_occ.append(g)
            return True
        if isinstance(node, Q):
            q_occ.append(g)
            return True
        if isinstance(node, TNot):
            return isinstance(g, Not) and walk(node.body, g.body)
        if isinstance(node, TOr):
            return isinstance(g, Or) and walk(node.left, g.left) \
                and walk(node.right, g.right)
        if isinstance(node, TAnd):
            return isinstance(g, And) and walk(node.left, g.left) \
                and walk(node.right, g.right)
        cls = Exists if node.kind == "exists" else Forall
        return isinstance(g, cls) and g.var == node.var and walk(node.body, g.body)

    if not is_formula(f) or not walk(op.template, f):
        return None
    if any(a != q_occ[0] for a in q_occ) or any(a != p_occ[0] for a in p_occ):
        return None
    a = p_occ[0] if p_occ else None
    return a, q_occ[0]


def f_length_root(op: Operator, f):
    """Maximal decomposition f = F(length, root).

    Concrete formulas give an int length; a root Piece gives its symbolic
    index with the piece's base.  Non-root pieces are intermediate formulas
    with no maximal decomposition and raise TemplateError.
    """
    if isinstance(f, Piece):
        if f.op == op and f.pos == ():
            return f.index, piece_base(f)
        if f.op == op:
            raise TemplateError("intermediate piece has no F-length: %r" % (f,))
        return 0, f
    if op.kind == "accessible":
        m = _match_unfolding(op, f)
        if m is None:
            return 0, f
        a = m[0]

        def chain_length(g):
            # max k with F(k, a) == g, or None if g is not an a-iterate
            if g == a:
                return 0
            mm = _match_unfolding(op, g)
            if mm is None or mm[0] != a:
                return None
            rest = chain_length(mm[1])
            return None if rest is None else rest + 1

        n = chain_length(f)
        if not n:
            return 0, f
        return n, a
    # additive: peel while the shape matches
    n = 0
    cur = f
    while True:
        m = _match_unfolding(op, cur)
        if m is None:
            return n, cur
        n += 1
        cur = m[1]


def check_additivity(op: Operator, phi, bound: int = 8) -> bool:
    """F(x+y, phi) == F(x, F(y, phi)) for all x+y <= bound (additive ops only)."""
    if op.kind != "additive":
        raise TemplateError("additivity only holds for additive operators")
    for total in range(bound + 1):
        whole = iterate(op, total, phi)
        for x in range(total + 1):
            inner = iterate(op, total - x, phi)
            if iterate(op, x, inner) != whole:
                return False
    return True


def enumerate_templates(max_size: int, quantifier: bool = True):
    """Every template with at most max_size connectives (one dummy variable)."""
    by_size = {0: [P(), Q()]}
    for n in range(1, max_size + 1):
        batch = []
        for t in by_size[n - 1]:
            batch.append(TNot(t))
            if quantifier:
                batch.append(TQuant("exists", "y", t))
                batch.append(TQuant("forall", "y", t))
        for k in range(n):
            for a in by_size[k]:
                for b in by_size[n - 1 - k]:
                    batch.append(TOr(a, b))
                    batch.append(TAnd(a, b))
        by_size[n] = batch
    return list(itertools.chain.from_iterable(by_size.values()))
