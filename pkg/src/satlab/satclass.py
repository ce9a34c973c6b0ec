"""Partial satisfaction classes and their builders.

A SatClass stores boolean verdicts for (formula, assignment) pairs, plus a
ray table giving one constant verdict per (operator position, gap, base) ray
of symbolic iterate Pieces.  verify_comp checks the compositional clauses

  CS1  atomic by term values          CS3  negation flips
  CS2  disjunction (and conjunction)  CS4  quantifiers by witness search

locally on everything valued.  Builders realize the finite stages of the
pathology constructions: the unique class on the closure of a family of
iterates, rank-induction extension under a constraint theory, the
correctness-breaking extension, and the double-negation extension.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

from .closure import ClosedSet, Ray, cl, d_closure, immediate_subformulas, rank
from .gapnum import (STANDARD, GapError, GapNumber, GapUniverse,
                     UnrepresentableError, std)
from .operators import (AND_PQ, JUST_Q, OR_PQ, Operator, Piece, TemplateError,
                        TNot, TOr, TAnd, TQuant, P, Q, classify_positions,
                        double_negation_operator, eval_template, f_length_root,
                        iterate, make_piece, piece_base, piece_children,
                        template_to_sexpr)
from .syntax import (EMPTY, And, Assignment, Eq, Exists, Forall, Not, Or,
                     Var, eval_formula, eval_term, free_vars, is_formula,
                     or_disjuncts, restrict_assignment, to_sexpr)

ORACLE_BOUND_ENV = "SATLAB_ORACLE_BOUND"
DEFAULT_ORACLE_BOUND = 2 ** 24


class SatClassError(ValueError):
    pass


class InconsistentTheoryError(SatClassError):
    def __init__(self, violations, core=None):
        self.violations = violations
        self.core = core or []
        msg = "; ".join(str(v) for v in violations[:4])
        super().__init__("inconsistent theory fragment: %s" % msg)


def ray_key(piece: Piece, hat: bool = False):
    return (piece.op.id, piece.pos, piece.index.gap, piece.base, hat)


def ray_key_of(ray: Ray, hat: bool = False):
    return (ray.op.id, ray.pos, ray.gap, ray.base, hat)


@dataclass
class SatClass:
    universe: GapUniverse
    table: dict = field(default_factory=dict)       # (formula, Assignment) -> bool
    ray_table: dict = field(default_factory=dict)   # ray_key -> bool
    domain: ClosedSet = None
    ops: tuple = ()

    def value(self, f, alpha: Assignment = EMPTY, hat: bool = False):
        if isinstance(f, Piece):
            return self.ray_table.get(ray_key(f, hat))
        return self.table.get((f, alpha))

    def set(self, f, alpha: Assignment, v: bool, hat: bool = False):
        if isinstance(f, Piece):
            self.ray_table[ray_key(f, hat)] = v
        else:
            self.table[(f, alpha)] = v

    def truth(self, f):
        """T(f) := S(f, empty assignment)."""
        return self.value(f, EMPTY)

    def copy(self) -> "SatClass":
        return SatClass(self.universe, dict(self.table), dict(self.ray_table),
                        self.domain, self.ops)

    def entries(self):
        return list(self.table.items()) + list(self.ray_table.items())

    def to_json(self):
        tab = []
        for (f, a), v in sorted(self.table.items(),
                                key=lambda kv: (to_sexpr(kv[0][0]), repr(kv[0][1]))):
            tab.append({"formula": to_sexpr(f), "assignment": a.to_json(),
                        "value": v})
        rays = []
        for (op_id, pos, gap, base, hat), v in sorted(
                self.ray_table.items(), key=lambda kv: repr(kv[0])):
            rays.append({"op": op_id, "pos": list(pos), "gap": gap,
                         "base": _base_json(base), "hat": hat, "value": v})
        return {"universe": self.universe.to_json(), "table": tab, "rays": rays}


def _base_json(base):
    if base is None:
        return None
    if isinstance(base, Piece):
        return {"op": base.op.id, "pos": list(base.pos),
                "index": base.index.to_json(), "base": _base_json(base.base)}
    return to_sexpr(base)


# -------------------------------------------------------------- verification

@dataclass
class VerificationReport:
    ok: bool
    violations: list
    checked: int

    def to_json(self):
        return {"ok": self.ok, "checked": self.checked,
                "violations": [str(v) for v in self.violations[:50]]}


def _witnesses(universe: GapUniverse):
    return universe.gap_representatives()

def _quantifier_values(S: SatClass, f, alpha):
    vals = []
    for w in _witnesses(S.universe):
        beta = restrict_assignment(alpha.set(f.var, w), f.body)
        v = S.value(f.body, beta)
        if v is None:
            return None
        vals.append(v)
    return vals


def verify_comp(S: SatClass, nodes=None) -> VerificationReport:
    """Check every compositional clause whose participants are all valued."""
    bad = []
    checked = 0

    for (f, alpha), v in list(S.table.items()):
        if isinstance(f, Eq):
            try:
                expected = (eval_term(f.left, alpha, S.universe)
                            == eval_term(f.right, alpha, S.universe))
            except UnrepresentableError:
                continue
            checked += 1
            if v != expected:
                bad.append(("CS1", f, alpha, v, expected))
        elif isinstance(f, Not):
            w = S.value(f.body, restrict_assignment(alpha, f.body))
            if w is not None:
                checked += 1
                if v != (not w):
                    bad.append(("CS3", f, alpha, v, not w))
        elif isinstance(f, (Or, And)):
            a = S.value(f.left, restrict_assignment(alpha, f.left))
            b = S.value(f.right, restrict_assignment(alpha, f.right))
            if a is not None and b is not None:
                expected = (a or b) if isinstance(f, Or) else (a and b)
                checked += 1
                if v != expected:
                    bad.append(("CS2", f, alpha, v, expected))
        elif isinstance(f, (Exists, Forall)):
            vals = _quantifier_values(S, f, alpha)
            if vals is not None:
                expected = any(vals) if isinstance(f, Exists) else all(vals)
                checked += 1
                if v != expected:
                    bad.append(("CS4", f, alpha, v, expected))

    for key, v in list(S.ray_table.items()):
        op_id, pos, gap, base, hat = key
        op = _op_by_id(S, op_id)
        if op is None:
            continue
        rep = Piece(op, pos, GapNumber(gap, 0), base)
        node = op.positions()[pos]
        kid_vals = []
        missing = False
        for child in piece_children(rep):
            if isinstance(child, Piece):
                w = S.ray_table.get(ray_key(child, hat))
            else:
                w = S.value(child, EMPTY, hat=False) if not hat \
                    else _hat_value(S, child)
            if w is None:
                missing = True
                break
            kid_vals.append(w)
        if missing:
            continue
        if isinstance(node, TNot):
            expected = not kid_vals[0]
            clause = "CS3"
        elif isinstance(node, TOr):
            expected = kid_vals[0] or kid_vals[1]
            clause = "CS2"
        elif isinstance(node, TAnd):
            expected = kid_vals[0] and kid_vals[1]
            clause = "CS2"
        else:  # dummy quantifier over a sentence: transparent
            expected = kid_vals[0]
            clause = "CS4"
        checked += 1
        if v != expected:
            bad.append((clause, key, EMPTY, v, expected))

    return VerificationReport(not bad, bad, checked)


def _op_by_id(S: SatClass, op_id):
    for op in S.ops:
        if op.id == op_id:
            return op
    return None


def _hat_value(S: SatClass, f):
    """Value of the structural template of a concrete sentence under its hat
    assignment, if stored."""
    from .regularity import hat_pair
    try:
        t, a = hat_pair(f, EMPTY)
    except Exception:
        return None
    return S.value(t, a)


# ---------------------------------------------------------- constraint theory

@dataclass(frozen=True)
class TheoryEntry:
    op: Operator
    bound: GapNumber
    mode: str  # "correct_below" | "trivial_above" | "incorrect_above"


@dataclass
class ConstraintTheory:
    universe: GapUniverse
    entries: tuple = ()
    base: SatClass = None  # values to preserve

    def ops(self):
        seen = []
        for e in self.entries:
            if e.op not in seen:
                seen.append(e.op)
        return seen


def _stage_repr(length, base_gap_offset=None):
    """A GapNumber standing for an iterate length (int or symbolic)."""
    if isinstance(length, GapNumber):
        return length
    return std(length)


def _diff_scale(universe, a: GapNumber, b: GapNumber):
    """Scale of a - b (a > b): same gap gives the exact standard difference,
    otherwise the higher gap dominates."""
    if a.gap == b.gap:
        return std(abs(a.offset - b.offset))
    hi = a if universe.gap_pos(a.gap) > universe.gap_pos(b.gap) else b
    return GapNumber(hi.gap, hi.offset)


def _cmp_bound(universe, diff: GapNumber, d: GapNumber) -> str:
    """Position of an iterate-length difference against a bound: 'below',
    'above', or raises when they share a gap (outside the decidable fragment
    unless literally comparable)."""
    if diff.gap == d.gap and not diff.is_standard():
        raise UnrepresentableError(
            "difference and bound share gap %r" % diff.gap)
    return "below" if universe.lt(diff, d) else "above"


def _iterate_stages(S_nodes, op):
    """Group valued nodes by (root, assignment): list of (stage GapNumber, node).

    S_nodes: iterable of node descriptors:
      ("x", formula, assignment) or ("ray", op_id, gap, base) for root rays.
    """
    groups = {}
    for nd in S_nodes:
        if nd[0] == "x":
            _, f, alpha = nd
            if isinstance(f, Piece):
                continue
            try:
                length, root = f_length_root(op, f)
            except TemplateError:
                continue
            groups.setdefault((root, alpha), []).append((std(length), nd))
        elif nd[1] == op.id:
            _, _, gap, base = nd
            root = base if base is not None else op.theta
            groups.setdefault((root, EMPTY), []).append(
                (GapNumber(gap, 0), nd))
    return groups


def check_constraints(S: SatClass, th: ConstraintTheory, nodes=None) -> list:
    """Violations of the theory's correctness/triviality schemes and of base
    preservation, over everything valued.

    Correctness below the bound relates later stages to earlier ones of the
    same root (for accessible operators only to the root itself); triviality
    and incorrectness above the bound constrain stages by their absolute
    length from the fully peeled root.
    """
    bad = []
    descriptors = _node_descriptors(S)

    for entry in th.entries:
        op = entry.op
        groups = _iterate_stages(descriptors, op)
        for (root, alpha), stages in groups.items():
            order = {STANDARD: -1}
            order.update({g: S.universe.gap_pos(g) for g in S.universe.gap_labels})
            stages = sorted(stages, key=lambda t: (order[t[0].gap], t[0].offset))
            root_val = None
            if stages and stages[0][0] == std(0):
                root_val = _node_value(S, stages[0][1])
            for si, (xi, ndi) in enumerate(stages):
                vi = _node_value(S, ndi)
                if vi is None:
                    continue
                if xi != std(0):
                    try:
                        side = _cmp_bound(S.universe, xi, entry.bound)
                    except UnrepresentableError:
                        side = None
                    if side == "above" and entry.mode == "trivial_above" \
                            and vi != op.q_monotone:
                        bad.append(("trivial_above", op.id, ndi, op.q_monotone))
                    if side == "above" and entry.mode == "incorrect_above" \
                            and root_val is not None and vi != (not root_val):
                        bad.append(("incorrect_above", op.id, ndi, root_val))
                if entry.mode != "correct_below":
                    continue
                for xj, ndj in stages[:si]:
                    if xj == xi:
                        continue
                    if op.kind == "accessible" and xj != std(0):
                        continue
                    vj = _node_value(S, ndj)
                    if vj is None:
                        continue
                    try:
                        diff = _diff_scale(S.universe, xi, xj)
                        side = _cmp_bound(S.universe, diff, entry.bound)
                    except UnrepresentableError:
                        continue
                    if side == "below" and vi != vj:
                        bad.append(("correct_below", op.id, ndi, ndj))

    if th.base is not None:
        for (f, alpha), v in th.base.table.items():
            w = S.table.get((f, alpha))
            if w is not None and w != v:
                bad.append(("preservation", f, alpha, w, v))
        for key, v in th.base.ray_table.items():
            w = S.ray_table.get(key)
            if w is not None and w != v:
                bad.append(("preservation", key, w, v))
    return bad


def _node_descriptors(S: SatClass):
    out = [("x", f, a) for (f, a) in S.table]
    for (op_id, pos, gap, base, hat) in S.ray_table:
        if pos == () and not hat:
            out.append(("ray", op_id, gap, base))
    return out


def _node_value(S: SatClass, nd):
    if nd[0] == "x":
        return S.table.get((nd[1], nd[2]))
    _, op_id, gap, base = nd
    return S.ray_table.get((op_id, (), gap, base, False))


# ------------------------------------------------------------ node collection

def _collect_nodes(universe: GapUniverse, C, ops, max_nodes=4000):
    """Expand a finite seed set into (formula, assignment) nodes plus root-ray
    nodes, closing concrete formulas under immediate subformulas (quantifiers
    via the universe's witnesses)."""
    explicit = []
    explicit_seen = set()
    rays = []  # (op, gap, base)
    ray_seen = set()
    work = []
    for f in C:
        work.append((f, EMPTY))

    while work:
        f, alpha = work.pop()
        if isinstance(f, Piece):
            op = f.op
            key = (op.id, f.index.gap, f.base)
            base = piece_base(f)
            if key not in ray_seen:
                ray_seen.add(key)
                rays.append((op, f.index.gap, f.base))
                work.append((base, EMPTY))
            continue
        alpha = restrict_assignment(alpha, f)
        if (f, alpha) in explicit_seen:
            continue
        explicit_seen.add((f, alpha))
        explicit.append((f, alpha))
        if len(explicit) > max_nodes:
            raise SatClassError("node expansion exceeded %d" % max_nodes)
        if isinstance(f, Not):
            work.append((f.body, alpha))
        elif isinstance(f, (Or, And)):
            work.append((f.left, alpha))
            work.append((f.right, alpha))
        elif isinstance(f, (Exists, Forall)):
            for w in _witnesses(universe):
                work.append((f.body, alpha.set(f.var, w)))
    return explicit, rays


# ------------------------------------------------------- rank-order building

def extend_with_constraints(th: ConstraintTheory, C) -> SatClass:
    """Build a class on (the subformula closure of) C satisfying the theory.

    Values are assigned in rank order: base preservation first, atomic
    evaluation second, triviality above the bound third; above minimal rank,
    compositionality when the children are valued, else the root rule
    S(F(a,b)) = S(b) below the bound / the triviality value above it, and
    everything untouched defaults to false.  The result is verified; a
    failure raises InconsistentTheoryError with a minimal conflicting subset
    of theory entries.
    """
    S = _build_by_rank(th, C)
    vio = verify_comp(S).violations + check_constraints(S, th)
    if vio:
        core = _minimal_core(th, C, vio)
        raise InconsistentTheoryError(vio, core)
    return S


def _minimal_core(th: ConstraintTheory, C, vio):
    core = list(th.entries)
    keep_base = th.base is not None
    changed = True
    while changed:
        changed = False
        for e in list(core):
            trial = ConstraintTheory(th.universe, tuple(x for x in core if x != e),
                                     th.base if keep_base else None)
            S = _build_by_rank(trial, C)
            if verify_comp(S).violations or check_constraints(S, trial):
                core.remove(e)
                changed = True
    if keep_base:
        trial = ConstraintTheory(th.universe, tuple(core), None)
        S = _build_by_rank(trial, C)
        if not (verify_comp(S).violations or check_constraints(S, trial)):
            core.append("base-preservation")
    return core


def _build_by_rank(th: ConstraintTheory, C) -> SatClass:
    universe = th.universe
    ops = list(th.ops())
    for f in C:
        if isinstance(f, Piece) and f.op not in ops:
            ops.append(f.op)
    explicit, rays = _collect_nodes(universe, C, ops)

    # rank over concrete formulas; ray nodes depend only on their base
    node_objs = [f for f, _ in explicit]
    ranks = rank(set(node_objs), ops=ops)
    explicit.sort(key=lambda fa: (ranks[fa[0]], repr(fa)))

    S = SatClass(universe, ops=tuple(ops))

    def assign_concrete(f, alpha):
        if th.base is not None:
            v = th.base.table.get((f, alpha))
            if v is not None:
                return v
        if isinstance(f, Eq):
            try:
                return (eval_term(f.left, alpha, universe)
                        == eval_term(f.right, alpha, universe))
            except UnrepresentableError:
                return False
        comp = _compositional_value(S, f, alpha)
        if comp is not None:
            return comp
        root_rule = _root_rule_value(S, th, f, alpha)
        if root_rule is not None:
            return root_rule
        return False

    for f, alpha in explicit:
        S.table[(f, alpha)] = assign_concrete(f, alpha)

    for op, gap, base in rays:
        key = (op.id, (), gap, base, False)
        if th.base is not None and key in th.base.ray_table:
            c = th.base.ray_table[key]
        else:
            c = _ray_root_value(S, th, op, gap, base)
        S.ray_table[key] = c
        root_base = piece_base(Piece(op, (), GapNumber(gap, 0), base))
        p_val = S.value(root_base, EMPTY)
        for pos, node in op.positions().items():
            if pos == () or isinstance(node, (P, Q)):
                continue
            k2 = (op.id, pos, gap, base, False)
            if th.base is not None and k2 in th.base.ray_table:
                S.ray_table[k2] = th.base.ray_table[k2]
            else:
                S.ray_table[k2] = eval_template(node,
                                                bool(p_val), c)
    return S


def _compositional_value(S: SatClass, f, alpha):
    if isinstance(f, Not):
        w = S.value(f.body, restrict_assignment(alpha, f.body))
        return None if w is None else not w
    if isinstance(f, (Or, And)):
        a = S.value(f.left, restrict_assignment(alpha, f.left))
        b = S.value(f.right, restrict_assignment(alpha, f.right))
        if a is None or b is None:
            return None
        return (a or b) if isinstance(f, Or) else (a and b)
    if isinstance(f, (Exists, Forall)):
        vals = _quantifier_values(S, f, alpha)
        if vals is None:
            return None
        return any(vals) if isinstance(f, Exists) else all(vals)
    return None


def _root_rule_value(S: SatClass, th: ConstraintTheory, f, alpha):
    for entry in th.entries:
        op = entry.op
        try:
            length, root = f_length_root(op, f)
        except TemplateError:
            continue
        if isinstance(length, int) and length == 0:
            continue
        x = _stage_repr(length)
        try:
            side = _cmp_bound(th.universe, x, entry.bound)
        except UnrepresentableError:
            continue
        v_root = S.value(root, restrict_assignment(alpha, root)) \
            if not isinstance(root, Piece) else S.value(root)
        if side == "below":
            if entry.mode in ("correct_below",) and v_root is not None:
                return v_root
        else:
            if entry.mode == "trivial_above":
                return op.q_monotone
            if entry.mode == "incorrect_above" and v_root is not None:
                return not v_root
    return None


def _ray_root_value(S: SatClass, th: ConstraintTheory, op, gap, base):
    root_base = piece_base(Piece(op, (), GapNumber(gap, 0), base))
    v_base = S.value(root_base, EMPTY)
    x = GapNumber(gap, 0)
    for entry in th.entries:
        if entry.op != op:
            continue
        try:
            side = _cmp_bound(th.universe, x, entry.bound)
        except UnrepresentableError:
            continue
        if side == "below" and entry.mode == "correct_below" \
                and v_base is not None:
            return v_base
        if side == "above" and entry.mode == "trivial_above":
            return op.q_monotone
        if side == "above" and entry.mode == "incorrect_above" \
                and v_base is not None:
            return not v_base
    # no applicable scheme: default (q-monotone triviality convention)
    return False


# ---------------------------------------------------------------- the oracle

def oracle_bound() -> int:
    return int(os.environ.get(ORACLE_BOUND_ENV, DEFAULT_ORACLE_BOUND))


def brute_force_oracle(universe: GapUniverse, C, th: ConstraintTheory = None,
                       extra_check=None, limit=None) -> list:
    """Every boolean table over the node expansion of C passing verify_comp,
    the theory's constraints, and extra_check.  Candidate count is capped."""
    th = th or ConstraintTheory(universe)
    ops = list(th.ops())
    for f in C:
        if isinstance(f, Piece) and f.op not in ops:
            ops.append(f.op)
    explicit, rays = _collect_nodes(universe, C, ops)
    sites = [("x", f, a) for f, a in explicit]
    for op, gap, base in rays:
        sites.append(("ray-root", op, gap, base))
        for pos, node in op.positions().items():
            if pos != () and not isinstance(node, (P, Q)):
                sites.append(("ray-pos", op, pos, gap, base))
    cap = limit if limit is not None else oracle_bound()
    if 2 ** len(sites) > cap:
        raise SatClassError("oracle space 2^%d exceeds bound %d"
                            % (len(sites), cap))

    solutions = []
    n = len(sites)
    for mask in range(2 ** n):
        S = SatClass(universe, ops=tuple(ops))
        for i, site in enumerate(sites):
            v = bool((mask >> i) & 1)
            if site[0] == "x":
                S.table[(site[1], site[2])] = v
            elif site[0] == "ray-root":
                _, op, gap, base = site
                S.ray_table[(op.id, (), gap, base, False)] = v
            else:
                _, op, pos, gap, base = site
                S.ray_table[(op.id, pos, gap, base, False)] = v
        if not verify_comp(S).ok:
            continue
        if check_constraints(S, th):
            continue
        if extra_check is not None and not extra_check(S):
            continue
        solutions.append(S)
    return solutions


def same_class(S1: SatClass, S2: SatClass) -> bool:
    return S1.table == S2.table and S1.ray_table == S2.ray_table


# ----------------------------------------------------- the uniqueness builder

def build_unique_pathological(universe: GapUniverse, op: Operator,
                              J0, J1) -> SatClass:
    """The unique class on Cl({F(x) : x in J0 u J1}) with F(x) true exactly
    on J0: positions classified q follow J0, not-q follow J1, top/bottom are
    constant, and the concrete part is forced by the semantics of theta."""
    if op.mode != "local":
        raise SatClassError("uniqueness construction is for local operators")
    J0, J1 = set(J0), set(J1)
    if J0 & J1:
        raise SatClassError("J0 and J1 must be disjoint")
    for g in J0 | J1:
        universe.gap_pos(g)  # raises on foreign gaps
        if g == STANDARD:
            raise SatClassError("J0/J1 must consist of nonstandard gaps")

    pclasses = classify_positions(op)
    gens = [iterate(op, GapNumber(g, 0)) for g in sorted(J0 | J1)]
    domain = cl(gens, ops=[op])

    S = SatClass(universe, domain=domain, ops=(op,))
    for f in domain.explicit:
        S.table[(f, EMPTY)] = eval_formula(f, EMPTY, universe)
    for ray in domain.rays:
        if ray.op != op:
            continue
        cls = pclasses[ray.pos]
        g = ray.gap
        v = {"q": g in J0, "not_q": g in J1,
             "top": True, "bot": False}[cls]
        S.ray_table[ray_key_of(ray)] = v
    rep = verify_comp(S)
    if not rep.ok:
        raise SatClassError("construction failed verification: %r"
                            % rep.violations[:3])
    return S


# ------------------------------------------------- breaking correctness at d1

@dataclass
class BreakResult:
    satclass: SatClass
    d0: GapNumber
    d1: GapNumber
    theta: Piece
    f_iterate: Piece


def extend_break_correctness(universe: GapUniverse, op: Operator,
                             S: SatClass, X: ClosedSet, phi_tilde,
                             d: GapNumber) -> BreakResult:
    """Extend an F-correct-below-d class so that correctness holds below d0
    but fails at d1 (d0 < d1 < d in distinct gaps): a deep-negation tower
    theta is valued by parity, F(d1, theta) gets the q-monotone triviality
    value, its closure follows suit, and earlier stages of X's iterates are
    copied downward (the decidable same-gap fragment of the d0-closure)."""
    if op.mode != "nonlocal":
        raise SatClassError("correctness breaking needs a nonlocal operator")
    pre = check_constraints(
        S, ConstraintTheory(universe,
                            (TheoryEntry(op, d, "correct_below"),)))
    if pre:
        raise SatClassError("base class is not F-correct below d: %r" % pre[:3])

    below = [g for g in universe.gap_labels
             if universe.gap_pos(g) < universe.gap_pos(d.gap)]
    if len(below) < 2:
        raise GapError("need two nonstandard gaps strictly below the bound")
    g0, g1 = below[-2], below[-1]
    d0, d1 = GapNumber(g0, 0), GapNumber(g1, 0)

    dneg = double_negation_operator()
    r = GapNumber(g0, 0)  # exceeds every standard complexity in X u {phi_tilde}
    if op.q_monotone:
        theta = make_piece(dneg, (0,), r.shift(1), base=Eq(*_zz()))
    else:
        theta = Piece(dneg, (), r, base=Eq(*_zz()))
    f_it = Piece(op, (), d1, base=theta)

    S2 = S.copy()
    S2.ops = tuple(dict.fromkeys(list(S.ops) + [op, dneg]))
    # deep-negation tower: even towers true, odd towers false
    S2.ray_table[(dneg.id, (), g0, theta.base, False)] = True
    S2.ray_table[(dneg.id, (0,), g0, theta.base, False)] = False
    S2.table[(Eq(*_zz()), EMPTY)] = True
    # F(d1, theta) and its within-gap closure
    v_f = op.q_monotone
    p_val = S2.value(theta)
    for pos, node in op.positions().items():
        if isinstance(node, (P, Q)):
            continue
        key = (op.id, pos, g1, theta, False)
        if pos == ():
            S2.ray_table.setdefault(key, v_f)
        else:
            S2.ray_table.setdefault(key, eval_template(node, bool(p_val), v_f))
    # earlier stages of X's concrete iterates (same-gap decidable fragment)
    if op.kind == "additive":
        zd = d_closure(X, d0, op, universe)
        for f in zd.explicit:
            if (f, EMPTY) in S2.table:
                continue
            length, root = f_length_root(op, f)
            top = _top_stage_value(S, op, root)
            if top is not None:
                S2.table[(f, EMPTY)] = top
    domain = cl([f for f, a in S2.table if a == EMPTY] + [f_it],
                ops=(op, dneg))
    S2.domain = domain

    rep = verify_comp(S2)
    post = check_constraints(
        S2, ConstraintTheory(universe,
                             (TheoryEntry(op, d0, "correct_below"),)))
    if not rep.ok or post:
        raise SatClassError("broken-correctness stage failed checks: %r"
                            % (rep.violations + post)[:3])
    if S2.value(f_it) == S2.value(theta):
        raise SatClassError("T(theta) and T(F(d1,theta)) failed to separate")
    return BreakResult(S2, d0, d1, theta, f_it)


def _zz():
    from .syntax import Zero
    return Zero(), Zero()


def _top_stage_value(S: SatClass, op, root):
    """Value of the highest valued iterate of `root` in S, if any."""
    best = None
    for (f, alpha), v in S.table.items():
        if alpha != EMPTY or isinstance(f, Piece):
            continue
        try:
            length, r = f_length_root(op, f)
        except TemplateError:
            continue
        if r == root and isinstance(length, int) and length >= 1:
            if best is None or length > best[0]:
                best = (length, v)
    for (op_id, pos, gap, base, hat), v in S.ray_table.items():
        if op_id == op.id and pos == () and base == root and not hat:
            return v
    return best[1] if best else None


# ----------------------------------------------------- double negation towers

def extend_double_negation(universe: GapUniverse, S: SatClass, C,
                           d: GapNumber) -> SatClass:
    """Value (not not)^x phi as phi below d and as (not phi) above d: the
    double-negation constraint theory run through the rank builder."""
    dneg = double_negation_operator()
    th = ConstraintTheory(universe,
                          (TheoryEntry(dneg, d, "correct_below"),
                           TheoryEntry(dneg, d, "incorrect_above")),
                          base=S)
    return extend_with_constraints(th, C)


# ---------------------------------------------------------- correctness sets

_SET_NAMES = (
    ("(or q p)", "local", "IDC"),
    ("(or p q)", "local", "IDC"),
    ("(or q q)", "local", "IDC-bin"),
    ("(and q p)", "local", "ICC"),
    ("(and p q)", "local", "ICC"),
    ("(not (not q))", "nonlocal", "DNC"),
)


def _set_name(op: Operator) -> str:
    text = template_to_sexpr(op.template)
    for pat, mode, name in _SET_NAMES:
        if text == pat and op.mode == mode:
            return name
    if isinstance(op.template, TQuant) and isinstance(op.template.body, Q):
        return "QC"
    return "FC(%s)" % op.id


def correctness_sets(S: SatClass, op: Operator) -> dict:
    """Which iterate indices the class treats correctly: per-gap membership of
    T(F(x)) == T(base), the standard segment, and disjunctive correctness over
    the explicit domain."""
    name = _set_name(op)
    entries = []
    for (op_id, pos, gap, base, hat), v in sorted(S.ray_table.items(),
                                                  key=lambda kv: repr(kv[0])):
        if op_id != op.id or pos != () or hat:
            continue
        base_f = base if base is not None else op.theta
        vb = S.value(base_f) if not isinstance(base_f, Piece) \
            else S.value(base_f)
        if vb is None:
            continue
        entries.append({"gap": gap, "correct": v == vb, "value": v})
    # standard segment: forced by compositionality whenever materialized
    std_correct = True
    if op.mode == "local":
        vb = S.value(op.theta)
        for (f, alpha), v in S.table.items():
            if alpha != EMPTY:
                continue
            try:
                length, root = f_length_root(op, f)
            except TemplateError:
                continue
            if root == op.theta and isinstance(length, int) and length >= 1 \
                    and vb is not None and v != vb:
                std_correct = False

    order = {g: i for i, g in enumerate(S.universe.gap_labels)}
    entries.sort(key=lambda e: order.get(e["gap"], -1))
    initial = ["standard"] if std_correct else []
    if std_correct:
        for e in entries:
            if e["correct"]:
                initial.append(e["gap"])
            else:
                break

    dc = []
    for (f, alpha), v in S.table.items():
        if alpha != EMPTY or not isinstance(f, Or):
            continue
        parts = or_disjuncts(f)
        vals = [S.value(p, restrict_assignment(EMPTY, p)) for p in parts]
        if any(x is None for x in vals):
            continue
        dc.append({"formula": to_sexpr(f), "holds": v == any(vals),
                   "width": len(parts)})

    return {"set": name, "operator": op.id, "standard_correct": std_correct,
            "gaps": entries, "initial_segment": initial,
            "dc_witnesses": sorted(dc, key=lambda e: e["formula"])}
