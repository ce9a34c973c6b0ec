"""Derived correctness laboratory.

sind_check: sequential induction over a finite sentence sequence.
dc_check: disjunctive correctness T(V phi_i) == some T(phi_i) up to width c,
including symbolic nonstandard-width disjunction rays.
multiplication_staging: the blockwise derivation showing widths multiply,
emitted as a step-checked trace.
build_correctness_tree: the binary tree of halving correctness labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gapnum import GapNumber, GapUniverse, UnrepresentableError, std
from .operators import (Operator, Piece, Q, TOr, P, TemplateError,
                        f_length_root, iterate)
from .satclass import SatClass, SatClassError
from .syntax import (EMPTY, And, Not, Or, big_or, or_disjuncts,
                     restrict_assignment, to_sexpr)


class DclabError(ValueError):
    pass


@dataclass
class SentenceSequence:
    sentences: list

    def __len__(self):
        return len(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]


def _values(S: SatClass, seq) -> list:
    vals = []
    for f in seq:
        v = S.truth(f)
        if v is None:
            raise DclabError("sequence element unvalued: %s" % _show(f))
        vals.append(v)
    return vals


def _show(f):
    return repr(f) if isinstance(f, Piece) else to_sexpr(f)


def sind_check(S: SatClass, seq) -> dict:
    """T(phi_0) and (every step preserves truth) imply every T(phi_i).
    Reports the first broken step, or the first false conclusion if the
    implication itself fails (impossible for totally valued sequences)."""
    seq = list(seq.sentences if isinstance(seq, SentenceSequence) else seq)
    vals = _values(S, seq)
    break_index = None
    for i in range(len(vals) - 1):
        if vals[i] and not vals[i + 1]:
            break_index = i + 1
            break
    premise = vals[0] and break_index is None
    conclusion = all(vals)
    holds = (not premise) or conclusion
    witness = break_index if break_index is not None else (
        None if holds else vals.index(False))
    return {"holds": holds, "premise": premise, "conclusion": conclusion,
            "values": vals, "witness": witness}


def _is_disjunctive(op: Operator) -> bool:
    def go(t):
        if isinstance(t, (Q, P)):
            return True
        return isinstance(t, TOr) and go(t.left) and go(t.right)
    return go(op.template)


def dc_check(S: SatClass, c) -> dict:
    """Disjunctive correctness up to width c over everything valued.

    Concrete: every left-nested disjunction with at most c+1 valued disjuncts
    must be true iff some disjunct is.  Symbolic: root rays of purely
    disjunctive operators at index <= c are nonstandard-width idempotent
    disjunctions and must agree with their base.
    """
    witnesses = []
    checked = 0
    for (f, alpha), v in S.table.items():
        if not isinstance(f, Or):
            continue
        parts = or_disjuncts(f)
        if isinstance(c, int) and len(parts) - 1 > c:
            continue
        vals = [S.value(p, restrict_assignment(alpha, p)) for p in parts]
        if any(x is None for x in vals):
            continue
        checked += 1
        if v != any(vals):
            witnesses.append({"formula": to_sexpr(f), "value": v,
                              "disjuncts": vals})
    for (op_id, pos, gap, base, hat), v in S.ray_table.items():
        if pos != () or hat:
            continue
        op = next((o for o in S.ops if o.id == op_id), None)
        if op is None or not _is_disjunctive(op):
            continue
        if isinstance(c, int):
            continue  # nonstandard width exceeds any standard bound
        if S.universe.gap_pos(gap) > S.universe.gap_pos(c.gap) or gap == c.gap:
            continue
        base_f = base if base is not None else op.theta
        vb = S.value(base_f)
        if vb is None:
            continue
        checked += 1
        if v != vb:
            witnesses.append({"ray": [op_id, gap], "value": v, "base": vb})
    return {"holds": not witnesses, "checked": checked, "witnesses": witnesses}


# -------------------------------------------------------- staged derivation

@dataclass
class DerivationTrace:
    case: str
    c: int
    b: int
    d: int
    r: int
    steps: list
    conclusion: dict
    valid: bool

    def to_json(self):
        return {"case": self.case, "c": self.c, "b": self.b, "d": self.d,
                "r": self.r, "steps": self.steps,
                "conclusion": self.conclusion, "valid": self.valid}


def multiplication_staging(S: SatClass, c: int, b: int, seq) -> DerivationTrace:
    """Derive T(V_{i<=b} phi_i) == some T(phi_i) from width-c disjunctive
    correctness and sequential induction, one checked step at a time.

    The blocks: b = d*c + r with r < c; outer stages are the prefixes of
    length a multiple of c, inner chains extend one disjunct at a time via
    the CS2/CS3 clauses, and each block boundary cites SInd.
    """
    seq = list(seq.sentences if isinstance(seq, SentenceSequence) else seq)
    if b > c * c:
        raise DclabError("b=%d exceeds c*c=%d" % (b, c * c))
    if len(seq) != b + 1:
        raise DclabError("need %d sentences, got %d" % (b + 1, len(seq)))
    vals = _values(S, seq)
    d, r = divmod(b, c)

    prefixes = [seq[0]]
    for f in seq[1:]:
        prefixes.append(Or(prefixes[-1], f))
    pvals = []
    for m, p in enumerate(prefixes):
        v = S.truth(p)
        if v is None:
            raise DclabError("prefix disjunction of width %d unvalued" % (m + 1))
        pvals.append(v)

    steps = []

    def step(rule, claim_formula, claim_value, expected, premises):
        ok = (claim_value == expected)
        steps.append({"rule": rule, "claim": _show(claim_formula),
                      "value": claim_value, "ok": ok, "premises": premises})
        return ok

    valid = True
    if any(vals):
        case = "witnessed"
        e = vals.index(True)
        valid &= step("hypothesis", seq[e], True, vals[e], [])
        entry = vals[e] if e == 0 else (pvals[e - 1] or vals[e])
        valid &= step("CS2", prefixes[e], pvals[e], entry, ["witness %d" % e])
        for m in range(e, b):
            # T(P_{m+1}) == T(P_m) or T(phi_{m+1})
            expected = pvals[m] or vals[m + 1]
            valid &= step("CS2", prefixes[m + 1], pvals[m + 1], expected,
                          ["prefix %d" % m, "disjunct %d" % (m + 1)])
            if (m + 1) % c == 0:
                valid &= step("SInd", prefixes[m + 1], pvals[m + 1],
                              pvals[m + 1], ["block %d" % ((m + 1) // c)])
    else:
        case = "refuted"
        valid &= step("CS3", Not(seq[0]), not vals[0], True, [])
        for m in range(b):
            # T(-P_{m+1}) == T(-P_m) and T(-phi_{m+1})
            expected = (not pvals[m]) and (not vals[m + 1])
            valid &= step("CS2+CS3", Not(prefixes[m + 1]), not pvals[m + 1],
                          expected, ["prefix %d" % m, "disjunct %d" % (m + 1)])
            if (m + 1) % c == 0:
                valid &= step("SInd", Not(prefixes[m + 1]), not pvals[m + 1],
                              not pvals[m + 1], ["block %d" % ((m + 1) // c)])
        valid &= step("SInd-outer", Not(prefixes[b]), not pvals[b],
                      not pvals[b], ["stages 0..%d" % (d + (1 if r else 0))])

    equivalent = (pvals[b] == any(vals))
    conclusion = {"formula": to_sexpr(prefixes[b]), "lhs": pvals[b],
                  "rhs": any(vals), "equivalent": equivalent}
    return DerivationTrace(case, c, b, d, r, steps, conclusion,
                           valid and equivalent)


# --------------------------------------------------------- correctness tree

@dataclass
class TreeNode:
    path: tuple
    lhs: object  # F-iterate side of the negated equivalence
    rhs: object  # the plain side; also the star extraction
    children: list = field(default_factory=list)

    def label(self):
        """not(lhs == rhs), materialized when both sides are concrete."""
        if isinstance(self.lhs, Piece) or isinstance(self.rhs, Piece):
            return None
        return neg_equiv(self.lhs, self.rhs)

    def star(self):
        return self.rhs

    def to_json(self):
        lab = self.label()
        return {"path": list(self.path),
                "label": to_sexpr(lab) if lab is not None else
                "(not (== %s %s))" % (_show(self.lhs), _show(self.rhs)),
                "star": _show(self.rhs),
                "children": [ch.to_json() for ch in self.children]}


@dataclass
class LabelledTree:
    op: Operator
    stages: list
    root: TreeNode

    def to_json(self):
        return {"op": self.op.id, "stages": [repr(x) for x in self.stages],
                "tree": self.root.to_json()}


def neg_equiv(a, b):
    """not(a == b) spelled with the primitive connectives."""
    return Not(Or(And(a, b), And(Not(a), Not(b))))


def star_of(f):
    """The unique psi with f = not(theta == psi) for some theta."""
    if isinstance(f, Not) and isinstance(f.body, Or) \
            and isinstance(f.body.left, And) and isinstance(f.body.right, And) \
            and isinstance(f.body.right.left, Not) \
            and isinstance(f.body.right.right, Not) \
            and f.body.left.left == f.body.right.left.body \
            and f.body.left.right == f.body.right.right.body:
        return f.body.left.right
    raise DclabError("not a negated equivalence: %s" % _show(f))


def build_correctness_tree(op: Operator, stages, phi, height: int) -> LabelledTree:
    """Binary tree of correctness labels: the root doubts F(a_0, phi) == phi;
    a 0-child doubts one more F(a_{n+1}) layer over the parent's star, a
    1-child doubts the layer over that layer."""
    if op.mode != "nonlocal":
        raise DclabError("correctness trees iterate a nonlocal operator")
    stages = list(stages)
    if len(stages) < height + 1:
        raise DclabError("need %d stage counts for height %d"
                         % (height + 1, height))

    def it(x, psi):
        if isinstance(psi, Piece):
            return Piece(op, (), x if isinstance(x, GapNumber) else std(x), psi)
        return iterate(op, x, psi)

    def grow(path, psi):
        n = len(path)
        node = TreeNode(path, it(stages[n], psi), psi)
        if n < height:
            nxt = stages[n + 1]
            once = it(nxt, node.rhs)
            node.children = [
                grow(path + (0,), node.rhs),
                grow(path + (1,), once),
            ]
        return node

    root = grow((), phi)
    return LabelledTree(op, stages, root)


def tree_truth(S: SatClass, tree: LabelledTree) -> dict:
    """Evaluate every label under S (a label is true when the two sides
    disagree) and report the longest all-true branch."""

    def node_value(node):
        va = S.value(node.lhs) if isinstance(node.lhs, Piece) \
            else S.truth(node.lhs)
        vb = S.value(node.rhs) if isinstance(node.rhs, Piece) \
            else S.truth(node.rhs)
        if va is None or vb is None:
            return None
        return va != vb

    best = {"path": None, "length": -1}

    def walk(node, depth):
        # a branch counts only while every label from the root is true
        if not node_value(node):
            return
        if depth > best["length"]:
            best["path"] = node.path
            best["length"] = depth
        for ch in node.children:
            walk(ch, depth + 1)

    walk(tree.root, 0)
    return {"max_true_path": list(best["path"]) if best["path"] is not None
            else None, "length": best["length"]}
