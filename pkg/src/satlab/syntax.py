"""Arithmetic syntax: terms, formulas, assignments.

Surface syntax is s-expressions: terms are `0`, `1`, `v3`, `(+ a b)`,
`(* a b)`; formulas are `(= s t)`, `(not f)`, `(or f g)`, `(and f g)`,
`(exists v0 f)`, `(forall v0 f)`.  `(< s t)` is accepted and desugared to
`(exists u (= (+ (+ s u) 1) t))` at parse time, so equality is the only
atomic predicate in the AST.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .gapnum import GapNumber, GapUniverse, UnrepresentableError, std


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Zero:
    def __repr__(self):
        return "0"


@dataclass(frozen=True)
class One:
    def __repr__(self):
        return "1"


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Plus:
    left: object
    right: object

    def __repr__(self):
        return "(%r + %r)" % (self.left, self.right)


@dataclass(frozen=True)
class Times:
    left: object
    right: object

    def __repr__(self):
        return "(%r * %r)" % (self.left, self.right)


# ------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Eq:
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


TERM_TYPES = (Zero, One, Var, Plus, Times)
FORMULA_TYPES = (Eq, Not, Or, And, Exists, Forall)


def is_term(x) -> bool:
    return isinstance(x, TERM_TYPES)


def is_formula(x) -> bool:
    return isinstance(x, FORMULA_TYPES)


# --------------------------------------------------------------- parser

_TOKEN = re.compile(r"[()]|[^\s()]+")


def _tokenize(text: str):
    return _TOKEN.findall(text)


def _read(tokens, pos):
    if pos >= len(tokens):
        raise ParseError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise ParseError("unbalanced '('")
        return items, pos + 1
    if tok == ")":
        raise ParseError("unbalanced ')'")
    return tok, pos + 1


def _read_all(text: str):
    tokens = _tokenize(text)
    tree, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ParseError("trailing input: %r" % (tokens[pos:],))
    return tree


_VAR = re.compile(r"^v\d+$|^[a-z][a-z0-9_]*$")


def _term_of(sx):
    if isinstance(sx, str):
        if sx == "0":
            return Zero()
        if sx == "1":
            return One()
        if _VAR.match(sx):
            return Var(sx)
        raise ParseError("bad term atom %r" % sx)
    if len(sx) == 3 and sx[0] in ("+", "*"):
        cls = Plus if sx[0] == "+" else Times
        return cls(_term_of(sx[1]), _term_of(sx[2]))
    raise ParseError("bad term %r" % (sx,))


def _fresh_for(*terms):
    used = set()
    for t in terms:
        used |= term_vars(t)
    i = 0
    while "v%d" % i in used:
        i += 1
    return "v%d" % i


def _formula_of(sx):
    if not isinstance(sx, list) or not sx:
        raise ParseError("bad formula %r" % (sx,))
    head = sx[0]
    if head == "=" and len(sx) == 3:
        return Eq(_term_of(sx[1]), _term_of(sx[2]))
    if head == "<" and len(sx) == 3:
        s, t = _term_of(sx[1]), _term_of(sx[2])
        u = _fresh_for(s, t)
        return Exists(u, Eq(Plus(Plus(s, Var(u)), One()), t))
    if head == "not" and len(sx) == 2:
        return Not(_formula_of(sx[1]))
    if head in ("or", "and") and len(sx) == 3:
        cls = Or if head == "or" else And
        return cls(_formula_of(sx[1]), _formula_of(sx[2]))
    if head in ("exists", "forall") and len(sx) == 3:
        if not (isinstance(sx[1], str) and _VAR.match(sx[1])):
            raise ParseError("bad binder variable %r" % (sx[1],))
        cls = Exists if head == "exists" else Forall
        return cls(sx[1], _formula_of(sx[2]))
    raise ParseError("bad formula %r" % (sx,))


def parse_term(text: str):
    return _term_of(_read_all(text))


def parse_formula(text: str):
    return _formula_of(_read_all(text))


def term_to_sexpr(t) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Var):
        return t.name
    op = "+" if isinstance(t, Plus) else "*"
    return "(%s %s %s)" % (op, term_to_sexpr(t.left), term_to_sexpr(t.right))


def to_sexpr(f) -> str:
    if is_term(f):
        return term_to_sexpr(f)
    if isinstance(f, Eq):
        return "(= %s %s)" % (term_to_sexpr(f.left), term_to_sexpr(f.right))
    if isinstance(f, Not):
        return "(not %s)" % to_sexpr(f.body)
    if isinstance(f, Or):
        return "(or %s %s)" % (to_sexpr(f.left), to_sexpr(f.right))
    if isinstance(f, And):
        return "(and %s %s)" % (to_sexpr(f.left), to_sexpr(f.right))
    if isinstance(f, Exists):
        return "(exists %s %s)" % (f.var, to_sexpr(f.body))
    if isinstance(f, Forall):
        return "(forall %s %s)" % (f.var, to_sexpr(f.body))
    raise TypeError("not a formula: %r" % (f,))


# ---------------------------------------------------------- basic facts

def term_vars(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, (Plus, Times)):
        return term_vars(t.left) | term_vars(t.right)
    return set()


def free_vars(f) -> set:
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (Or, And)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError("not a formula: %r" % (f,))


def complexity(f) -> int:
    """Connective nesting depth: atomic 0; not/exists/forall +1; or/and max+1."""
    if isinstance(f, Eq):
        return 0
    if isinstance(f, Not):
        return complexity(f.body) + 1
    if isinstance(f, (Or, And)):
        return max(complexity(f.left), complexity(f.right)) + 1
    if isinstance(f, (Exists, Forall)):
        return complexity(f.body) + 1
    raise TypeError("not a formula: %r" % (f,))


def formula_size(f) -> int:
    """Total AST node count (terms included)."""
    if isinstance(f, (Zero, One, Var)):
        return 1
    if isinstance(f, (Plus, Times, Eq, Or, And)):
        return 1 + formula_size(f.left) + formula_size(f.right)
    if isinstance(f, (Not, Exists, Forall)):
        return 1 + formula_size(f.body)
    raise TypeError(repr(f))


def subformulas(f) -> set:
    out = {f}
    if isinstance(f, Not):
        out |= subformulas(f.body)
    elif isinstance(f, (Or, And)):
        out |= subformulas(f.left) | subformulas(f.right)
    elif isinstance(f, (Exists, Forall)):
        out |= subformulas(f.body)
    return out


# ------------------------------------------------------------ assignments

class Assignment:
    """Immutable finite map from variable names to GapNumbers."""

    __slots__ = ("_items",)

    def __init__(self, mapping=None):
        items = tuple(sorted((mapping or {}).items())) if not isinstance(mapping, tuple) \
            else mapping
        for v, x in items:
            if not isinstance(x, GapNumber):
                raise TypeError("assignment values must be GapNumbers: %r" % (x,))
        object.__setattr__(self, "_items", items)

    def __getitem__(self, var):
        for v, x in self._items:
            if v == var:
                return x
        raise KeyError(var)

    def get(self, var, default=None):
        for v, x in self._items:
            if v == var:
                return x
        return default

    def keys(self):
        return [v for v, _ in self._items]

    def items(self):
        return self._items

    def domain(self) -> frozenset:
        return frozenset(v for v, _ in self._items)

    def set(self, var, value: GapNumber) -> "Assignment":
        d = dict(self._items)
        d[var] = value
        return Assignment(d)

    def drop(self, vars_) -> "Assignment":
        return Assignment({v: x for v, x in self._items if v not in vars_})

    def restrict(self, vars_) -> "Assignment":
        return Assignment({v: x for v, x in self._items if v in vars_})

    def __eq__(self, other):
        return isinstance(other, Assignment) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __len__(self):
        return len(self._items)

    def __repr__(self):
        return "{%s}" % ", ".join("%s=%r" % (v, x) for v, x in self._items)

    def to_json(self):
        return {v: x.to_json() for v, x in self._items}

    @staticmethod
    def from_json(obj) -> "Assignment":
        return Assignment({v: GapNumber.from_json(x) for v, x in obj.items()})


EMPTY = Assignment()


def asn_check(f, alpha: Assignment) -> bool:
    """An assignment fits a formula when its domain is exactly the free variables."""
    return alpha.domain() == frozenset(free_vars(f))


def restrict_assignment(alpha: Assignment, f) -> Assignment:
    return alpha.restrict(free_vars(f))


# ------------------------------------------------------------- evaluation

def eval_term(t, alpha: Assignment, universe: GapUniverse = None) -> GapNumber:
    """Value of a term.  At most one nonstandard summand is representable, and
    products must be fully standard; anything else raises UnrepresentableError."""
    if isinstance(t, Zero):
        return std(0)
    if isinstance(t, One):
        return std(1)
    if isinstance(t, Var):
        val = alpha.get(t.name)
        if val is None:
            raise UnrepresentableError("unassigned variable %s" % t.name)
        return val
    a = eval_term(t.left, alpha, universe)
    b = eval_term(t.right, alpha, universe)
    if isinstance(t, Plus):
        if a.is_standard():
            return b.shift(a.offset)
        if b.is_standard():
            return a.shift(b.offset)
        raise UnrepresentableError("sum of two nonstandard values")
    if a.is_standard() and b.is_standard():
        return std(a.offset * b.offset)
    raise UnrepresentableError("product with a nonstandard factor")


def eval_formula(f, alpha: Assignment, universe: GapUniverse,
                 witnesses=None) -> bool:
    """Standard Tarskian evaluation.  Quantifiers range over the universe's
    gap representatives (the decidable fragment) unless `witnesses` is given."""
    if witnesses is None:
        witnesses = universe.gap_representatives()
    if isinstance(f, Eq):
        return eval_term(f.left, alpha, universe) == eval_term(f.right, alpha, universe)
    if isinstance(f, Not):
        return not eval_formula(f.body, alpha, universe, witnesses)
    if isinstance(f, Or):
        return (eval_formula(f.left, alpha, universe, witnesses)
                or eval_formula(f.right, alpha, universe, witnesses))
    if isinstance(f, And):
        return (eval_formula(f.left, alpha, universe, witnesses)
                and eval_formula(f.right, alpha, universe, witnesses))
    if isinstance(f, Exists):
        return any(eval_formula(f.body, alpha.set(f.var, w), universe, witnesses)
                   for w in witnesses)
    if isinstance(f, Forall):
        return all(eval_formula(f.body, alpha.set(f.var, w), universe, witnesses)
                   for w in witnesses)
    raise TypeError("not a formula: %r" % (f,))


# ------------------------------------------------------------ substitution

class CaptureError(ValueError):
    pass


def _subst_term(t, gamma: dict):
    if isinstance(t, Var):
        return gamma.get(t.name, t)
    if isinstance(t, (Plus, Times)):
        cls = type(t)
        return cls(_subst_term(t.left, gamma), _subst_term(t.right, gamma))
    return t


def _bound_names(f) -> set:
    if isinstance(f, Eq):
        return set()
    if isinstance(f, Not):
        return _bound_names(f.body)
    if isinstance(f, (Or, And)):
        return _bound_names(f.left) | _bound_names(f.right)
    if isinstance(f, (Exists, Forall)):
        return {f.var} | _bound_names(f.body)
    return set()


def _fresh_name(used: set) -> str:
    i = 0
    while "v%d" % i in used:
        i += 1
    return "v%d" % i


def rename_bound(f, mapping: dict):
    """Rename bound variables by binder: mapping maps current binder names to
    replacements, applied with shadowing."""
    if isinstance(f, Eq):
        sub = {v: Var(n) for v, n in mapping.items()}
        return Eq(_subst_term(f.left, sub), _subst_term(f.right, sub))
    if isinstance(f, Not):
        return Not(rename_bound(f.body, mapping))
    if isinstance(f, (Or, And)):
        return type(f)(rename_bound(f.left, mapping), rename_bound(f.right, mapping))
    if isinstance(f, (Exists, Forall)):
        new = mapping.get(f.var, f.var)
        return type(f)(new, rename_bound(f.body, mapping))
    raise TypeError(repr(f))


def substitute(f, gamma: dict, rename: bool = True):
    """Substitute terms for free variables, renaming bound variables away from
    the substituted terms' variables.  With rename=False a would-be capture
    raises CaptureError instead."""
    gamma = {v: t for v, t in gamma.items()}
    incoming = set()
    for t in gamma.values():
        incoming |= term_vars(t)

    def go(g, live: dict):
        # live: free-variable substitution currently in effect
        if isinstance(g, Eq):
            return Eq(_subst_term(g.left, live), _subst_term(g.right, live))
        if isinstance(g, Not):
            return Not(go(g.body, live))
        if isinstance(g, (Or, And)):
            return type(g)(go(g.left, live), go(g.right, live))
        if isinstance(g, (Exists, Forall)):
            live2 = {v: t for v, t in live.items() if v != g.var}
            relevant = any(v in free_vars(g.body) for v in live2)
            if g.var in incoming and relevant:
                if not rename:
                    raise CaptureError("capture of %s" % g.var)
                # the fresh name must dodge inner binders too, or the
                # renamed occurrences get shadowed on the way down
                used = (incoming | free_vars(g.body) | _bound_names(g.body)
                        | {g.var} | set(live2))
                fresh = _fresh_name(used)
                body = rename_free_var(g.body, g.var, fresh)
                return type(g)(fresh, go(body, live2))
            return type(g)(g.var, go(g.body, live2))
        raise TypeError(repr(g))

    return go(f, gamma)


def rename_free_var(f, old: str, new: str):
    """Rename free occurrences of `old` to `new` (new assumed fresh)."""
    if isinstance(f, Eq):
        sub = {old: Var(new)}
        return Eq(_subst_term(f.left, sub), _subst_term(f.right, sub))
    if isinstance(f, Not):
        return Not(rename_free_var(f.body, old, new))
    if isinstance(f, (Or, And)):
        return type(f)(rename_free_var(f.left, old, new),
                       rename_free_var(f.right, old, new))
    if isinstance(f, (Exists, Forall)):
        if f.var == old:
            return f
        return type(f)(f.var, rename_free_var(f.body, old, new))
    raise TypeError(repr(f))


def alpha_eq(f, g) -> bool:
    """Equality up to renaming of bound variables."""

    def go(a, b, env):
        if type(a) is not type(b):
            return False
        if isinstance(a, Eq):
            return _tm(a.left, b.left, env) and _tm(a.right, b.right, env)
        if isinstance(a, Not):
            return go(a.body, b.body, env)
        if isinstance(a, (Or, And)):
            return go(a.left, b.left, env) and go(a.right, b.right, env)
        if isinstance(a, (Exists, Forall)):
            mark = object()
            env2 = dict(env)
            env2[a.var] = (mark, "l")
            env2["\0" + b.var] = (mark, "r")
            return go(a.body, b.body, env2)
        return False

    def _tm(s, t, env):
        if type(s) is not type(t):
            return False
        if isinstance(s, Var):
            ls = env.get(s.name)
            lt = env.get("\0" + t.name)
            if ls is None and lt is None:
                return s.name == t.name
            return ls is not None and lt is not None and ls[0] is lt[0]
        if isinstance(s, (Plus, Times)):
            return _tm(s.left, t.left, env) and _tm(s.right, t.right, env)
        return True

    return go(f, g, {})


# ------------------------------------------------------------- combinators

def numeral(n: int):
    """Left-nested numeral: 0, 0+1, (0+1)+1, ..."""
    if n < 0:
        raise ValueError("numerals are for naturals")
    t = Zero()
    for _ in range(n):
        t = Plus(t, One())
    return t


def big_or(formulas):
    """Left-nested disjunction of a nonempty sequence."""
    formulas = list(formulas)
    if not formulas:
        raise ValueError("empty disjunction")
    out = formulas[0]
    for f in formulas[1:]:
        out = Or(out, f)
    return out


def big_and(formulas):
    formulas = list(formulas)
    if not formulas:
        raise ValueError("empty conjunction")
    out = formulas[0]
    for f in formulas[1:]:
        out = And(out, f)
    return out


def or_disjuncts(f) -> list:
    """Maximal left-nested decomposition: inverse of big_or."""
    out = []
    while isinstance(f, Or):
        out.append(f.right)
        f = f.left
    out.append(f)
    out.reverse()
    return out
