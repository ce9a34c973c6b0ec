"""Command line front end.

Exit codes: 0 success, 1 a check failed or a construction is impossible,
2 usage error, 3 a value fell outside the representable gap fragment.
All JSON artifacts are UTF-8 with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dclab, regularity, satclass as sc
from .closure import cl, d_closure
from .gapnum import (GapError, GapNumber, STANDARD, UnrepresentableError,
                     make_universe, std)
from .operators import (Operator, Piece, TemplateError, f_length_root,
                        iterate, make_operator, parse_template,
                        template_to_sexpr, validate_template)
from .satclass import (ConstraintTheory, InconsistentTheoryError, SatClass,
                       TheoryEntry, brute_force_oracle,
                       build_unique_pathological, correctness_sets,
                       extend_break_correctness, extend_double_negation,
                       extend_with_constraints, verify_comp)
from .syntax import (EMPTY, Assignment, ParseError, complexity, free_vars,
                     parse_formula, to_sexpr)


def _emit(obj, path=None):
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _gapnum(text: str) -> GapNumber:
    if ":" in text:
        gap, off = text.rsplit(":", 1)
        return GapNumber(gap, int(off))
    if text.lstrip("-").isdigit():
        return std(int(text))
    return GapNumber(text, 0)


def _universe(args):
    gaps = [g for g in (args.gaps or "").split(",") if g]
    maps = json.loads(args.maps) if getattr(args, "maps", None) else None
    return make_universe(gaps, maps, std_cap=getattr(args, "std_cap", 4) or 4)


def _operator(args, op_id="F") -> Operator:
    return make_operator(op_id, args.template, args.mode, args.theta,
                         unfolding_bound=getattr(args, "unfolding_bound", 16))


# ------------------------------------------------- SatClass JSON round-trip

def class_to_json(S: SatClass) -> dict:
    out = S.to_json()
    out["ops"] = [op.to_json() for op in S.ops]
    return out


def _op_from_json(obj) -> Operator:
    return make_operator(obj["id"], obj["template"], obj["mode"],
                         obj.get("theta"),
                         unfolding_bound=obj.get("unfolding_bound", 16))


def _base_from_json(obj, ops: dict):
    if obj is None:
        return None
    if isinstance(obj, str):
        return parse_formula(obj)
    return Piece(ops[obj["op"]], tuple(obj["pos"]),
                 GapNumber.from_json(obj["index"]),
                 _base_from_json(obj["base"], ops))


def class_from_json(obj) -> SatClass:
    from .gapnum import GapUniverse
    universe = GapUniverse.from_json(obj["universe"])
    ops = {o["id"]: _op_from_json(o) for o in obj.get("ops", [])}
    S = SatClass(universe, ops=tuple(ops.values()))
    for e in obj["table"]:
        S.table[(parse_formula(e["formula"]),
                 Assignment.from_json(e["assignment"]))] = e["value"]
    for e in obj["rays"]:
        S.ray_table[(e["op"], tuple(e["pos"]), e["gap"],
                     _base_from_json(e["base"], ops), e["hat"])] = e["value"]
    return S


def load_class(path: str) -> SatClass:
    with open(path, encoding="utf-8") as fh:
        return class_from_json(json.load(fh))


# ---------------------------------------------------------------- commands

def cmd_parse(args):
    f = parse_formula(args.formula)
    _emit({"formula": to_sexpr(f), "free_vars": sorted(free_vars(f)),
           "complexity": complexity(f)}, args.out)
    return 0


def cmd_classify(args):
    try:
        theta = parse_formula(args.theta) if args.theta else None
        tc = validate_template(parse_template(args.template), args.mode, theta)
    except TemplateError as e:
        _emit({"valid": False, "reason": str(e)}, args.out)
        return 1
    _emit({"valid": True, "class": tc.to_json()}, args.out)
    return 0


def cmd_iterate(args):
    op = _operator(args)
    phi = parse_formula(args.phi) if args.phi else None
    f = iterate(op, _gapnum(args.x), phi)
    out = {"result": repr(f) if isinstance(f, Piece) else to_sexpr(f),
           "symbolic": isinstance(f, Piece)}
    if not isinstance(f, Piece):
        length, root = f_length_root(op, f)
        out["f_length"] = length
        out["f_root"] = to_sexpr(root)
    _emit(out, args.out)
    return 0


def cmd_closure(args):
    op = _operator(args) if args.template else None
    gens = [parse_formula(t) for t in args.formula]
    if args.symbolic_index and op is not None:
        phi = gens.pop() if op.mode == "nonlocal" and gens else None
        gens.append(iterate(op, _gapnum(args.symbolic_index), phi))
    out_set = cl(gens, ops=[op] if op else [])
    _emit({"explicit": sorted(to_sexpr(f) for f in out_set.explicit),
           "rays": [{"op": r.op.id, "pos": list(r.pos), "gap": r.gap,
                     "max_offset": r.max_offset}
                    for r in sorted(out_set.rays,
                                    key=lambda r: (r.op.id, r.pos, r.gap))]},
          args.out)
    return 0


def _theory(args, universe, ops) -> ConstraintTheory:
    entries = []
    for spec in args.constraint or []:
        op_id, mode, bound = spec.split(":", 2)
        op = next(o for o in ops if o.id == op_id)
        entries.append(TheoryEntry(op, _gapnum(bound), mode))
    return ConstraintTheory(universe, tuple(entries))


def cmd_build(args):
    universe = _universe(args)
    if args.what == "unique":
        op = _operator(args)
        S = build_unique_pathological(universe, op,
                                      set((args.j0 or "").split(",")) - {""},
                                      set((args.j1 or "").split(",")) - {""})
    elif args.what == "constrained":
        op = _operator(args)
        th = _theory(args, universe, [op])
        C = [parse_formula(t) for t in args.sentence or []]
        S = extend_with_constraints(th, C)
    elif args.what == "break":
        op = _operator(args)
        base = load_class(args.base) if args.base else SatClass(universe,
                                                                ops=(op,))
        res = extend_break_correctness(universe, op, base, base.domain,
                                       parse_formula(args.phi or "(= 0 0)"),
                                       _gapnum(args.bound))
        _emit({"class": class_to_json(res.satclass),
               "d0": res.d0.to_json(), "d1": res.d1.to_json()}, args.out)
        return 0
    elif args.what == "doubleneg":
        base = load_class(args.base) if args.base else SatClass(universe)
        C = [parse_formula(t) for t in args.sentence or []]
        S = extend_double_negation(universe, base, C, _gapnum(args.bound))
    elif args.what == "regular":
        op = _operator(args)
        X = set((args.j0 or "").split(",")) - {""}
        extra = [parse_formula(t) for t in args.sentence or []]
        S = regularity.build_regular_class(universe, op, X, extra)
    else:
        raise ValueError(args.what)
    _emit(class_to_json(S), args.out)
    return 0


def cmd_verify(args):
    S = load_class(args.cls)
    if args.what == "comp":
        rep = verify_comp(S)
    else:
        rep = regularity.is_regular(S)
    _emit(rep.to_json(), args.out)
    return 0 if rep.ok else 1


def cmd_oracle(args):
    universe = _universe(args)
    ops = [_operator(args)] if args.template else []
    th = _theory(args, universe, ops)
    C = [parse_formula(t) for t in args.sentence or []]
    if args.symbolic_index and ops:
        phi = C[-1] if ops[0].mode == "nonlocal" and C else None
        C.append(iterate(ops[0], _gapnum(args.symbolic_index), phi))
    sols = brute_force_oracle(universe, C, th)
    _emit({"solutions": len(sols),
           "first": class_to_json(sols[0]) if sols else None}, args.out)
    return 0 if sols else 1


def cmd_dclab(args):
    S = load_class(args.cls)
    seq = [parse_formula(t) for t in args.sentence or []]
    if args.what == "sind":
        out = dclab.sind_check(S, seq)
        code = 0 if out["holds"] else 1
    elif args.what == "dc":
        out = dclab.dc_check(S, _gapnum(args.width) if ":" in (args.width or "")
                             else int(args.width))
        code = 0 if out["holds"] else 1
    elif args.what == "staging":
        trace = dclab.multiplication_staging(S, args.c, args.b, seq)
        out = trace.to_json()
        code = 0 if trace.valid else 1
    else:
        op = next(o for o in S.ops if o.id == (args.op or "F"))
        stages = [_gapnum(x) for x in (args.stages or "").split(",") if x]
        tree = dclab.build_correctness_tree(op, stages, seq[0], args.height)
        out = tree.to_json()
        out["truth"] = dclab.tree_truth(S, tree)
        code = 0
    _emit(out, args.out)
    return code


def cmd_report(args):
    S = load_class(args.cls)
    op = next(o for o in S.ops if o.id == (args.op or "F"))
    _emit(correctness_sets(S, op), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="satlab",
                                 description="pathological satisfaction classes")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, op=True, uni=True):
        p.add_argument("--out", help="write JSON here instead of stdout")
        if op:
            p.add_argument("--template", help="operator template s-expression")
            p.add_argument("--mode", default="local",
                           choices=["local", "nonlocal"])
            p.add_argument("--theta", help="theta sentence (local operators)")
            p.add_argument("--unfolding-bound", type=int, default=16,
                           dest="unfolding_bound")
        if uni:
            p.add_argument("--gaps", default="", help="comma-separated labels")
            p.add_argument("--maps", help="declared gap maps as JSON")
            p.add_argument("--std-cap", type=int, default=4, dest="std_cap")

    p = sub.add_parser("parse")
    p.add_argument("formula")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("classify")
    p.add_argument("--template", required=True)
    p.add_argument("--mode", default="nonlocal", choices=["local", "nonlocal"])
    p.add_argument("--theta")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("iterate")
    common(p, uni=False)
    p.add_argument("--x", required=True, help="index: int or gap:offset")
    p.add_argument("--phi", help="base sentence (nonlocal)")
    p.set_defaults(fn=cmd_iterate)

    p = sub.add_parser("closure")
    common(p)
    p.add_argument("--formula", action="append", default=[])
    p.add_argument("--symbolic-index", dest="symbolic_index",
                   help="also close a symbolic iterate at this index")
    p.set_defaults(fn=cmd_closure)

    p = sub.add_parser("build")
    p.add_argument("what", choices=["unique", "constrained", "break",
                                    "doubleneg", "regular"])
    common(p)
    p.add_argument("--j0", help="gaps where F(x) is true (unique/regular)")
    p.add_argument("--j1", help="gaps where F(x) is false")
    p.add_argument("--sentence", action="append", default=[])
    p.add_argument("--constraint", action="append", default=[],
                   help="op:mode:bound, e.g. F:correct_below:g2:0")
    p.add_argument("--base", help="base class JSON file")
    p.add_argument("--bound", help="gap bound, e.g. g3:0")
    p.add_argument("--phi", help="target sentence")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("verify")
    p.add_argument("what", choices=["comp", "regular"])
    p.add_argument("cls", help="class JSON file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("oracle")
    common(p)
    p.add_argument("--sentence", action="append", default=[])
    p.add_argument("--constraint", action="append", default=[])
    p.add_argument("--symbolic-index", dest="symbolic_index")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("dclab")
    p.add_argument("what", choices=["sind", "dc", "staging", "tree"])
    p.add_argument("cls", help="class JSON file")
    p.add_argument("--sentence", action="append", default=[])
    p.add_argument("--width", help="dc width: int or gap:offset")
    p.add_argument("--c", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--op")
    p.add_argument("--stages", help="comma-separated stage counts")
    p.add_argument("--height", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_dclab)

    p = sub.add_parser("report")
    p.add_argument("cls", help="class JSON file")
    p.add_argument("--op")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_report)

    return ap


def execute(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, TemplateError, GapError, ValueError) as e:
        if isinstance(e, UnrepresentableError):
            print("unrepresentable: %s" % e, file=sys.stderr)
            return 3
        if isinstance(e, InconsistentTheoryError):
            print("inconsistent: %s" % e, file=sys.stderr)
            return 1
        print("error: %s" % e, file=sys.stderr)
        return 1


def main():
    sys.exit(execute())


if __name__ == "__main__":
    main()
