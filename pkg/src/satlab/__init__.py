"""satlab: pathological satisfaction classes over a gap-universe number model."""

from .gapnum import (CutSpec, GapError, GapNumber, GapUniverse, STANDARD,
                     UnrepresentableError, compare, gap_diff, make_universe,
                     std, step)
from .syntax import (And, Assignment, CaptureError, EMPTY, Eq, Exists, Forall,
                     Not, One, Or, ParseError, Plus, Times, Var, Zero,
                     alpha_eq, asn_check, big_and, big_or, complexity,
                     eval_formula, eval_term, formula_size, free_vars,
                     numeral, or_disjuncts, parse_formula, parse_term,
                     rename_bound, rename_free_var, restrict_assignment,
                     subformulas, substitute, term_to_sexpr, term_vars,
                     to_sexpr)
from .operators import (Operator, P, Piece, Q, TAnd, TNot, TOr, TQuant,
                        TemplateClass, TemplateError, check_additivity,
                        classify_positions, double_negation_operator,
                        enumerate_templates, eval_template, f_length_root,
                        instantiate, iterate, iterate_at, leaf_occurs,
                        make_operator, make_piece, parse_template,
                        piece_base, piece_children, template_depth,
                        template_size, template_to_sexpr, theta_truth,
                        validate_template)
from .closure import (ClosedSet, ClosureError, Ray, cl, d_closure,
                      immediate_subformulas, rank)
from .satclass import (BreakResult, ConstraintTheory, InconsistentTheoryError,
                       SatClass, SatClassError, TheoryEntry,
                       VerificationReport, brute_force_oracle,
                       build_unique_pathological, check_constraints,
                       correctness_sets, extend_break_correctness,
                       extend_double_negation, extend_with_constraints,
                       oracle_bound, ray_key, ray_key_of, same_class,
                       verify_comp)
from .regularity import (RegularityError, StructuralTemplate,
                         build_regular_class, hat_assignment, hat_pair,
                         is_regular, recover, structural_template,
                         structurally_similar, theta_carrier, x_satisfies)
from .dclab import (DclabError, DerivationTrace, LabelledTree,
                    SentenceSequence, TreeNode, build_correctness_tree,
                    dc_check, multiplication_staging, neg_equiv, sind_check,
                    star_of, tree_truth)

__version__ = "0.1.0"
