"""Workbench for quantitative equational logic: finite quantitative
algebras, a least-bound deduction engine, algebraic constructions, and
quantitative first-order structures."""

from .algebra import (
    Countermodel,
    Homomorphism,
    InvalidAlgebra,
    QuantitativeAlgebra,
    congruence_to_pseudometric,
    counterexample,
    evaluate,
    image_algebra,
    induced_subalgebra,
    is_c_reflexive,
    is_homomorphism,
    satisfies,
    satisfies_theory,
    search_countermodel,
    validate_algebra,
)
from .constructions import (
    CanonicalModel,
    PseudometricTable,
    canonical_model,
    direct_product,
    embed_product_of_subalgebras,
    generated_subalgebra,
    product_of_homomorphisms,
    pseudometric_from_assignment,
    pullback_restriction,
    quotient_by_pseudometric,
    r_of_K,
    weak_universality_beta,
)
from .deduction import (
    Proof,
    ProofStep,
    build_universe,
    check_proof,
    is_consistent_probe,
    least_derivable_distance,
)
from .dsl import Workspace, parse_conditional, parse_term, parse_workspace, print_workspace
from .equations import BasicClass, ConditionalEquation, QuantEq, classify, unconditional
from .extended import INF
from .qfo import (
    FilterSpec,
    HornFormula,
    TermEquality,
    Threshold,
    ThresholdStructure,
    check_qfo_axioms,
    conditional_of_horn,
    eval_horn,
    horn_of_conditional,
    is_subreduced_product,
    reduced_product,
    subobject,
    to_algebra,
    to_qfo,
)
from .terms import App, Signature, Term, Var, app, apply_substitution, enumerate_terms, subterms, var, variables_of

__version__ = "0.1.0"
