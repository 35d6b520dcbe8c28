"""Symbolic tensor calculus on coordinate charts with seeded residual
verification of compatibility structures from Poisson geometry."""

from .expr import Chart, Expr, ExprError, constant, derive, evaluate, parse, to_string
from .fields import (
    Bivector,
    ChartMismatch,
    DegreeError,
    Endomorphism,
    KForm,
    VectorField,
    VolumeForm,
)
from .verify import (
    CheckReport,
    DeformationResult,
    RecursionResult,
    SamplePlan,
    Structure,
    SUITES,
    check_identity,
    deform_3d,
    run_suites,
    sample_plan,
    verify_3d_conditions,
    verify_haantjes_structure,
    verify_lm_chain,
    verify_minpoly,
    verify_pn,
    verify_poisson,
    verify_pqn,
    verify_recursion_involutivity,
    verify_theo_inv,
)
from .catalog import RecipeInput, by_name, closed_toda, das_okubo, magri_veselov, r3_recipe

__version__ = "0.1.0"

__all__ = [
    "Bivector",
    "Chart",
    "ChartMismatch",
    "CheckReport",
    "DeformationResult",
    "DegreeError",
    "Endomorphism",
    "Expr",
    "ExprError",
    "KForm",
    "RecipeInput",
    "RecursionResult",
    "SUITES",
    "SamplePlan",
    "Structure",
    "VectorField",
    "VolumeForm",
    "by_name",
    "check_identity",
    "closed_toda",
    "constant",
    "das_okubo",
    "deform_3d",
    "derive",
    "evaluate",
    "magri_veselov",
    "parse",
    "r3_recipe",
    "run_suites",
    "sample_plan",
    "to_string",
    "verify_3d_conditions",
    "verify_haantjes_structure",
    "verify_lm_chain",
    "verify_minpoly",
    "verify_pn",
    "verify_poisson",
    "verify_pqn",
    "verify_recursion_involutivity",
    "verify_theo_inv",
    "__version__",
]
