"""Genus-2 period integrals by the Richelot arithmetic-geometric mean.

The package computes complete hyperelliptic integrals on curves
y^2 = -P(x)Q(x)R(x) built from three quadratics, both for six real
branch points and for three complex-conjugate pairs, using a quadratically
convergent Richelot recursion plus closed-form limits.  A direct-quadrature
contour oracle provides the independent cross-check.  On top of that sit
the period / Abel-map machinery of the charge-3 cyclically symmetric
monopole family, a solver for its reduced Ercolani-Sinha constraints, and
the theta-function scan of the Hitchin nonvanishing condition.
"""

from .agm import agm, agm_sequence, elliptic_integral_agm
from .hyperpoly import (
    DegenerateModelError,
    Quadratic,
    SexticModel,
    bracket,
    delta_det,
    resolvent_roots,
    resolvent_triple,
)
from .richelot import (
    RichelotOrbit,
    integrals_conjugate,
    pair_integrals_real,
    richelot_limits,
    richelot_step,
)
from .oracle import SheetedContour, infinity_integral, line_integral, pair_integral
from .monopole import (
    BranchPointSet,
    CharMatch,
    ConventionMismatchError,
    CurveParams,
    CycleExpr,
    PeriodData,
    abel_characteristics,
    basis_cycle_direct,
    cycle_c,
    cycle_to_pairs,
    genus4_branch_points,
    infinity_characteristics,
    involution_matrix_checks,
    period_matrix,
    quotient_branch_points,
    quotient_model,
    riemann_constants_infinity,
)
from .solver import (
    ContinuationError,
    NoSolutionError,
    SolutionPoint,
    beta_from,
    continuation_sweep,
    es_residual,
    solve_continued,
    solve_g,
    unscale,
)
from .theta import (
    FlowPoint,
    ScanSummary,
    ThetaChar,
    es_vector,
    h3_scan,
    h3_summary,
    theta2,
)

__version__ = "0.1.0"

__all__ = [
    "agm",
    "agm_sequence",
    "elliptic_integral_agm",
    "DegenerateModelError",
    "Quadratic",
    "SexticModel",
    "bracket",
    "delta_det",
    "resolvent_roots",
    "resolvent_triple",
    "RichelotOrbit",
    "richelot_step",
    "richelot_limits",
    "pair_integrals_real",
    "integrals_conjugate",
    "SheetedContour",
    "line_integral",
    "pair_integral",
    "infinity_integral",
    "BranchPointSet",
    "CharMatch",
    "ConventionMismatchError",
    "CurveParams",
    "CycleExpr",
    "PeriodData",
    "abel_characteristics",
    "basis_cycle_direct",
    "cycle_c",
    "cycle_to_pairs",
    "genus4_branch_points",
    "infinity_characteristics",
    "involution_matrix_checks",
    "period_matrix",
    "quotient_branch_points",
    "quotient_model",
    "riemann_constants_infinity",
    "ContinuationError",
    "NoSolutionError",
    "SolutionPoint",
    "beta_from",
    "continuation_sweep",
    "es_residual",
    "solve_continued",
    "solve_g",
    "unscale",
    "FlowPoint",
    "ScanSummary",
    "ThetaChar",
    "es_vector",
    "h3_scan",
    "h3_summary",
    "theta2",
    "__version__",
]
