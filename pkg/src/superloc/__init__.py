"""Equivariant localization on supermanifolds.

Exact Grassmann algebra over a symbolic scalar ring, BRST operators,
fixed-point localization with Pfaffian square roots, an independent
quadrature oracle, and the ADHM instanton chart.
"""

from .scalars import (
    Binding,
    ScalarExpr,
    compile_numeric,
    cos,
    differentiate,
    evaluate,
    exp,
    free_symbols,
    normalize,
    parse_scalar,
    rational,
    sin,
    substitute,
    sym,
    to_text,
)
from .grassmann import (
    SuperChart,
    SuperFunction,
    SuperVectorField,
    graded_commutator,
    parse_super,
    to_super_text,
)
from .linalg import det, pfaffian
from .actions import (
    ActionSpec,
    check_sigma_parallel,
    equivariant_differential,
    kahler_Q,
    sigma_from_Q,
    tautological_Q,
    verify_brst,
)
from .localize import (
    FixedPointData,
    PiScaled,
    classical_localize,
    find_fixed_points,
    super_localize,
    superdeterminant,
)
from .oracle import OraclePatch, global_berezin, super_stokes_check
from .adhm import (
    ADHMData,
    adhm_Q_full,
    adhm_Q_unconstrained,
    adhm_fixed_points,
    adhm_super_chart,
    constraint_complex,
    constraint_real,
    group_act,
    multiplier_completion,
    rank_bookkeeping,
)
from .harness import (
    load_scenario,
    run_brst_check,
    run_compare,
    run_localize,
    run_oracle,
    serialize_report,
)

__all__ = [
    "ADHMData",
    "ActionSpec",
    "Binding",
    "FixedPointData",
    "OraclePatch",
    "PiScaled",
    "ScalarExpr",
    "SuperChart",
    "SuperFunction",
    "SuperVectorField",
    "adhm_Q_full",
    "adhm_Q_unconstrained",
    "adhm_fixed_points",
    "adhm_super_chart",
    "check_sigma_parallel",
    "classical_localize",
    "compile_numeric",
    "constraint_complex",
    "constraint_real",
    "cos",
    "det",
    "differentiate",
    "equivariant_differential",
    "evaluate",
    "exp",
    "find_fixed_points",
    "free_symbols",
    "global_berezin",
    "graded_commutator",
    "group_act",
    "kahler_Q",
    "load_scenario",
    "multiplier_completion",
    "normalize",
    "parse_scalar",
    "parse_super",
    "pfaffian",
    "rank_bookkeeping",
    "rational",
    "run_brst_check",
    "run_compare",
    "run_localize",
    "run_oracle",
    "serialize_report",
    "sigma_from_Q",
    "sin",
    "substitute",
    "super_localize",
    "super_stokes_check",
    "superdeterminant",
    "sym",
    "tautological_Q",
    "to_super_text",
    "to_text",
    "verify_brst",
]
