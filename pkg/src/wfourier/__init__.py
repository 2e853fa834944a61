"""Numerical laboratory for weighted Fourier and Hardy-type inequalities."""

from .conditions import (
    GUARANTEED,
    INAPPLICABLE,
    UNKNOWN,
    CondValue,
    Verdict,
    decide,
)
from .hardy import (
    ConstantEstimate,
    GridSpec,
    StepFunction,
    best_constant_compound,
    best_constant_halfpower,
    best_constant_main,
    best_constant_tailmean,
    compound_ratio,
    energy_majorization_check,
    halfpower_ratio,
    main_ratio,
    tailmean_ratio,
)
from .probe import (
    LINE_SCHEDULE,
    TORUS_SCHEDULE,
    LineDiagnostics,
    OscillatoryProfile,
    ProbeParams,
    ProbeResult,
    ProbeRow,
    divergent_series_oracle,
    line_counterexample,
    oscillatory_transform,
    torus_counterexample,
    vdc_bound_check,
)
from .weights import (
    Indices,
    MeasureProfile,
    SequenceWeight,
    Weight,
    bp_constant,
    check_monotone_transform,
    level_function,
    rearrange,
    reciprocal_rearrange,
)

__all__ = [
    "GUARANTEED",
    "INAPPLICABLE",
    "UNKNOWN",
    "LINE_SCHEDULE",
    "TORUS_SCHEDULE",
    "CondValue",
    "ConstantEstimate",
    "GridSpec",
    "Indices",
    "LineDiagnostics",
    "MeasureProfile",
    "OscillatoryProfile",
    "ProbeParams",
    "ProbeResult",
    "ProbeRow",
    "SequenceWeight",
    "StepFunction",
    "Verdict",
    "Weight",
    "best_constant_compound",
    "best_constant_halfpower",
    "best_constant_main",
    "best_constant_tailmean",
    "bp_constant",
    "check_monotone_transform",
    "compound_ratio",
    "decide",
    "divergent_series_oracle",
    "energy_majorization_check",
    "halfpower_ratio",
    "level_function",
    "line_counterexample",
    "main_ratio",
    "oscillatory_transform",
    "rearrange",
    "reciprocal_rearrange",
    "tailmean_ratio",
    "torus_counterexample",
    "vdc_bound_check",
]

__version__ = "0.1.0"
