"""Robust estimation and specification testing for balanced panels.

The package covers the classical within / feasible-GLS toolchain, a
weighted-likelihood fixed-effects estimator whose observation weights
come from kernel-vs-model density concordance, Hausman-type
specification tests contrasting the estimators, and a reproducible
Monte Carlo harness for size and power studies.
"""

from .data import ColumnSchema, PanelDataset, from_stacked, load_long_csv, to_stacked
from .estimators import (
    FIXED_EFFECTS,
    POOLED_OLS,
    RANDOM_EFFECTS,
    WEIGHTED_FIXED_EFFECTS,
    EstimateResult,
    VarianceComponents,
    estimate_variance_components,
    fit_fixed_effects,
    fit_pooled_ols,
    fit_random_effects,
)
from .exceptions import PanelSpecError
from .inference import (
    HAUSMAN,
    WEIGHTED_HAUSMAN,
    TestResult,
    chi_square_sf,
    fit_statistics,
    hausman_test,
    weighted_hausman_test,
)
from .mcstudy import (
    ALTERNATIVE,
    CONCENTRATED_VERTICAL,
    NO_CONTAMINATION,
    NULL,
    RANDOM_VERTICAL,
    ContaminationConfig,
    DgpConfig,
    StudyResult,
    contaminate_concentrated,
    contaminate_random,
    generate_alternative,
    generate_null,
    run_study,
    study_to_csv,
    study_to_json,
)
from .transforms import (
    QUASI_DEMEANED,
    WITHIN,
    TransformedPanel,
    compute_theta,
    quasi_demean,
    within_transform,
)
from .wle import (
    HELLINGER,
    IDENTITY,
    WeightState,
    WleConfig,
    compute_weight_state,
    fit_weighted_fixed_effects,
    kernel_density_at,
    pearson_residuals,
    raf_hellinger,
    smoothed_model_density,
    weight_function,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PanelSpecError",
    "ColumnSchema",
    "PanelDataset",
    "load_long_csv",
    "to_stacked",
    "from_stacked",
    "WITHIN",
    "QUASI_DEMEANED",
    "TransformedPanel",
    "within_transform",
    "quasi_demean",
    "compute_theta",
    "POOLED_OLS",
    "FIXED_EFFECTS",
    "RANDOM_EFFECTS",
    "WEIGHTED_FIXED_EFFECTS",
    "EstimateResult",
    "VarianceComponents",
    "fit_pooled_ols",
    "fit_fixed_effects",
    "fit_random_effects",
    "estimate_variance_components",
    "HELLINGER",
    "IDENTITY",
    "WleConfig",
    "WeightState",
    "kernel_density_at",
    "smoothed_model_density",
    "pearson_residuals",
    "raf_hellinger",
    "weight_function",
    "compute_weight_state",
    "fit_weighted_fixed_effects",
    "HAUSMAN",
    "WEIGHTED_HAUSMAN",
    "TestResult",
    "chi_square_sf",
    "hausman_test",
    "weighted_hausman_test",
    "fit_statistics",
    "NULL",
    "ALTERNATIVE",
    "NO_CONTAMINATION",
    "RANDOM_VERTICAL",
    "CONCENTRATED_VERTICAL",
    "DgpConfig",
    "ContaminationConfig",
    "StudyResult",
    "generate_null",
    "generate_alternative",
    "contaminate_random",
    "contaminate_concentrated",
    "run_study",
    "study_to_json",
    "study_to_csv",
]
