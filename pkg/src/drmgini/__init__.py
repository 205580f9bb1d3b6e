"""Gini index inference for two semicontinuous samples under a
density ratio link between their positive parts."""

from .basis import BasisFunction, make_basis
from .data import (
    TwoSampleData,
    ZeroProportions,
    load_two_files,
    load_two_samples,
    save_two_samples,
    zero_proportions,
)
from .drm import (
    DrmFit,
    FittedCdfPair,
    dual_grad,
    dual_hessian,
    dual_loglik,
    fit_at_theta,
    fit_theta,
    fitted_cdfs,
)
from .errors import (
    ConvergenceError,
    DataError,
    DegenerateDataError,
    DrmGiniError,
    OpenBoundError,
    RankDeficiencyError,
    SingularityError,
    StudyError,
)
from .estimator import DrmGiniEstimator
from .gini import (
    GiniEstimate,
    ScenarioTruth,
    continuous_gini,
    emp_gini,
    jackknife_pseudovalues,
    jel_gini,
    matching_zero_proportion,
    mele_gini,
    pairwise_gini,
    true_gini_mixture,
)
from .inference import (
    INTERVAL_METHODS,
    TEST_METHODS,
    AnalysisCache,
    ElSolution,
    GofResult,
    IntervalEstimate,
    TestResult,
    bootstrap_t_ci,
    compute_interval,
    compute_test,
    el_mean_logratio,
    equality_test,
    gof_test,
    jel_ci,
    jel_equality_test,
    logit_ci,
    wald_ci,
)
from .montecarlo import (
    PRESETS,
    ScenarioConfig,
    StudySummary,
    gen_sample,
    preset,
    run_ci_study,
    run_point_study,
    run_test_study,
)
from .variance import (
    CovarianceEstimate,
    EfficiencyGap,
    delta_variance,
    efficiency_gap,
    estimate_sigma_drm,
    estimate_sigma_nonparam,
    smooth_gradient,
)

__version__ = "0.1.0"

__all__ = [
    "BasisFunction", "make_basis",
    "TwoSampleData", "ZeroProportions", "load_two_files", "load_two_samples",
    "save_two_samples", "zero_proportions",
    "DrmFit", "FittedCdfPair", "dual_grad", "dual_hessian", "dual_loglik",
    "fit_at_theta", "fit_theta", "fitted_cdfs",
    "ConvergenceError", "DataError", "DegenerateDataError", "DrmGiniError",
    "OpenBoundError", "RankDeficiencyError", "SingularityError", "StudyError",
    "DrmGiniEstimator",
    "GiniEstimate", "ScenarioTruth", "continuous_gini", "emp_gini",
    "jackknife_pseudovalues", "jel_gini", "matching_zero_proportion",
    "mele_gini", "pairwise_gini", "true_gini_mixture",
    "INTERVAL_METHODS", "TEST_METHODS", "AnalysisCache", "ElSolution",
    "GofResult", "IntervalEstimate", "TestResult", "bootstrap_t_ci",
    "compute_interval", "compute_test", "el_mean_logratio", "equality_test",
    "gof_test", "jel_ci", "jel_equality_test", "logit_ci", "wald_ci",
    "PRESETS", "ScenarioConfig", "StudySummary", "gen_sample", "preset",
    "run_ci_study", "run_point_study", "run_test_study",
    "CovarianceEstimate", "EfficiencyGap", "delta_variance", "efficiency_gap",
    "estimate_sigma_drm", "estimate_sigma_nonparam", "smooth_gradient",
]
