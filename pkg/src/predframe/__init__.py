"""predframe: conditional prediction-function inference for time series models.

Simulation, estimation, analytic prediction-function derivatives,
sample-split and two-process conditional confidence intervals, conditional
risk measures, and a Monte Carlo verification harness for AR(1), ARMA(1,1),
GARCH(1,1), and T-GARCH(1,1) models.
"""

from .errors import (
    CovarianceSingularError,
    DegenerateSeriesError,
    InfeasibleSplitError,
    InvalidParamsError,
    NearCommonRootWarning,
    PredframeError,
    SeriesParseError,
    UnsupportedModelError,
)
from .estimation import (
    EstimationResult,
    OptimizerConfig,
    arma_autocorrelation,
    arma_wls_covariance,
    estimate,
    estimate_ar1_ols,
    estimate_arma_wls,
    estimate_qml,
    gaussian_nll,
)
from .intervals import (
    ConfidenceInterval,
    Scheme,
    SplitPlan,
    ci_naive_plugin,
    ci_sample_split,
    ci_two_process,
    make_split_plan,
    normal_quantile,
)
from .kernels import BACKEND
from .mc import (
    CoverageReport,
    ExperimentConfig,
    NormalityResult,
    SchemeCoverage,
    asymptotic_covariance,
    gradient_check,
    ks_statistic,
    normality_check,
    run_coverage,
    truncation_decay,
)
from .models import (
    DELTA,
    AR1Params,
    ARMA11Params,
    GARCH11Params,
    Innovations,
    ModelKind,
    Params,
    Series,
    TGARCH11Params,
    check_params,
    param_class,
    params_from_array,
    simulate,
    stationarity_margin,
    validate_params,
)
from .prediction import (
    FULL_WINDOW,
    PredEval,
    RiskLevel,
    Truncation,
    conditional_es,
    conditional_var,
    evaluate_prediction,
    innovation_quantile,
    prediction_gap,
)

__version__ = "0.1.0"
