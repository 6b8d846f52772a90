"""Split plans and delta-method conditional confidence intervals.

Three schemes are provided for an interval on the one-step prediction
function: two independent processes (estimate on one series, predict from
the other), sample split (estimate on X_{1:T_E}, predict from X_{T_P:T}
with non-overlapping, asymptotically independent blocks), and the naive
full-sample plug-in used as an empirical baseline.  All intervals take the
form psi_hat +/- z * v_hat / m with v_hat^2 the delta-method variance
grad' Upsilon_hat grad and m the estimation-sample root-T scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtri

from .errors import InfeasibleSplitError
from .models import ModelKind, Series, as_values
from .estimation import DEFAULT_OPTIMIZER, EstimationResult, OptimizerConfig, estimate
from .prediction import FULL_WINDOW, Truncation, evaluate_prediction


@dataclass(frozen=True)
class SplitPlan:
    """Estimation/prediction split T_E = T - floor(T^b), T_P = T - floor(T^a).

    Requires 0 < a < b < 1 so that the estimation block keeps almost the
    whole sample while the prediction block starts late enough for the two
    to decouple.  ``gap_ratio`` reports (T - T_P) / log T, the quantity that
    must diverge for the split approximation to hold; it is a diagnostic,
    not an enforced constraint.
    """

    T: int
    a_exp: float
    b_exp: float
    T_E: int
    T_P: int

    @property
    def m_TE(self) -> float:
        return math.sqrt(self.T_E)

    @property
    def l_T(self) -> float:
        return math.log(self.T)

    @property
    def gap_ratio(self) -> float:
        return (self.T - self.T_P) / self.l_T


def make_split_plan(T: int, a_exp: float = 0.5, b_exp: float = 0.8) -> SplitPlan:
    """Build the sample-split plan; raises when 1 < T_E < T_P <= T fails."""
    if T < 8:
        raise InfeasibleSplitError(f"T={T} is too small to split")
    if not (0.0 < a_exp < b_exp < 1.0):
        raise ValueError("exponents must satisfy 0 < a < b < 1")
    T_E = T - math.floor(T**b_exp)
    T_P = T - math.floor(T**a_exp)
    if not (1 < T_E < T_P <= T):
        raise InfeasibleSplitError(
            f"split T_E={T_E}, T_P={T_P} violates 1 < T_E < T_P <= T for T={T}"
        )
    return SplitPlan(T=T, a_exp=a_exp, b_exp=b_exp, T_E=T_E, T_P=T_P)


def normal_quantile(p: float) -> float:
    """Inverse standard-normal cdf (double-precision rational approximation)."""
    if not 0.0 < p < 1.0:
        raise ValueError("probability must lie in (0, 1)")
    return float(ndtri(p))


class Scheme(str, Enum):
    TWO_PROCESS = "2ip"
    SAMPLE_SPLIT = "spl"
    NAIVE_PLUGIN = "naive"


@dataclass(frozen=True)
class ConfidenceInterval:
    """Delta-method interval center +/- z * v_hat / scale at the given level."""

    center: float
    half_width: float
    level: float
    scheme: Scheme
    v_hat: float
    scale: float
    clamped: bool = False
    plan: SplitPlan | None = None

    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @property
    def upper(self) -> float:
        return self.center + self.half_width

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _delta_interval(
    fit: EstimationResult,
    window,
    trunc: Truncation,
    level: float,
    scale: float,
    scheme: Scheme,
    plan: SplitPlan | None = None,
) -> ConfidenceInterval:
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must lie in (0, 1)")
    ev = evaluate_prediction(fit.theta_hat, window, trunc)
    v2 = float(ev.gradient @ fit.upsilon_hat @ ev.gradient)
    v_hat = math.sqrt(max(v2, 0.0))
    z = normal_quantile(0.5 * (1.0 + level))
    return ConfidenceInterval(
        center=float(ev.value),
        half_width=z * v_hat / scale,
        level=level,
        scheme=scheme,
        v_hat=v_hat,
        scale=scale,
        clamped=fit.clamped,
        plan=plan,
    )


def ci_two_process(
    kind: ModelKind,
    est_series: Series | np.ndarray,
    pred_series: Series | np.ndarray,
    trunc: Truncation = FULL_WINDOW,
    level: float = 0.9,
    cfg: OptimizerConfig = DEFAULT_OPTIMIZER,
    fit: EstimationResult | None = None,
) -> ConfidenceInterval:
    """Two-independent-processes interval: parameters from ``est_series``,
    prediction function and gradient from ``pred_series``.  A precomputed
    ``fit`` of ``est_series`` may be passed to avoid re-estimation."""
    est_values = as_values(est_series)
    if fit is None:
        fit = estimate(kind, est_values, cfg)
    return _delta_interval(
        fit, pred_series, trunc, level, math.sqrt(est_values.size), Scheme.TWO_PROCESS
    )


def ci_sample_split(
    kind: ModelKind,
    series: Series | np.ndarray,
    plan: SplitPlan,
    level: float = 0.9,
    cfg: OptimizerConfig = DEFAULT_OPTIMIZER,
    fit: EstimationResult | None = None,
) -> ConfidenceInterval:
    """Sample-split interval: estimate on X_{1:T_E}, predict from X_{T_P:T}."""
    x = as_values(series)
    if plan.T != x.size:
        raise InfeasibleSplitError(
            f"plan was built for T={plan.T} but the series has {x.size} observations"
        )
    if fit is None:
        fit = estimate(kind, x[: plan.T_E], cfg)
    window = x[plan.T_P - 1 :]
    return _delta_interval(
        fit, window, FULL_WINDOW, level, plan.m_TE, Scheme.SAMPLE_SPLIT, plan
    )


def ci_naive_plugin(
    kind: ModelKind,
    series: Series | np.ndarray,
    trunc: Truncation = FULL_WINDOW,
    level: float = 0.9,
    cfg: OptimizerConfig = DEFAULT_OPTIMIZER,
    fit: EstimationResult | None = None,
) -> ConfidenceInterval:
    """Full-sample plug-in baseline: the same series is used for estimation
    and for the prediction window, so no genuine conditioning randomness is
    left; included for empirical comparison against the honest schemes."""
    x = as_values(series)
    if fit is None:
        fit = estimate(kind, x, cfg)
    return _delta_interval(
        fit, x, trunc, level, math.sqrt(x.size), Scheme.NAIVE_PLUGIN
    )
