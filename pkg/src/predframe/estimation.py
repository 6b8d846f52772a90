"""Parameter estimation: AR(1) OLS, ARMA(1,1) weighted least squares, and
Gaussian quasi-maximum likelihood for the GARCH family, together with the
matching asymptotic covariance estimators.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .errors import (
    CovarianceSingularError,
    DegenerateSeriesError,
    NearCommonRootWarning,
    UnsupportedModelError,
)
from .models import (
    DELTA,
    AR1Params,
    ARMA11Params,
    GARCH11Params,
    ModelKind,
    Params,
    Series,
    TGARCH11Params,
    as_values,
    check_params,
    params_from_array,
)


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the derivative-free simplex searches.

    ``init`` fixes the starting point; when ``None`` the moment-based
    defaults seed up to ``restarts`` runs.
    """

    max_iters: int = 500
    tol: float = 1e-8
    restarts: int = 3
    init: Params | None = None

    def __post_init__(self):
        if self.max_iters < 1 or self.restarts < 1 or not self.tol > 0:
            raise ValueError("optimizer settings must be positive")


DEFAULT_OPTIMIZER = OptimizerConfig()


@dataclass
class EstimationResult:
    theta_hat: Params
    upsilon_hat: np.ndarray
    objective: float
    iterations: int
    converged: bool
    clamped: bool
    sigma_eps2_hat: float | None = None
    kurtosis_hat: float | None = None


def _clamp(value: float, lo: float, hi: float) -> tuple[float, bool]:
    if value < lo:
        return lo, True
    if value > hi:
        return hi, True
    return value, False


def estimate_ar1_ols(series: Series | np.ndarray) -> EstimationResult:
    """OLS slope sum(X_t X_{t-1}) / sum(X_{t-1}^2) with variance 1 - beta^2.

    Estimates landing outside the admissible interval are clamped to its
    edge and flagged; the variance estimate uses the post-clamp slope.
    """
    x = as_values(series)
    if x.size < 3:
        raise ValueError("AR(1) OLS needs at least 3 observations")
    denom = float(x[:-1] @ x[:-1])
    if denom == 0.0:
        raise DegenerateSeriesError("all lagged values are zero")
    beta = float(x[1:] @ x[:-1]) / denom
    beta, clamped = _clamp(beta, -1.0 + DELTA, 1.0 - DELTA)
    resid = x[1:] - beta * x[:-1]
    return EstimationResult(
        theta_hat=AR1Params(beta),
        upsilon_hat=np.array([[1.0 - beta**2]]),
        objective=float(resid @ resid),
        iterations=0,
        converged=True,
        clamped=clamped,
    )


def arma_autocorrelation(alpha: float, beta: float, k: int) -> float:
    """Lag-k autocorrelation of the ARMA(1,1) process (1 at lag 0)."""
    if not (abs(alpha) < 1.0 and abs(beta) < 1.0):
        raise ValueError("autocorrelation needs |alpha| < 1 and |beta| < 1")
    if k < 0:
        raise ValueError("lag must be nonnegative")
    if k == 0:
        return 1.0
    c = (alpha + beta) * (1.0 + alpha * beta) / (1.0 + 2.0 * alpha * beta + alpha**2)
    return c * beta ** (k - 1)


def arma_wls_covariance(alpha: float, beta: float, sigma_eps2: float) -> np.ndarray:
    """Asymptotic covariance of sqrt(T) (theta_hat - theta0) for the ARMA
    weighted least squares estimator, theta = (omega, alpha, beta).

    The (alpha, beta) block is the classical Gaussian-efficient ARMA(1,1)
    result, singular as alpha -> -beta (the common-root boundary excluded by
    the admissible set); the omega entry is the long-run variance
    sigma_eps^2 (1 + alpha)^2 / (1 - beta)^2.
    """
    s = alpha + beta
    one_ab = 1.0 + alpha * beta
    v = np.zeros((3, 3))
    v[0, 0] = sigma_eps2 * (1.0 + alpha) ** 2 / (1.0 - beta) ** 2
    v[1, 1] = (1.0 - alpha**2) * one_ab**2 / s**2
    v[2, 2] = (1.0 - beta**2) * one_ab**2 / s**2
    v[1, 2] = v[2, 1] = -(1.0 - alpha**2) * (1.0 - beta**2) * one_ab / s**2
    return v


def _warn_if_near_common_root(alpha: float, beta: float, tol: float = 1e-6) -> None:
    """Flag estimates near the alpha = -beta common-root boundary, where the
    model degenerates and the asymptotic covariance entries blow up."""
    if abs(alpha + beta) < tol:
        warnings.warn(
            "alpha_hat is within 1e-6 of -beta_hat; near the common-root "
            "boundary the asymptotic covariance entries blow up",
            NearCommonRootWarning,
            stacklevel=3,
        )


def _arma_objective(x: np.ndarray):
    def objective(ab) -> float:
        q_ii, q_ix, q_xx = kernels.arma_gls_quadforms(x, float(ab[0]), float(ab[1]))
        return q_xx - q_ix * q_ix / q_ii

    return objective


def _arma_moment_start(x: np.ndarray) -> tuple[float, float]:
    xm = x - x.mean()
    denom = float(xm @ xm)
    if denom == 0.0:
        return 0.3, 0.3
    r1 = float(xm[1:] @ xm[:-1]) / denom
    r2 = float(xm[2:] @ xm[:-2]) / denom
    beta = r2 / r1 if abs(r1) > 1e-8 else 0.0
    beta = min(max(beta, -0.9), 0.9)
    # invert rho_1 = (alpha+beta)(1+alpha beta)/(1+2 alpha beta+alpha^2) for alpha
    a_coef, b_coef = r1 - beta, 2.0 * r1 * beta - 1.0 - beta**2
    disc = b_coef**2 - 4.0 * a_coef**2
    alpha = 0.1
    if abs(a_coef) > 1e-10 and disc > 0.0:
        for root in (
            (-b_coef + math.sqrt(disc)) / (2.0 * a_coef),
            (-b_coef - math.sqrt(disc)) / (2.0 * a_coef),
        ):
            if abs(root) < 1.0:
                alpha = root
                break
    return alpha, beta


def estimate_arma_wls(
    series: Series | np.ndarray, cfg: OptimizerConfig = DEFAULT_OPTIMIZER
) -> EstimationResult:
    """Weighted least squares for the ARMA(1,1) with drift.

    Minimizes (X - omega 1)' G^-1(alpha, beta) (X - omega 1) where G is the
    model covariance matrix at unit innovation variance, with omega profiled
    out by generalized least squares.  The outer 2-D search runs a bounded
    Nelder-Mead simplex from a moment-based start plus fixed restarts.
    """
    x = as_values(series)
    T = x.size
    if T < 10:
        raise ValueError("ARMA weighted least squares needs at least 10 observations")
    objective = _arma_objective(x)
    hi = 1.0 - DELTA
    bounds = [(-hi, hi), (-hi, hi)]
    starts = [_arma_moment_start(x), (0.3, 0.3), (-0.3, 0.3), (0.3, -0.3), (-0.3, -0.3)]
    if cfg.init is not None:
        if not isinstance(cfg.init, ARMA11Params):
            raise ValueError("init must be ARMA11Params")
        starts = [(cfg.init.alpha, cfg.init.beta)]
    best = None
    iterations = 0
    for start in starts[: max(cfg.restarts, 1)]:
        res = minimize(
            objective,
            np.asarray(start, dtype=float),
            method="Nelder-Mead",
            bounds=bounds,
            options={"xatol": cfg.tol, "fatol": cfg.tol, "maxiter": cfg.max_iters},
        )
        iterations += int(res.nit)
        if best is None or res.fun < best.fun:
            best = res
    alpha, beta = (float(v) for v in best.x)
    clamped = abs(alpha) >= hi or abs(beta) >= hi
    # keep the estimate off the measure-zero exclusions of the admissible set
    if alpha == 0.0:
        alpha, clamped = DELTA, True
    if beta == 0.0:
        beta, clamped = DELTA, True
    if alpha == -beta:
        alpha, clamped = alpha + DELTA, True
    q_ii, q_ix, q_xx = kernels.arma_gls_quadforms(x, alpha, beta)
    omega = q_ix / q_ii
    q_min = q_xx - q_ix * q_ix / q_ii
    sigma_eps2 = q_min / (T - 3)
    _warn_if_near_common_root(alpha, beta)
    return EstimationResult(
        theta_hat=ARMA11Params(omega, alpha, beta),
        upsilon_hat=arma_wls_covariance(alpha, beta, sigma_eps2),
        objective=float(q_min),
        iterations=iterations,
        converged=bool(best.success),
        clamped=clamped,
        sigma_eps2_hat=float(sigma_eps2),
    )


def _variance_seeds(x: np.ndarray) -> tuple[float, float]:
    """(presample variance seed, presample volatility seed) from the data."""
    ms = float(np.mean(x**2))
    return ms, math.sqrt(ms)


def gaussian_nll(theta: Params, series: Series | np.ndarray) -> float:
    """Gaussian negative log-likelihood of a GARCH-family model.

    The variance recursion starts from a presample state (X_0 = 0 and a
    data-driven seed: the mean square of the series for GARCH, its square
    root for T-GARCH), so sigma~^2_1 = omega + beta * seed.
    """
    check_params(theta)
    x = as_values(series)
    s20, s0 = _variance_seeds(x)
    if isinstance(theta, GARCH11Params):
        return float(kernels.garch_nll(x, theta.omega, theta.alpha, theta.beta, s20))
    if isinstance(theta, TGARCH11Params):
        return float(
            kernels.tgarch_nll(
                x, theta.omega, theta.alpha_plus, theta.alpha_minus, theta.beta, s0
            )
        )
    raise UnsupportedModelError("gaussian_nll is defined for the GARCH family")


def _qml_bounds(kind: ModelKind) -> list[tuple[float, float]]:
    if kind is ModelKind.GARCH11:
        return [(DELTA, 1.0 / DELTA), (0.0, 1.0 / DELTA), (0.0, 1.0 - DELTA)]
    return [
        (DELTA, 1.0 / DELTA),
        (0.0, 1.0 / DELTA),
        (0.0, 1.0 / DELTA),
        (0.0, 1.0 - DELTA),
    ]


def _qml_starts(x: np.ndarray, kind: ModelKind) -> list[np.ndarray]:
    if kind is ModelKind.GARCH11:
        v = max(float(np.mean(x**2)), DELTA)
        pairs = [(0.10, 0.80), (0.05, 0.90), (0.20, 0.60)]
        return [
            np.array([max(v * (1.0 - a - b), DELTA), a, b]) for a, b in pairs
        ]
    mean_abs_eps = math.sqrt(2.0 / math.pi)  # standard normal E|eps|
    s = max(float(np.mean(np.abs(x))) / mean_abs_eps, DELTA)
    half = 0.5 * mean_abs_eps  # E[eps+] = E[eps-] for a symmetric law
    triples = [(0.08, 0.12, 0.78), (0.05, 0.05, 0.88), (0.15, 0.20, 0.60)]
    return [
        np.array([max(s * (1.0 - b - (ap + am) * half), DELTA), ap, am, b])
        for ap, am, b in triples
    ]


def estimate_qml(
    series: Series | np.ndarray,
    kind: ModelKind,
    cfg: OptimizerConfig = DEFAULT_OPTIMIZER,
) -> EstimationResult:
    """Gaussian QML for GARCH(1,1) / T-GARCH(1,1) over the compact box.

    Runs a bounded Nelder-Mead simplex from moment-scaled starts.  The
    covariance estimate is the sample analogue
    (kappa_hat - 1) * [T^-1 sum sigma~_t^-4 d(sigma~^2_t) d(sigma~^2_t)']^-1
    with kappa_hat the standardized fourth moment; for T-GARCH the
    volatility-gradient recursion feeds the same display through
    d(sigma^2) = 2 sigma d(sigma).
    """
    kind = ModelKind(kind)
    if kind not in (ModelKind.GARCH11, ModelKind.TGARCH11):
        raise UnsupportedModelError("QML estimation is defined for the GARCH family")
    x = as_values(series)
    T = x.size
    if T < 50:
        raise ValueError("QML estimation needs at least 50 observations")
    s20, s0 = _variance_seeds(x)

    if kind is ModelKind.GARCH11:
        def nll(arr) -> float:
            return kernels.garch_nll(x, arr[0], arr[1], arr[2], s20)
    else:
        def nll(arr) -> float:
            return kernels.tgarch_nll(x, arr[0], arr[1], arr[2], arr[3], s0)

    bounds = _qml_bounds(kind)
    starts = _qml_starts(x, kind)
    if cfg.init is not None:
        check_params(cfg.init)
        if cfg.init.kind is not kind:
            raise ValueError("init parameters belong to a different model family")
        starts = [cfg.init.as_array()]
    best = None
    iterations = 0
    for start in starts[: max(cfg.restarts, 1)]:
        res = minimize(
            nll,
            start,
            method="Nelder-Mead",
            bounds=bounds,
            options={"xatol": cfg.tol, "fatol": cfg.tol, "maxiter": cfg.max_iters},
        )
        iterations += int(res.nit)
        if best is None or res.fun < best.fun:
            best = res
    arr = np.asarray(best.x, dtype=float)
    clamped = any(arr[j] == lo or arr[j] == hi for j, (lo, hi) in enumerate(bounds))
    if kind is ModelKind.TGARCH11 and arr[1] == 0.0 and arr[2] == 0.0:
        # keep theta_hat inside the admissible set (some slope must be active)
        arr[1], clamped = DELTA, True
    theta = params_from_array(kind, arr)

    if kind is ModelKind.GARCH11:
        sig2, dsig2 = kernels.garch_filter_grad(
            x, theta.omega, theta.alpha, theta.beta, s20
        )
    else:
        sig, dsig = kernels.tgarch_filter_grad(
            x, theta.omega, theta.alpha_plus, theta.alpha_minus, theta.beta, s0
        )
        sig2 = sig**2
        dsig2 = 2.0 * sig[:, None] * dsig
    kurtosis = float(np.mean(x**4 / sig2**2))
    weighted = dsig2 / sig2[:, None]
    j_mat = weighted.T @ weighted / T
    eig = np.linalg.eigvalsh(j_mat)
    if eig[0] <= 0.0 or eig[0] / eig[-1] < 1e-14:
        raise CovarianceSingularError(
            "average outer-product matrix of variance gradients is singular"
        )
    upsilon = (kurtosis - 1.0) * np.linalg.inv(j_mat)
    upsilon = 0.5 * (upsilon + upsilon.T)
    return EstimationResult(
        theta_hat=theta,
        upsilon_hat=upsilon,
        objective=float(best.fun),
        iterations=iterations,
        converged=bool(best.success),
        clamped=clamped,
        kurtosis_hat=kurtosis,
    )


def estimate(
    kind: ModelKind,
    series: Series | np.ndarray,
    cfg: OptimizerConfig = DEFAULT_OPTIMIZER,
) -> EstimationResult:
    """Model-appropriate estimator: OLS, weighted LS, or Gaussian QML."""
    kind = ModelKind(kind)
    if kind is ModelKind.AR1:
        return estimate_ar1_ols(series)
    if kind is ModelKind.ARMA11:
        return estimate_arma_wls(series, cfg)
    return estimate_qml(series, kind, cfg)
