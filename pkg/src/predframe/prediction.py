"""One-step prediction functions with analytic derivatives and risk mappings.

The prediction target is the conditional mean (AR/ARMA) or the conditional
variance/volatility (GARCH/T-GARCH) of X_{T+1} written as a series expansion
in the observed past.  Evaluation substitutes zeros for presample values and
for any observations dropped by the truncation point, and sums the remaining
deterministic tail (the terms driven by the intercept alone) in closed form,
so no truncation tolerance enters anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedModelError
from .models import (
    AR1Params,
    ARMA11Params,
    GARCH11Params,
    Params,
    TGARCH11Params,
    as_values,
    check_params,
)


@dataclass(frozen=True)
class Truncation:
    """Truncation applied to an observation window.

    ``t1`` is the 1-based index of the first retained observation within the
    window; ``t1 = 1`` keeps the whole window.  Values before ``t1`` and all
    presample values are replaced by zeros; that zero policy is the only one
    supported and other choices are rejected at construction.
    """

    t1: int = 1
    starting_values: str = "zeros"
    split_constants: str = "zeros"

    def __post_init__(self):
        if self.t1 < 1:
            raise ValueError("t1 must be >= 1")
        if self.starting_values != "zeros" or self.split_constants != "zeros":
            raise ValueError("only the all-zeros substitution policy is supported")

    def retained(self, n: int) -> int:
        """Number of retained observations in a window of length ``n``."""
        if self.t1 > n:
            raise ValueError(f"t1={self.t1} exceeds window length {n}")
        return n - self.t1 + 1


FULL_WINDOW = Truncation(1)


@dataclass(frozen=True)
class PredEval:
    """Prediction value with analytic first and second parameter derivatives.

    ``tail_mass`` is the closed-form value of the deterministic tail beyond
    the retained observations (nonnegative for AR1/GARCH/T-GARCH; for ARMA
    the alternating intercept tail may be signed).
    """

    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    tail_mass: float


def _powers(base: float, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(base^k, k base^(k-1), k (k-1) base^(k-2)) for k = 0..m-1, with the
    k = 0 / k <= 1 entries exactly zero so base = 0 never hits 0**negative."""
    k = np.arange(m, dtype=float)
    p0 = base ** k
    p1 = np.zeros(m)
    p2 = np.zeros(m)
    if m > 1:
        p1[1:] = k[1:] * base ** (k[1:] - 1.0)
    if m > 2:
        p2[2:] = k[2:] * (k[2:] - 1.0) * base ** (k[2:] - 2.0)
    return p0, p1, p2


def evaluate_prediction(theta: Params, window, trunc: Truncation = FULL_WINDOW) -> PredEval:
    """Evaluate the one-step prediction function on ``window`` at ``theta``.

    ``window`` holds X_1..X_T in time order (Series or array).  The returned
    gradient and Hessian are the exact derivatives of the truncated-plus-
    analytic-tail expression; structural zero entries of the Hessian are
    exact zeros, and the Hessian is exactly symmetric as stored.
    """
    check_params(theta)
    w = as_values(window)
    n = w.size
    m = trunc.retained(n)
    ws = w[::-1][:m]  # X_T, X_{T-1}, ..., X_{t1}

    if isinstance(theta, AR1Params):
        xt = float(ws[0])
        return PredEval(
            value=theta.beta * xt,
            gradient=np.array([xt]),
            hessian=np.zeros((1, 1)),
            tail_mass=0.0,
        )

    if isinstance(theta, GARCH11Params):
        om, al, be = theta.omega, theta.alpha, theta.beta
        p0, p1, p2 = _powers(be, m)
        x2 = ws**2
        a0 = float(p0 @ x2)
        a1 = float(p1 @ x2)
        a2 = float(p2 @ x2)
        one_mb = 1.0 - be
        value = om / one_mb + al * a0
        grad = np.array([1.0 / one_mb, a0, om / one_mb**2 + al * a1])
        hess = np.zeros((3, 3))
        hess[0, 2] = hess[2, 0] = 1.0 / one_mb**2
        hess[1, 2] = hess[2, 1] = a1
        hess[2, 2] = 2.0 * om / one_mb**3 + al * a2
        tail = om * be**m / one_mb
        return PredEval(value, grad, hess, tail)

    if isinstance(theta, TGARCH11Params):
        om, ap, am, be = theta.omega, theta.alpha_plus, theta.alpha_minus, theta.beta
        p0, p1, p2 = _powers(be, m)
        xp = np.maximum(ws, 0.0)
        xm = np.maximum(-ws, 0.0)
        p0p, p0m = float(p0 @ xp), float(p0 @ xm)
        p1p, p1m = float(p1 @ xp), float(p1 @ xm)
        p2p, p2m = float(p2 @ xp), float(p2 @ xm)
        one_mb = 1.0 - be
        value = om / one_mb + ap * p0p + am * p0m
        grad = np.array(
            [1.0 / one_mb, p0p, p0m, om / one_mb**2 + ap * p1p + am * p1m]
        )
        hess = np.zeros((4, 4))
        hess[0, 3] = hess[3, 0] = 1.0 / one_mb**2
        hess[1, 3] = hess[3, 1] = p1p
        hess[2, 3] = hess[3, 2] = p1m
        hess[3, 3] = 2.0 * om / one_mb**3 + ap * p2p + am * p2m
        tail = om * be**m / one_mb
        return PredEval(value, grad, hess, tail)

    if isinstance(theta, ARMA11Params):
        om, al, be = theta.omega, theta.alpha, theta.beta
        p0, p1, p2 = _powers(-al, m)
        d0 = float(p0 @ ws)
        d1 = float(p1 @ ws)
        d2 = float(p2 @ ws)
        one_pa = 1.0 + al
        ab = al + be
        value = om * (1.0 - be) / one_pa + ab * d0
        grad = np.array(
            [
                (1.0 - be) / one_pa,
                -om * (1.0 - be) / one_pa**2 + d0 - ab * d1,
                -om / one_pa + d0,
            ]
        )
        hess = np.zeros((3, 3))
        hess[0, 1] = hess[1, 0] = -(1.0 - be) / one_pa**2
        hess[0, 2] = hess[2, 0] = -1.0 / one_pa
        hess[1, 1] = 2.0 * om * (1.0 - be) / one_pa**3 - 2.0 * d1 + ab * d2
        hess[1, 2] = hess[2, 1] = om / one_pa**2 - d1
        tail = -om * ab * (-al) ** m / one_pa
        return PredEval(value, grad, hess, tail)

    raise UnsupportedModelError(f"no prediction function for {theta!r}")


def prediction_gap(theta: Params, window, t1_full: Truncation, t1_trunc: Truncation) -> float:
    """sqrt(T) * |psi^s(t1_trunc) - psi^s(t1_full)| on the given window.

    The two truncated expansions share every term except those whose
    observation one truncation keeps and the other zeroes, so the gap is
    accumulated over exactly that index range.  (The intercept-driven terms
    cancel identically between the two expansions.)  This keeps the gap
    exact even deep in the geometric decay where forming the two values and
    subtracting would lose all significant digits.
    """
    check_params(theta)
    w = as_values(window)
    n = w.size
    m_lo = min(trunc.retained(n) for trunc in (t1_full, t1_trunc))
    m_hi = max(trunc.retained(n) for trunc in (t1_full, t1_trunc))
    if m_lo == m_hi:
        return 0.0
    if isinstance(theta, AR1Params):
        # psi depends on X_T only, which every truncation retains.
        return 0.0
    ws = w[::-1]
    k = np.arange(m_lo, m_hi, dtype=float)
    seg = ws[m_lo:m_hi]
    if isinstance(theta, GARCH11Params):
        diff = theta.alpha * float((theta.beta**k) @ seg**2)
    elif isinstance(theta, TGARCH11Params):
        diff = float(
            (theta.beta**k)
            @ (
                theta.alpha_plus * np.maximum(seg, 0.0)
                + theta.alpha_minus * np.maximum(-seg, 0.0)
            )
        )
    elif isinstance(theta, ARMA11Params):
        diff = (theta.alpha + theta.beta) * float(((-theta.alpha) ** k) @ seg)
    else:
        raise UnsupportedModelError(f"no prediction function for {theta!r}")
    return math.sqrt(n) * abs(diff)


def innovation_quantile(residuals, a: float) -> float:
    """Empirical a-quantile using the left-continuous inverse cdf.

    Returns the ceil(a*n)-th order statistic (1-based), i.e. the smallest
    value whose empirical cdf reaches ``a``.
    """
    if not 0.0 < a < 1.0:
        raise ValueError("quantile level must lie in (0, 1)")
    r = np.asarray(residuals, dtype=float)
    if r.size == 0 or not np.all(np.isfinite(r)):
        raise ValueError("residuals must be nonempty and finite")
    # tiny slack keeps ceil immune to upward float noise in a * n
    j = math.ceil(a * r.size - 1e-9)
    j = min(max(j, 1), r.size)
    return float(np.sort(r)[j - 1])


@dataclass(frozen=True)
class RiskLevel:
    """Tail level ``a`` with innovation quantile xi_a and expected-shortfall
    factor mu_a = -E[eps | eps < xi_a] (positive for small ``a``)."""

    a: float
    xi_a: float
    mu_a: float

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise ValueError("a must lie in (0, 1)")
        if not self.mu_a >= 0.0:
            raise ValueError("mu_a must be nonnegative")

    @classmethod
    def from_residuals(cls, residuals, a: float) -> "RiskLevel":
        xi = innovation_quantile(residuals, a)
        r = np.asarray(residuals, dtype=float)
        tail = r[r < xi]
        if tail.size == 0:
            tail = r[r <= xi]
        mu = -float(tail.mean())
        return cls(a=a, xi_a=xi, mu_a=max(mu, 0.0))


def _volatility_prediction(theta: Params, window, trunc: Truncation) -> float:
    if not isinstance(theta, TGARCH11Params):
        raise UnsupportedModelError(
            "conditional VaR/ES mapping is defined for the T-GARCH(1,1) model"
        )
    return evaluate_prediction(theta, window, trunc).value


def conditional_var(theta: Params, window, trunc: Truncation, xi_a: float) -> float:
    """Conditional value-at-risk -xi_a * sigma_{T+1} for the T-GARCH model."""
    if not np.isfinite(xi_a):
        raise ValueError("xi_a must be finite")
    return -xi_a * _volatility_prediction(theta, window, trunc)


def conditional_es(theta: Params, window, trunc: Truncation, mu_a: float) -> float:
    """Conditional expected shortfall mu_a * sigma_{T+1} for the T-GARCH model.

    With mu_a = -E[eps | eps < xi_a] this is nonnegative for small ``a`` and
    sits above the VaR at the same level.
    """
    if not np.isfinite(mu_a):
        raise ValueError("mu_a must be finite")
    return mu_a * _volatility_prediction(theta, window, trunc)
