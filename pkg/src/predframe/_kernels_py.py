"""Pure NumPy/SciPy reference implementation of the hot-path kernels.

Same contracts as the compiled module ``predframe._kernels``; the likelihood
filters are expressed as first-order IIR filters so the fallback stays fast,
while the data-dependent simulation recursions use plain loops.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import lfilter

_LOG_2PI = math.log(2.0 * math.pi)


def garch_simulate(eps, omega, alpha, beta, s20):
    """Simulate x_t = sigma_t eps_t with sigma^2_t = omega + alpha x^2_{t-1} + beta sigma^2_{t-1}.

    The recursion starts from state (x_0 = 0, sigma^2_0 = s20).
    """
    eps = np.asarray(eps, dtype=float)
    n = eps.size
    x = np.empty(n)
    s2 = float(s20)
    xp = 0.0
    for i in range(n):
        s2 = omega + alpha * xp * xp + beta * s2
        xp = math.sqrt(s2) * eps[i]
        x[i] = xp
    return x


def tgarch_simulate(eps, omega, alpha_plus, alpha_minus, beta, s0):
    """Simulate x_t = sigma_t eps_t with
    sigma_t = omega + alpha+ x^+_{t-1} + alpha- x^-_{t-1} + beta sigma_{t-1},
    starting from (x_0 = 0, sigma_0 = s0)."""
    eps = np.asarray(eps, dtype=float)
    n = eps.size
    x = np.empty(n)
    s = float(s0)
    xp = 0.0
    for i in range(n):
        s = omega + alpha_plus * max(xp, 0.0) + alpha_minus * max(-xp, 0.0) + beta * s
        xp = s * eps[i]
        x[i] = xp
    return x


def garch_filter(x, omega, alpha, beta, s20):
    """Conditional-variance path sigma~^2_t for observed x, t = 1..T.

    Presample x is zero and the presample variance seed is ``s20``, so
    sigma~^2_1 = omega + beta * s20.
    """
    x = np.asarray(x, dtype=float)
    drive = np.empty(x.size)
    drive[0] = omega + beta * s20
    drive[1:] = omega + alpha * x[:-1] ** 2
    return lfilter([1.0], [1.0, -beta], drive)


def garch_filter_grad(x, omega, alpha, beta, s20):
    """sigma~^2 path plus its gradient w.r.t. (omega, alpha, beta), shape (T, 3)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    sig2 = garch_filter(x, omega, alpha, beta, s20)
    a = [1.0, -beta]
    d_omega = lfilter([1.0], a, np.ones(n))
    drive = np.zeros(n)
    drive[1:] = x[:-1] ** 2
    d_alpha = lfilter([1.0], a, drive)
    drive = np.empty(n)
    drive[0] = s20
    drive[1:] = sig2[:-1]
    d_beta = lfilter([1.0], a, drive)
    return sig2, np.column_stack([d_omega, d_alpha, d_beta])


def tgarch_filter(x, omega, alpha_plus, alpha_minus, beta, s0):
    """Conditional-volatility path sigma~_t for observed x; seed sigma~_1 = omega + beta*s0."""
    x = np.asarray(x, dtype=float)
    drive = np.empty(x.size)
    drive[0] = omega + beta * s0
    drive[1:] = (
        omega
        + alpha_plus * np.maximum(x[:-1], 0.0)
        + alpha_minus * np.maximum(-x[:-1], 0.0)
    )
    return lfilter([1.0], [1.0, -beta], drive)


def tgarch_filter_grad(x, omega, alpha_plus, alpha_minus, beta, s0):
    """sigma~ path plus gradient w.r.t. (omega, alpha+, alpha-, beta), shape (T, 4)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    sig = tgarch_filter(x, omega, alpha_plus, alpha_minus, beta, s0)
    a = [1.0, -beta]
    d_omega = lfilter([1.0], a, np.ones(n))
    drive = np.zeros(n)
    drive[1:] = np.maximum(x[:-1], 0.0)
    d_plus = lfilter([1.0], a, drive)
    drive = np.zeros(n)
    drive[1:] = np.maximum(-x[:-1], 0.0)
    d_minus = lfilter([1.0], a, drive)
    drive = np.empty(n)
    drive[0] = s0
    drive[1:] = sig[:-1]
    d_beta = lfilter([1.0], a, drive)
    return sig, np.column_stack([d_omega, d_plus, d_minus, d_beta])


def garch_nll(x, omega, alpha, beta, s20):
    """Gaussian negative log-likelihood 0.5 * sum(log(2 pi s2_t) + x_t^2 / s2_t)."""
    x = np.asarray(x, dtype=float)
    sig2 = garch_filter(x, omega, alpha, beta, s20)
    return 0.5 * float(np.sum(np.log(sig2) + x**2 / sig2) + x.size * _LOG_2PI)


def tgarch_nll(x, omega, alpha_plus, alpha_minus, beta, s0):
    """Gaussian negative log-likelihood with sigma~_t from the T-GARCH filter."""
    x = np.asarray(x, dtype=float)
    sig = tgarch_filter(x, omega, alpha_plus, alpha_minus, beta, s0)
    sig2 = sig**2
    return 0.5 * float(np.sum(np.log(sig2) + x**2 / sig2) + x.size * _LOG_2PI)


def arma_gls_quadforms(x, alpha, beta):
    """Quadratic forms (1'G^-1 1, 1'G^-1 x, x'G^-1 x) for the ARMA(1,1)
    weighting matrix G of (X_1, ..., X_T).

    G is the model covariance matrix at unit innovation variance: its
    off-diagonal entries follow the lag-k autocorrelation formula scaled by
    the diagonal gamma0 = (1 + 2 alpha beta + alpha^2) / (1 - beta^2).  This
    innovation-variance normalization (rather than unit diagonal) is what
    makes the weighted least squares criterion consistent and makes
    Q / (T - 3) estimate the innovation variance.

    Computed by the exact O(T) innovations recursion: v_t = z_t - zhat_t are
    one-step prediction errors with variances F_t, where

        F_1 = gamma0,
        zhat_{t+1} = beta z_t + (alpha / F_t) v_t,
        F_{t+1} = 1 + alpha^2 - alpha^2 / F_t,

    and u'G^-1 w = sum_t v^u_t v^w_t / F_t.  The same linear transformation
    is applied to the ones vector.
    """
    x = np.asarray(x, dtype=float)
    gamma0 = (1.0 + 2.0 * alpha * beta + alpha * alpha) / (1.0 - beta * beta)
    f = gamma0
    q_ii = 0.0
    q_ix = 0.0
    q_xx = 0.0
    zhat_x = 0.0
    zhat_i = 0.0
    for t in range(x.size):
        vx = x[t] - zhat_x
        vi = 1.0 - zhat_i
        q_xx += vx * vx / f
        q_ix += vi * vx / f
        q_ii += vi * vi / f
        g = alpha / f
        zhat_x = beta * x[t] + g * vx
        zhat_i = beta + g * vi
        f = 1.0 + alpha * alpha - alpha * alpha / f
    return q_ii, q_ix, q_xx
