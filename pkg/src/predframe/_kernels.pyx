# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-path kernels; see predframe._kernels_py for the reference
implementation and the contract docstrings."""

from libc.math cimport log, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double LOG_2PI = 1.8378770664093453


def garch_simulate(cnp.ndarray[cnp.float64_t, ndim=1] eps,
                   double omega, double alpha, double beta, double s20):
    cdef Py_ssize_t n = eps.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.empty(n)
    cdef double s2 = s20
    cdef double xp = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        s2 = omega + alpha * xp * xp + beta * s2
        xp = sqrt(s2) * eps[i]
        x[i] = xp
    return x


def tgarch_simulate(cnp.ndarray[cnp.float64_t, ndim=1] eps,
                    double omega, double alpha_plus, double alpha_minus,
                    double beta, double s0):
    cdef Py_ssize_t n = eps.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.empty(n)
    cdef double s = s0
    cdef double xp = 0.0
    cdef double up, dn
    cdef Py_ssize_t i
    for i in range(n):
        up = xp if xp > 0.0 else 0.0
        dn = -xp if xp < 0.0 else 0.0
        s = omega + alpha_plus * up + alpha_minus * dn + beta * s
        xp = s * eps[i]
        x[i] = xp
    return x


def garch_filter(cnp.ndarray[cnp.float64_t, ndim=1] x,
                 double omega, double alpha, double beta, double s20):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sig2 = np.empty(n)
    cdef double s2 = omega + beta * s20
    cdef Py_ssize_t t
    sig2[0] = s2
    for t in range(1, n):
        s2 = omega + alpha * x[t - 1] * x[t - 1] + beta * s2
        sig2[t] = s2
    return sig2


def garch_filter_grad(cnp.ndarray[cnp.float64_t, ndim=1] x,
                      double omega, double alpha, double beta, double s20):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sig2 = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grad = np.empty((n, 3))
    cdef double s2 = omega + beta * s20
    cdef double dw = 1.0, da = 0.0, db = s20
    cdef double s2_prev, x2
    cdef Py_ssize_t t
    sig2[0] = s2
    grad[0, 0] = dw
    grad[0, 1] = da
    grad[0, 2] = db
    for t in range(1, n):
        s2_prev = s2
        x2 = x[t - 1] * x[t - 1]
        s2 = omega + alpha * x2 + beta * s2_prev
        dw = 1.0 + beta * dw
        da = x2 + beta * da
        db = s2_prev + beta * db
        sig2[t] = s2
        grad[t, 0] = dw
        grad[t, 1] = da
        grad[t, 2] = db
    return sig2, grad


def tgarch_filter(cnp.ndarray[cnp.float64_t, ndim=1] x,
                  double omega, double alpha_plus, double alpha_minus,
                  double beta, double s0):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sig = np.empty(n)
    cdef double s = omega + beta * s0
    cdef double xv, up, dn
    cdef Py_ssize_t t
    sig[0] = s
    for t in range(1, n):
        xv = x[t - 1]
        up = xv if xv > 0.0 else 0.0
        dn = -xv if xv < 0.0 else 0.0
        s = omega + alpha_plus * up + alpha_minus * dn + beta * s
        sig[t] = s
    return sig


def tgarch_filter_grad(cnp.ndarray[cnp.float64_t, ndim=1] x,
                       double omega, double alpha_plus, double alpha_minus,
                       double beta, double s0):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sig = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grad = np.empty((n, 4))
    cdef double s = omega + beta * s0
    cdef double dw = 1.0, dp = 0.0, dm = 0.0, db = s0
    cdef double s_prev, xv, up, dn
    cdef Py_ssize_t t
    sig[0] = s
    grad[0, 0] = dw
    grad[0, 1] = dp
    grad[0, 2] = dm
    grad[0, 3] = db
    for t in range(1, n):
        s_prev = s
        xv = x[t - 1]
        up = xv if xv > 0.0 else 0.0
        dn = -xv if xv < 0.0 else 0.0
        s = omega + alpha_plus * up + alpha_minus * dn + beta * s_prev
        dw = 1.0 + beta * dw
        dp = up + beta * dp
        dm = dn + beta * dm
        db = s_prev + beta * db
        sig[t] = s
        grad[t, 0] = dw
        grad[t, 1] = dp
        grad[t, 2] = dm
        grad[t, 3] = db
    return sig, grad


def garch_nll(cnp.ndarray[cnp.float64_t, ndim=1] x,
              double omega, double alpha, double beta, double s20):
    cdef Py_ssize_t n = x.shape[0]
    cdef double s2 = omega + beta * s20
    cdef double acc = log(s2) + x[0] * x[0] / s2
    cdef Py_ssize_t t
    for t in range(1, n):
        s2 = omega + alpha * x[t - 1] * x[t - 1] + beta * s2
        acc += log(s2) + x[t] * x[t] / s2
    return 0.5 * (acc + n * LOG_2PI)


def tgarch_nll(cnp.ndarray[cnp.float64_t, ndim=1] x,
               double omega, double alpha_plus, double alpha_minus,
               double beta, double s0):
    cdef Py_ssize_t n = x.shape[0]
    cdef double s = omega + beta * s0
    cdef double acc = log(s * s) + x[0] * x[0] / (s * s)
    cdef double xv, up, dn
    cdef Py_ssize_t t
    for t in range(1, n):
        xv = x[t - 1]
        up = xv if xv > 0.0 else 0.0
        dn = -xv if xv < 0.0 else 0.0
        s = omega + alpha_plus * up + alpha_minus * dn + beta * s
        acc += log(s * s) + x[t] * x[t] / (s * s)
    return 0.5 * (acc + n * LOG_2PI)


def arma_gls_quadforms(cnp.ndarray[cnp.float64_t, ndim=1] x,
                       double alpha, double beta):
    cdef Py_ssize_t n = x.shape[0]
    cdef double gamma0 = (1.0 + 2.0 * alpha * beta + alpha * alpha) / (1.0 - beta * beta)
    cdef double f = gamma0
    cdef double q_ii = 0.0, q_ix = 0.0, q_xx = 0.0
    cdef double zhat_x = 0.0, zhat_i = 0.0
    cdef double vx, vi, g
    cdef Py_ssize_t t
    for t in range(n):
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
