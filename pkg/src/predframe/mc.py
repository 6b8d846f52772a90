"""Monte Carlo harness: coverage experiments, derivative checks, truncation
decay tables, and estimator-normality diagnostics.

Every replication derives its random streams only from (seed, replication
index), aggregation runs in replication order, and replication-level
estimation failures are counted rather than fatal, so reports are
bit-identical no matter how many worker processes execute them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import get_context

import numpy as np
from scipy.special import ndtr

from .errors import PredframeError
from .estimation import (
    DEFAULT_OPTIMIZER,
    OptimizerConfig,
    arma_wls_covariance,
    estimate,
)
from . import kernels
from .intervals import (
    Scheme,
    ci_naive_plugin,
    ci_sample_split,
    ci_two_process,
    make_split_plan,
)
from .models import (
    AR1Params,
    ARMA11Params,
    GARCH11Params,
    Innovations,
    ModelKind,
    Params,
    as_values,
    check_params,
    params_from_array,
    simulate,
)
from .prediction import FULL_WINDOW, Truncation, evaluate_prediction, prediction_gap

#: spawn-key offsets reserved for non-replication streams
_DIAG_STREAM = 1 << 40
_COV_STREAM = (1 << 40) + 1


def _stream_seeds(seed: int, index: int, n: int) -> list[int]:
    ss = np.random.SeedSequence(entropy=[int(seed) & (2**63 - 1), int(index)])
    return [int(s) for s in ss.generate_state(n, dtype=np.uint64)]


def ks_statistic(sample) -> float:
    """One-sample Kolmogorov-Smirnov distance between the empirical cdf of
    ``sample`` and the standard normal cdf."""
    z = np.sort(np.asarray(sample, dtype=float))
    if z.size == 0:
        raise ValueError("KS statistic needs a nonempty sample")
    n = z.size
    cdf = ndtr(z)
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(steps - cdf), np.max(cdf - (steps - 1.0 / n))))


def asymptotic_covariance(
    theta0: Params,
    innov: Innovations,
    n_obs: int = 1_000_000,
    seed: int = 0,
    warm: int = 2000,
) -> np.ndarray:
    """Asymptotic covariance of sqrt(T)(theta_hat - theta0).

    Closed form for AR(1) and ARMA(1,1); for the GARCH family the population
    expectation in the QML covariance is replaced by a single long simulated
    path average (``n_obs`` observations after the first ``warm`` are
    dropped from the averages so the filter start washes out).
    """
    check_params(theta0)
    if isinstance(theta0, AR1Params):
        return np.array([[1.0 - theta0.beta**2]])
    if isinstance(theta0, ARMA11Params):
        return arma_wls_covariance(theta0.alpha, theta0.beta, innov.variance())
    if not innov.is_stochastic:
        raise ValueError("asymptotic covariance needs a stochastic innovation law")
    x = simulate(theta0, innov, n_obs, burn_in=warm, seed=seed).values
    if isinstance(theta0, GARCH11Params):
        sig2, dsig2 = kernels.garch_filter_grad(
            x, theta0.omega, theta0.alpha, theta0.beta, float(np.mean(x**2))
        )
    else:
        sig, dsig = kernels.tgarch_filter_grad(
            x,
            theta0.omega,
            theta0.alpha_plus,
            theta0.alpha_minus,
            theta0.beta,
            float(np.sqrt(np.mean(x**2))),
        )
        sig2 = sig**2
        dsig2 = 2.0 * sig[:, None] * dsig
    weighted = (dsig2 / sig2[:, None])[warm:]
    j_mat = weighted.T @ weighted / weighted.shape[0]
    kappa = innov.fourth_moment()
    ups = (kappa - 1.0) * np.linalg.inv(j_mat)
    return 0.5 * (ups + ups.T)


def gradient_check(
    theta: Params, window, trunc: Truncation = FULL_WINDOW, h: float = 1e-5
) -> float:
    """Max relative discrepancy between analytic and central finite-difference
    derivatives of the prediction function.

    Each entry is scored as |fd - analytic| / max(|analytic|, 0.01), which
    enforces a relative comparison away from zero and an absolute one near
    it; the gradient is checked against differences of the value and the
    Hessian against differences of the gradient.
    """
    if not h > 0.0:
        raise ValueError("step size must be positive")
    w = as_values(window)
    ev = evaluate_prediction(theta, w, trunc)
    arr = theta.as_array()
    worst = 0.0
    for j in range(arr.size):
        up, dn = arr.copy(), arr.copy()
        up[j] += h
        dn[j] -= h
        step = up[j] - dn[j]  # realized step absorbs the rounding of arr[j] +/- h
        ev_up = evaluate_prediction(params_from_array(theta.kind, up), w, trunc)
        ev_dn = evaluate_prediction(params_from_array(theta.kind, dn), w, trunc)
        fd_grad = (ev_up.value - ev_dn.value) / step
        worst = max(
            worst, abs(fd_grad - ev.gradient[j]) / max(abs(ev.gradient[j]), 1e-2)
        )
        fd_hess_col = (ev_up.gradient - ev_dn.gradient) / step
        for i in range(arr.size):
            worst = max(
                worst,
                abs(fd_hess_col[i] - ev.hessian[i, j]) / max(abs(ev.hessian[i, j]), 1e-2),
            )
    return worst


def truncation_decay(theta: Params, window, t1_grid) -> list[tuple[int, float]]:
    """Table of (t1, sqrt(T) |psi^s(t1) - psi^s(1)|), sorted by t1."""
    w = as_values(window)
    full = Truncation(1)
    table = []
    for t1 in sorted(int(t) for t in t1_grid):
        table.append((t1, prediction_gap(theta, w, full, Truncation(t1))))
    return table


@dataclass(frozen=True)
class ExperimentConfig:
    """One coverage experiment: model, truth, sampling sizes, and schemes."""

    kind: ModelKind
    theta0: Params
    innov: Innovations
    T: int
    reps: int
    seed: int
    schemes: tuple[str, ...] = (Scheme.TWO_PROCESS.value, Scheme.SAMPLE_SPLIT.value)
    level: float = 0.9
    a_exp: float = 0.5
    b_exp: float = 0.8
    t1: int = 1
    burn_in: int = 500
    exclude_clamped: bool = False
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.theta0.kind is not self.kind:
            raise ValueError("theta0 does not belong to the configured model family")
        check_params(self.theta0)
        if self.reps < 1 or self.T < 8:
            raise ValueError("need reps >= 1 and T >= 8")
        if not self.innov.is_stochastic:
            raise ValueError("coverage experiments need a stochastic innovation law")
        schemes = tuple(Scheme(s).value for s in self.schemes)
        object.__setattr__(self, "schemes", schemes)


@dataclass
class SchemeCoverage:
    coverage: float
    avg_half_width: float
    reps_used: int
    failures: int
    covered: int
    clamped: int


@dataclass
class CoverageReport:
    schemes: dict[str, SchemeCoverage]
    diagnostics: dict

    def to_dict(self) -> dict:
        return {
            "schemes": {k: vars(v).copy() for k, v in self.schemes.items()},
            "diagnostics": dict(self.diagnostics),
        }


def _coverage_rep(cfg: ExperimentConfig, index: int) -> dict:
    """One replication; every random draw derives from (cfg.seed, index)."""
    x_seed, y_seed = _stream_seeds(cfg.seed, index, 2)
    x = simulate(cfg.theta0, cfg.innov, cfg.T, cfg.burn_in, x_seed)
    trunc = Truncation(cfg.t1)
    out: dict = {"theta_hat": None}
    full_fit = None  # shared by the 2ip and naive schemes (both fit all of x)
    for scheme in cfg.schemes:
        try:
            if scheme == Scheme.SAMPLE_SPLIT.value:
                plan = make_split_plan(cfg.T, cfg.a_exp, cfg.b_exp)
                fit = estimate(cfg.kind, x.values[: plan.T_E], cfg.optimizer)
                ci = ci_sample_split(cfg.kind, x, plan, cfg.level, cfg.optimizer, fit)
                truth = evaluate_prediction(
                    cfg.theta0, x.values[plan.T_P - 1 :], FULL_WINDOW
                ).value
                scale = plan.m_TE
            else:
                if full_fit is None:
                    full_fit = estimate(cfg.kind, x, cfg.optimizer)
                fit = full_fit
                scale = math.sqrt(cfg.T)
                if scheme == Scheme.TWO_PROCESS.value:
                    y = simulate(cfg.theta0, cfg.innov, cfg.T, cfg.burn_in, y_seed)
                    ci = ci_two_process(
                        cfg.kind, x, y, trunc, cfg.level, cfg.optimizer, fit
                    )
                    truth = evaluate_prediction(cfg.theta0, y, trunc).value
                else:
                    ci = ci_naive_plugin(
                        cfg.kind, x, trunc, cfg.level, cfg.optimizer, fit
                    )
                    truth = evaluate_prediction(cfg.theta0, x, trunc).value
        except (PredframeError, np.linalg.LinAlgError) as exc:
            out[scheme] = {"failed": True, "error": str(exc)}
            continue
        out[scheme] = {
            "failed": False,
            "covered": bool(ci.covers(truth)),
            "half_width": float(ci.half_width),
            "clamped": bool(ci.clamped),
        }
        if out["theta_hat"] is None:
            out["theta_hat"] = (fit.theta_hat.as_array(), scale)
    return out


def _normality_rep(cfg: ExperimentConfig, estimator, index: int):
    (x_seed,) = _stream_seeds(cfg.seed, index, 1)
    x = simulate(cfg.theta0, cfg.innov, cfg.T, cfg.burn_in, x_seed)
    try:
        if estimator is None:
            fit = estimate(cfg.kind, x, cfg.optimizer)
            return fit.theta_hat.as_array(), fit.clamped
        return np.asarray(estimator(x), dtype=float), False
    except (PredframeError, np.linalg.LinAlgError):
        return None, False


def _map_indices(worker, indices, jobs: int):
    if jobs <= 1:
        return [worker(i) for i in indices]
    with get_context("fork").Pool(processes=jobs) as pool:
        return pool.map(worker, indices, chunksize=max(1, len(indices) // (4 * jobs)))


def run_coverage(cfg: ExperimentConfig, jobs: int = 1) -> CoverageReport:
    """Coverage experiment over ``cfg.reps`` replications.

    Per replication and scheme, a fresh process realization is simulated,
    the scheme's interval is built, and coverage of the true prediction
    value (theta0 evaluated on the same finite window) is recorded.
    Replications whose estimation fails count as failures; with
    ``cfg.exclude_clamped`` replications whose estimate hit the parameter
    boundary are excluded the same way.  The report is bit-identical for
    any ``jobs``.
    """
    rows = _map_indices(partial(_coverage_rep, cfg), range(cfg.reps), jobs)
    schemes: dict[str, SchemeCoverage] = {}
    for scheme in cfg.schemes:
        covered = half_sum = 0.0
        used = failures = clamped = 0
        for row in rows:
            cell = row[scheme]
            if cell["failed"]:
                failures += 1
                continue
            if cell["clamped"]:
                clamped += 1
                if cfg.exclude_clamped:
                    failures += 1
                    continue
            used += 1
            covered += cell["covered"]
            half_sum += cell["half_width"]
        schemes[scheme] = SchemeCoverage(
            coverage=covered / used if used else float("nan"),
            avg_half_width=half_sum / used if used else float("nan"),
            reps_used=used,
            failures=failures,
            covered=int(covered),
            clamped=clamped,
        )

    (diag_seed,) = _stream_seeds(cfg.seed, _DIAG_STREAM, 1)
    window = simulate(cfg.theta0, cfg.innov, cfg.T, cfg.burn_in, diag_seed)
    grid = sorted({max(1, cfg.T // 4), max(1, cfg.T // 2), max(1, (3 * cfg.T) // 4)})
    diagnostics = {
        "gradient_check_max_err": gradient_check(cfg.theta0, window, Truncation(cfg.t1)),
        "decay_table": truncation_decay(cfg.theta0, window, grid),
        "ks_statistic": None,
    }
    # estimator-normality diagnostic from the replication fits themselves
    fits = [row["theta_hat"] for row in rows if row["theta_hat"] is not None]
    if len(fits) >= 10:
        (cov_seed,) = _stream_seeds(cfg.seed, _COV_STREAM, 1)
        upsilon0 = asymptotic_covariance(cfg.theta0, cfg.innov, seed=cov_seed)
        scale = np.sqrt(np.diag(upsilon0))
        devs = np.vstack(
            [m * (arr - cfg.theta0.as_array()) / scale for arr, m in fits]
        )
        diagnostics["ks_statistic"] = max(
            ks_statistic(devs[:, j]) for j in range(devs.shape[1])
        )
    return CoverageReport(schemes=schemes, diagnostics=diagnostics)


@dataclass
class NormalityResult:
    ks_statistic: float
    per_coordinate: list[float]
    reps_used: int
    failures: int
    clamped: int


def normality_check(
    kind: ModelKind,
    theta0: Params,
    innov: Innovations,
    T: int,
    reps: int,
    seed: int,
    jobs: int = 1,
    optimizer: OptimizerConfig = DEFAULT_OPTIMIZER,
    upsilon0: np.ndarray | None = None,
    _estimator=None,
) -> NormalityResult:
    """Kolmogorov-Smirnov check of the estimator's asymptotic normality.

    Simulates ``reps`` independent samples at ``theta0``, standardizes each
    coordinate of sqrt(T)(theta_hat - theta0) by the true asymptotic
    standard deviation (closed form for AR/ARMA, long-run simulation for the
    GARCH family, or ``upsilon0`` when supplied), and returns the largest
    per-coordinate KS distance from N(0, 1).  Failed replications are
    dropped and counted.  ``_estimator`` swaps in an arbitrary estimator
    callable (testing hook).
    """
    if reps < 200:
        raise ValueError("normality check needs at least 200 replications")
    cfg = ExperimentConfig(
        kind=kind,
        theta0=theta0,
        innov=innov,
        T=T,
        reps=reps,
        seed=seed,
        optimizer=optimizer,
    )
    rows = _map_indices(partial(_normality_rep, cfg, _estimator), range(reps), jobs)
    estimates = [r[0] for r in rows if r[0] is not None]
    failures = sum(1 for r in rows if r[0] is None)
    clamped = sum(1 for r in rows if r[1])
    if not estimates:
        raise PredframeError("every replication failed to estimate")
    if upsilon0 is None:
        (cov_seed,) = _stream_seeds(seed, _COV_STREAM, 1)
        upsilon0 = asymptotic_covariance(theta0, innov, seed=cov_seed)
    devs = math.sqrt(T) * (np.vstack(estimates) - theta0.as_array())
    scale = np.sqrt(np.diag(upsilon0))
    per_coord = [float(ks_statistic(devs[:, j] / scale[j])) for j in range(devs.shape[1])]
    return NormalityResult(
        ks_statistic=max(per_coord),
        per_coordinate=per_coord,
        reps_used=len(estimates),
        failures=failures,
        clamped=clamped,
    )
