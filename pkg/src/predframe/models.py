"""Model families, admissible parameter sets, innovation laws, and simulation.

Four families are supported: AR(1) without drift, ARMA(1,1) with drift,
GARCH(1,1) on the conditional variance, and threshold GARCH(1,1) on the
conditional standard deviation.  Parameter vectors are small frozen
dataclasses; every downstream operation dispatches on ``params.kind``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Union

import numpy as np
from scipy.signal import lfilter

from . import kernels
from .errors import InvalidParamsError

#: Margin used to keep open-set constraints inside a compact box.
DELTA = 1e-6

DEFAULT_BURN_IN = 500


class ModelKind(str, Enum):
    AR1 = "ar1"
    ARMA11 = "arma11"
    GARCH11 = "garch11"
    TGARCH11 = "tgarch11"


@dataclass(frozen=True)
class AR1Params:
    """X_t = beta * X_{t-1} + eps_t."""

    beta: float

    kind: ClassVar[ModelKind] = ModelKind.AR1
    names: ClassVar[tuple[str, ...]] = ("beta",)

    def as_array(self) -> np.ndarray:
        return np.array([self.beta], dtype=float)


@dataclass(frozen=True)
class ARMA11Params:
    """X_t - omega = alpha * eps_{t-1} + beta * (X_{t-1} - omega) + eps_t."""

    omega: float
    alpha: float
    beta: float

    kind: ClassVar[ModelKind] = ModelKind.ARMA11
    names: ClassVar[tuple[str, ...]] = ("omega", "alpha", "beta")

    def as_array(self) -> np.ndarray:
        return np.array([self.omega, self.alpha, self.beta], dtype=float)


@dataclass(frozen=True)
class GARCH11Params:
    """X_t = sigma_t * eps_t with sigma^2_t = omega + alpha X^2_{t-1} + beta sigma^2_{t-1}."""

    omega: float
    alpha: float
    beta: float

    kind: ClassVar[ModelKind] = ModelKind.GARCH11
    names: ClassVar[tuple[str, ...]] = ("omega", "alpha", "beta")

    def as_array(self) -> np.ndarray:
        return np.array([self.omega, self.alpha, self.beta], dtype=float)


@dataclass(frozen=True)
class TGARCH11Params:
    """X_t = sigma_t * eps_t with
    sigma_t = omega + alpha_plus X^+_{t-1} + alpha_minus X^-_{t-1} + beta sigma_{t-1}."""

    omega: float
    alpha_plus: float
    alpha_minus: float
    beta: float

    kind: ClassVar[ModelKind] = ModelKind.TGARCH11
    names: ClassVar[tuple[str, ...]] = ("omega", "alpha_plus", "alpha_minus", "beta")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.omega, self.alpha_plus, self.alpha_minus, self.beta], dtype=float
        )


Params = Union[AR1Params, ARMA11Params, GARCH11Params, TGARCH11Params]

_PARAM_CLASSES = {
    ModelKind.AR1: AR1Params,
    ModelKind.ARMA11: ARMA11Params,
    ModelKind.GARCH11: GARCH11Params,
    ModelKind.TGARCH11: TGARCH11Params,
}


def param_class(kind: ModelKind):
    return _PARAM_CLASSES[ModelKind(kind)]


def params_from_array(kind: ModelKind, values) -> Params:
    """Build a parameter vector from a flat array; raises on dimension mismatch."""
    cls = param_class(kind)
    values = np.asarray(values, dtype=float).ravel()
    if values.size != len(cls.names):
        raise ValueError(
            f"{cls.__name__} needs {len(cls.names)} entries, got {values.size}"
        )
    return cls(*values.tolist())


def validate_params(theta: Params, delta: float = DELTA) -> list[str]:
    """Check ``theta`` against its family's admissible set.

    Returns a list of human-readable violations; an empty list means the
    parameters are admissible.  The GARCH/T-GARCH log-moment stationarity
    condition involves the innovation law and is reported separately by
    :func:`stationarity_margin`, not here.
    """
    v: list[str] = []
    if isinstance(theta, AR1Params):
        if not abs(theta.beta) <= 1.0 - delta:
            v.append("|beta| <= 1 - delta")
    elif isinstance(theta, ARMA11Params):
        if not abs(theta.alpha) <= 1.0 - delta:
            v.append("|alpha| <= 1 - delta")
        if not abs(theta.beta) <= 1.0 - delta:
            v.append("|beta| <= 1 - delta")
        if theta.alpha == 0.0:
            v.append("alpha != 0")
        if theta.beta == 0.0:
            v.append("beta != 0")
        if theta.alpha == -theta.beta:
            v.append("alpha != -beta")
    elif isinstance(theta, GARCH11Params):
        if not theta.omega >= delta:
            v.append("omega >= delta")
        if not theta.alpha >= 0.0:
            v.append("alpha >= 0")
        if not theta.beta >= 0.0:
            v.append("beta >= 0")
        if not theta.beta <= 1.0 - delta:
            v.append("beta <= 1 - delta")
    elif isinstance(theta, TGARCH11Params):
        if not theta.omega >= delta:
            v.append("omega >= delta")
        if not theta.alpha_plus >= 0.0:
            v.append("alpha_plus >= 0")
        if not theta.alpha_minus >= 0.0:
            v.append("alpha_minus >= 0")
        if not theta.beta >= 0.0:
            v.append("beta >= 0")
        if not theta.beta <= 1.0 - delta:
            v.append("beta <= 1 - delta")
        if not theta.alpha_plus + theta.alpha_minus > 0.0:
            v.append("alpha_plus + alpha_minus > 0")
    else:
        raise TypeError(f"not a parameter vector: {theta!r}")
    if not all(np.isfinite(theta.as_array())):
        v.append("all parameters finite")
    return v


def check_params(theta: Params, delta: float = DELTA) -> None:
    """Raise :class:`InvalidParamsError` when ``theta`` is inadmissible."""
    violations = validate_params(theta, delta)
    if violations:
        raise InvalidParamsError(violations)


@dataclass(frozen=True)
class Innovations:
    """Innovation law for simulation.

    ``law`` is one of ``normal``, ``student_t``, ``empirical``, ``zero``.
    The Student-t draws are rescaled by sqrt((nu-2)/nu) so their variance is
    one; ``nu > 4`` keeps the fourth moment finite.  Empirical draws are
    centered to mean zero at construction and additionally rescaled to unit
    variance when driving a GARCH-family recursion.  ``sigma_eps`` scales
    AR(1)/ARMA(1,1) innovations and must stay at 1 for the GARCH family.

    ``zero`` is a deterministic all-zeros stream intended for recursion unit
    tests only; inference operations reject it.
    """

    law: str
    nu: float | None = None
    draws: tuple[float, ...] | None = None
    sigma_eps: float = 1.0

    def __post_init__(self):
        if self.law not in ("normal", "student_t", "empirical", "zero"):
            raise ValueError(f"unknown innovation law {self.law!r}")
        if self.law == "student_t":
            if self.nu is None or not self.nu > 4.0:
                raise ValueError("student_t innovations need nu > 4")
        if self.law == "empirical":
            if self.draws is None or len(self.draws) < 2:
                raise ValueError("empirical innovations need at least 2 draws")
            arr = np.asarray(self.draws, dtype=float)
            if not np.all(np.isfinite(arr)) or float(np.std(arr)) == 0.0:
                raise ValueError("empirical draws must be finite and non-constant")
        if not self.sigma_eps > 0.0:
            raise ValueError("sigma_eps must be positive")

    @classmethod
    def std_normal(cls, sigma_eps: float = 1.0) -> "Innovations":
        return cls("normal", sigma_eps=sigma_eps)

    @classmethod
    def std_student_t(cls, nu: float, sigma_eps: float = 1.0) -> "Innovations":
        return cls("student_t", nu=nu, sigma_eps=sigma_eps)

    @classmethod
    def empirical(cls, draws, sigma_eps: float = 1.0) -> "Innovations":
        return cls("empirical", draws=tuple(float(d) for d in draws), sigma_eps=sigma_eps)

    @classmethod
    def zero_noise(cls) -> "Innovations":
        return cls("zero")

    @property
    def is_stochastic(self) -> bool:
        return self.law != "zero"

    def _centered_draws(self) -> np.ndarray:
        arr = np.asarray(self.draws, dtype=float)
        return arr - arr.mean()

    def sample(self, rng: np.random.Generator, n: int, unit_variance: bool) -> np.ndarray:
        """Draw ``n`` innovations with mean zero.

        With ``unit_variance`` the draws are standardized to variance one
        (required by the GARCH family); otherwise empirical draws keep their
        own dispersion and the caller applies ``sigma_eps``.
        """
        if self.law == "normal":
            return rng.standard_normal(n)
        if self.law == "student_t":
            return rng.standard_t(self.nu, n) * math.sqrt((self.nu - 2.0) / self.nu)
        if self.law == "empirical":
            pool = self._centered_draws()
            if unit_variance:
                pool = pool / pool.std()
            return rng.choice(pool, size=n, replace=True)
        return np.zeros(n)

    def variance(self) -> float:
        """Variance of one AR/ARMA innovation (includes ``sigma_eps``)."""
        if self.law in ("normal", "student_t"):
            base = 1.0
        elif self.law == "empirical":
            base = float(np.var(self._centered_draws()))
        else:
            base = 0.0
        return self.sigma_eps**2 * base

    def fourth_moment(self) -> float:
        """E[eps^4] of the standardized (unit-variance) law."""
        if self.law == "normal":
            return 3.0
        if self.law == "student_t":
            return 3.0 * (self.nu - 2.0) / (self.nu - 4.0)
        if self.law == "empirical":
            std = self._centered_draws()
            std = std / std.std()
            return float(np.mean(std**4))
        raise ValueError("zero-noise innovations have no standardized moments")


@dataclass(frozen=True)
class Series:
    """Ordered real observations X_{t0}, X_{t0+1}, ... (1-based time contract)."""

    values: np.ndarray
    t0: int = 1

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("series needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series values must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    def slice(self, start: int, stop: int | None = None) -> "Series":
        """Sub-series by 1-based absolute time indices (inclusive bounds)."""
        lo = start - self.t0
        hi = len(self) if stop is None else stop - self.t0 + 1
        if lo < 0 or hi > len(self) or lo >= hi:
            raise ValueError(f"slice [{start}, {stop}] outside series range")
        return Series(self.values[lo:hi], t0=start)


def as_values(window) -> np.ndarray:
    """Accept a Series or array-like window and return a validated float array."""
    if isinstance(window, Series):
        return window.values
    arr = np.asarray(window, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("window must be one-dimensional and nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("window values must be finite")
    return arr


def _require_unit_scale(theta: Params, innov: Innovations) -> None:
    if theta.kind in (ModelKind.GARCH11, ModelKind.TGARCH11) and innov.sigma_eps != 1.0:
        raise InvalidParamsError(["sigma_eps must be 1 for GARCH-family models"])


def simulate(
    theta: Params,
    innov: Innovations,
    T: int,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    initial_state: float | None = None,
) -> Series:
    """Simulate ``T`` observations after discarding a ``burn_in`` prefix.

    The path starts from a zero state (X = 0 for AR/ARMA; sigma^2 =
    omega/(1-beta) for GARCH, sigma = omega/(1-beta) for T-GARCH) so that a
    moderate burn-in makes the retained block effectively stationary.
    Identical inputs produce bit-identical output.

    ``initial_state`` overrides the start state (X_0 for AR/ARMA, sigma^2_0
    or sigma_0 for the GARCH family); it exists for recursion unit tests.
    """
    check_params(theta)
    _require_unit_scale(theta, innov)
    if T < 1:
        raise ValueError("T must be a positive integer")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    n = burn_in + T
    rng = np.random.default_rng(int(seed))

    if isinstance(theta, AR1Params):
        eps = innov.sample(rng, n, unit_variance=False) * innov.sigma_eps
        x0 = 0.0 if initial_state is None else float(initial_state)
        zi = np.array([theta.beta * x0])
        x, _ = lfilter([1.0], [1.0, -theta.beta], eps, zi=zi)
    elif isinstance(theta, ARMA11Params):
        eps = innov.sample(rng, n, unit_variance=False) * innov.sigma_eps
        z0 = 0.0 if initial_state is None else float(initial_state) - theta.omega
        zi = np.array([theta.beta * z0])
        z, _ = lfilter([1.0, theta.alpha], [1.0, -theta.beta], eps, zi=zi)
        x = theta.omega + z
    elif isinstance(theta, GARCH11Params):
        eps = innov.sample(rng, n, unit_variance=True)
        s20 = (
            theta.omega / (1.0 - theta.beta)
            if initial_state is None
            else float(initial_state)
        )
        x = kernels.garch_simulate(eps, theta.omega, theta.alpha, theta.beta, s20)
    else:
        eps = innov.sample(rng, n, unit_variance=True)
        s0 = (
            theta.omega / (1.0 - theta.beta)
            if initial_state is None
            else float(initial_state)
        )
        x = kernels.tgarch_simulate(
            eps, theta.omega, theta.alpha_plus, theta.alpha_minus, theta.beta, s0
        )
    return Series(x[burn_in:], t0=1)


def stationarity_margin(
    theta: Params, innov: Innovations, n_draws: int = 1_000_000, seed: int = 0
) -> float:
    """Monte Carlo estimate of the log-moment strict-stationarity margin.

    Returns E[ln(alpha eps^2 + beta)] for GARCH(1,1) and
    E[ln(alpha+ eps+ + alpha- eps- + beta)] for T-GARCH(1,1); a negative
    value certifies strict stationarity up to Monte Carlo error.  Degenerate
    parameter/draw combinations with a zero log argument yield ``-inf``.
    """
    check_params(theta)
    if n_draws < 1000:
        raise ValueError("n_draws must be at least 1000")
    if not innov.is_stochastic:
        raise ValueError("stationarity_margin needs a stochastic innovation law")
    rng = np.random.default_rng(int(seed))
    eps = innov.sample(rng, n_draws, unit_variance=True)
    if isinstance(theta, GARCH11Params):
        arg = theta.alpha * eps**2 + theta.beta
    elif isinstance(theta, TGARCH11Params):
        arg = (
            theta.alpha_plus * np.maximum(eps, 0.0)
            + theta.alpha_minus * np.maximum(-eps, 0.0)
            + theta.beta
        )
    else:
        raise ValueError("stationarity margin is defined for the GARCH family only")
    with np.errstate(divide="ignore"):
        return float(np.mean(np.log(arg)))
