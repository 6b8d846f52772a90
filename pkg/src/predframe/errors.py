"""Exception and warning types shared across the package."""


class PredframeError(Exception):
    """Base class for domain errors raised by predframe."""


class InvalidParamsError(PredframeError):
    """Parameter vector violates the model family's admissible set."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid parameters: " + "; ".join(self.violations))


class DegenerateSeriesError(PredframeError):
    """Series carries no usable variation for the requested estimator."""


class InfeasibleSplitError(PredframeError):
    """Requested sample split cannot satisfy 1 < T_E < T_P <= T."""


class CovarianceSingularError(PredframeError):
    """Average outer-product matrix is numerically singular."""


class UnsupportedModelError(PredframeError):
    """Operation is not defined for the given model family."""


class SeriesParseError(PredframeError):
    """CSV input is malformed; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


class NearCommonRootWarning(UserWarning):
    """ARMA estimate sits close to the common-root region where the
    asymptotic covariance blows up."""
