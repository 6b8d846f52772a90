"""Hot-path kernels: compiled extension when available, NumPy fallback otherwise.

The per-observation recursions (GARCH/T-GARCH simulation and likelihood
filters, the ARMA generalized-least-squares quadratic forms) dominate the
Monte Carlo runtime.  ``predframe._kernels`` is a Cython build of these
loops; ``predframe._kernels_py`` is a pure NumPy/SciPy implementation with
identical signatures and semantics.  Set ``PREDFRAME_KERNELS=python`` to
force the fallback (used by the parity tests and the benchmark).
"""

import os

from . import _kernels_py

if os.environ.get("PREDFRAME_KERNELS", "").lower() == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build environment
        _impl = _kernels_py
        BACKEND = "python"

garch_simulate = _impl.garch_simulate
tgarch_simulate = _impl.tgarch_simulate
garch_filter = _impl.garch_filter
garch_filter_grad = _impl.garch_filter_grad
tgarch_filter = _impl.tgarch_filter
tgarch_filter_grad = _impl.tgarch_filter_grad
garch_nll = _impl.garch_nll
tgarch_nll = _impl.tgarch_nll
arma_gls_quadforms = _impl.arma_gls_quadforms
