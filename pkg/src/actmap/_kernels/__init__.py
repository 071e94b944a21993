"""Hot numeric kernels with a compiled fast path.

The Cython extension is preferred when it built; set ``ACTMAP_PURE_PYTHON=1``
to force the numpy backend (used by the benchmark and the cross-backend
tests). ``BACKEND`` reports which one is active.
"""

import os

from . import _py

if os.environ.get("ACTMAP_PURE_PYTHON"):
    _impl = _py
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _py

BACKEND = _impl.BACKEND
kde_logpdf = _impl.kde_logpdf
kde_support_grad = _impl.kde_support_grad
segment_sphere_clearances = _impl.segment_sphere_clearances

__all__ = [
    "BACKEND",
    "kde_logpdf",
    "kde_support_grad",
    "segment_sphere_clearances",
]
