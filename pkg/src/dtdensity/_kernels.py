"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting the environment
variable ``DTDENSITY_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

from ._pykernels import flip

if os.environ.get("DTDENSITY_PURE_PYTHON", "") not in ("", "0"):
    from ._pykernels import BACKEND, delaunay_core, incircle, orient2d
else:
    try:
        from ._ckernels import BACKEND, delaunay_core, incircle, orient2d
    except ImportError:
        from ._pykernels import BACKEND, delaunay_core, incircle, orient2d

__all__ = ["BACKEND", "delaunay_core", "flip", "incircle", "orient2d"]
