"""Hot-path kernels with compiled/pure-Python selection at import.

The compiled extension (``_rsk``) is preferred; set the environment variable
``PLANCHEREL_AIRY_PURE=1`` to force the pure-Python fallback, e.g. for the
benchmark in ``benchmarks/bench_kernels.py``.
"""

import os
import warnings

if os.environ.get("PLANCHEREL_AIRY_PURE"):
    from . import _rsk_py as _impl
else:
    try:
        from . import _rsk as _impl
    except ImportError:  # pragma: no cover - build-dependent
        warnings.warn(
            "compiled RSK kernels unavailable; falling back to pure Python "
            "(large simulations will be slow)",
            RuntimeWarning,
            stacklevel=2,
        )
        from . import _rsk_py as _impl

rsk_shape = _impl.rsk_shape
rsk_shape_snapshots = _impl.rsk_shape_snapshots
rsk_shapes_bulk = _impl.rsk_shapes_bulk
IMPLEMENTATION = _impl.IMPLEMENTATION

__all__ = [
    "rsk_shape",
    "rsk_shape_snapshots",
    "rsk_shapes_bulk",
    "IMPLEMENTATION",
]
