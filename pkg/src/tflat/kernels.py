"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback keeps the package
fully functional without a toolchain.  Set TFLAT_FORCE_PYTHON_KERNELS=1 to
pin the fallback (used by the benchmark and parity tests).
"""

import os

if os.environ.get("TFLAT_FORCE_PYTHON_KERNELS"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND

multiplicity_1d = _impl.multiplicity_1d
multiplicity_2d = _impl.multiplicity_2d
shift_multiplicity_sum_1d = _impl.shift_multiplicity_sum_1d
shift_multiplicity_sum_2d = _impl.shift_multiplicity_sum_2d
