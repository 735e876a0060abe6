"""Backend selection for the stable-law kernels.

The compiled extension is used when importable; set ``STABLEBELIEF_PURE=1``
to force the pure-Python implementation.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if not os.environ.get("STABLEBELIEF_PURE"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

METHODS = {"auto": 0, "nolan": 1, "fourier": 2}

pdf_std = _impl.pdf_std
cdf_sf_std = _impl.cdf_sf_std
pl_conj_std = _impl.pl_conj_std

__all__ = ["BACKEND", "METHODS", "pdf_std", "cdf_sf_std", "pl_conj_std"]
