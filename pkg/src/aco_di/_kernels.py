"""Pick the construction kernels at import time.

The compiled ``_ckernels`` extension is preferred; set
``ACO_DI_PURE_PYTHON=1`` (or build without a compiler) to get the
pure-Python twins.  Both return identical results.
"""

import os

if os.environ.get("ACO_DI_PURE_PYTHON"):
    from ._pykernels import BACKEND, mkp_construct, mmppfo_construct
else:
    try:
        from ._ckernels import BACKEND, mkp_construct, mmppfo_construct
    except ImportError:
        from ._pykernels import BACKEND, mkp_construct, mmppfo_construct

__all__ = ["BACKEND", "mkp_construct", "mmppfo_construct"]
