"""Hot-path trial kernels: compiled core with a pure-numpy fallback.

The compiled extension is optional. Import order: the environment
variable FDTR_PURE_PYTHON forces the fallback; otherwise the compiled
module is used when present. Both backends implement `run_chain` with
identical semantics (agreement to ~1e-15 relative; floating summation
order differs).
"""

import os

from . import fallback

if os.environ.get("FDTR_PURE_PYTHON"):
    _impl = fallback
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = fallback

run_chain = _impl.run_chain
DECODER_ORDER = fallback.DECODER_ORDER


def backend_name() -> str:
    """'compiled' when the Cython core is active, else 'fallback'."""
    return "compiled" if _impl is not fallback else "fallback"
