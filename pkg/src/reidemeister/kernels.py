"""Kernel selection: the compiled extension when it imports, numpy otherwise.

Set ``REIDEMEISTER_PURE=1`` to force the numpy fallback.
"""

import os

from . import _fallback

if os.environ.get("REIDEMEISTER_PURE", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback

BACKEND = "compiled" if _impl is not _fallback else "python"
segment_crossings = _impl.segment_crossings
min_pair_ratio = _impl.min_pair_ratio
