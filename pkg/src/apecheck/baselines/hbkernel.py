"""Selects the compiled reachability kernel when available.

Set APECHECK_PURE=1 to force the pure-Python fallback.
"""
import os
from array import array

from . import _hbkernel_py

if os.environ.get("APECHECK_PURE") == "1":
    _impl = _hbkernel_py
else:
    try:
        from . import _hbkernel as _impl
    except ImportError:  # extension not built
        _impl = _hbkernel_py

BACKEND = "compiled" if _impl is not _hbkernel_py else "python"


def reach_batch(indptr, indices, src, dst, impl=None):
    """Answer grouped reachability queries; returns a list of 0/1."""
    impl = impl or _impl
    out = array("b", bytes(len(src)))
    if impl is _hbkernel_py:
        impl.reach_batch(indptr, indices, src, dst, out)
    else:
        impl.reach_batch(array("i", indptr), array("i", indices), array("i", src),
                         array("i", dst), out)
    return list(out)
