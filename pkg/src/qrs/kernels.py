"""Kernel selection.

Imports the compiled ``_ckernels`` extension when it is available and falls
back to the pure Python implementation otherwise. Set ``QRS_PURE_PYTHON=1``
to force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("QRS_PURE_PYTHON") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.NAME

splitmix64_words = _impl.splitmix64_words
unit_doubles = _impl.unit_doubles
box_muller = _impl.box_muller
rejection_ints = _impl.rejection_ints
neg_log = _impl.neg_log


def available():
    """Return the names of kernel implementations importable in this process."""
    names = [_pykernels.NAME]
    try:
        from . import _ckernels
    except ImportError:
        return names
    return [_ckernels.NAME] + names
