"""ABX phone discrimination scoring and human-response prediction.

Thin wrapper around the C++ core. All operations live in ``abxeval._core``
and are re-exported here.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = _core_doc
