"""Hot kernels with compiled core and pure-Python fallback.

The compiled Cython extension is preferred; if it is missing (e.g. a
source checkout without a build step) the numpy fallback is used. Set
SDNGUARD_FORCE_FALLBACK=1 to force the fallback for benchmarking.
"""

import os

from . import _fallback

if os.environ.get("SDNGUARD_FORCE_FALLBACK") == "1":
    _impl = _fallback
    BACKEND = "fallback"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "fallback"

gini_split_scan = _impl.gini_split_scan
hist_build = _impl.hist_build
