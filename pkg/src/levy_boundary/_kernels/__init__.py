"""Hot census kernel, compiled when available.

The Cython build is optional; if the extension is missing the pure-Python
implementation is used.  Set ``LEVY_BOUNDARY_PURE_PYTHON=1`` before import to
force the fallback (used by the benchmark and the parity tests).
"""
import os

from . import _pycensus

BACKEND = "python"
census_histogram = _pycensus.census_histogram

if not os.environ.get("LEVY_BOUNDARY_PURE_PYTHON"):
    try:
        from . import _ccensus
    except ImportError:  # pragma: no cover - depends on the build
        _ccensus = None
    else:
        BACKEND = "cython"
        census_histogram = _ccensus.census_histogram
else:
    _ccensus = None

__all__ = ["BACKEND", "census_histogram"]
