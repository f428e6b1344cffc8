"""Select the beam-search kernel at import time.

The compiled extension is preferred; the pure-Python twin is the fallback.
Set ``ALIGNQA_PURE=1`` to force the fallback (used by the benchmark and the
parity tests).
"""

import os

if os.environ.get("ALIGNQA_PURE"):
    from . import _beam_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _beam as _impl  # type: ignore[attr-defined]

        BACKEND = "native"
    except ImportError:
        from . import _beam_py as _impl

        BACKEND = "pure"

run_beam = _impl.run_beam
