"""pmhd: a structured-grid finite-volume MHD mini-app with swappable loop patterns,
per-region profiling and a roofline / performance-portability toolkit."""

__version__ = "0.1.0"

import os as _os

# the TBB layer shipped with some numba wheels is too old and warns on import
_os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
