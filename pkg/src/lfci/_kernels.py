"""Backend selection for the computational kernels.

The compiled extension ``lfci._fastkern`` is preferred when it imported
cleanly; the pure-Python module ``lfci._pykern`` is the drop-in fallback.
Set the environment variable ``LFCI_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("LFCI_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _pykern as impl

    BACKEND = "pure-python"
else:
    try:
        from . import _fastkern as impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _pykern as impl

        BACKEND = "pure-python"

msep = impl.msep
collider_reach = impl.collider_reach
pcorr = impl.pcorr
first_leq = impl.first_leq


def backend_name():
    """Name of the active kernel backend."""
    return BACKEND
