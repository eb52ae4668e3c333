"""Kernel selection: compiled extension if available, numpy fallback otherwise.

Set ``PARETOCOUNT_PURE=1`` to force the pure-Python twin (used by the
benchmark and by CI on platforms without a compiler).
"""

from __future__ import annotations

import os

if os.environ.get("PARETOCOUNT_PURE"):
    from . import _kernels_py as _impl

    KERNEL_BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        KERNEL_BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        KERNEL_BACKEND = "python"

first_sat = _impl.first_sat
count_projected = _impl.count_projected
collect_projected = _impl.collect_projected
copy_sat = _impl.copy_sat
