"""Backend selection for the machine-stepping kernels.

The compiled extension is preferred when it built successfully; the pure
twin is the fallback, so an install without a C compiler still works.
Set GAPINFER_KERNELS=pure or GAPINFER_KERNELS=compiled to force a backend
(forcing "compiled" raises if the extension is absent rather than silently
degrading, which is what you want in benchmarks and CI parity jobs).
"""

from __future__ import annotations

import os

_FORCED = os.environ.get("GAPINFER_KERNELS", "").strip().lower()

if _FORCED == "pure":
    from . import _pure_kernels as _impl

    KERNEL_BACKEND = "pure"
elif _FORCED == "compiled":
    from . import _ptm_kernels as _impl  # type: ignore[attr-defined]

    KERNEL_BACKEND = "compiled"
elif _FORCED:
    raise ValueError(
        f"GAPINFER_KERNELS must be 'pure' or 'compiled', not {_FORCED!r}"
    )
else:
    try:
        from . import _ptm_kernels as _impl  # type: ignore[attr-defined]

        KERNEL_BACKEND = "compiled"
    except ImportError:
        from . import _pure_kernels as _impl

        KERNEL_BACKEND = "pure"

OUTCOME_ACCEPTED = 0
OUTCOME_REJECTED = 1
OUTCOME_UNHALTED = 2

run_outcome = _impl.run_outcome
count_outcomes = _impl.count_outcomes
