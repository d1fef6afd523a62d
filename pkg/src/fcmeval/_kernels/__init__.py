"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python twin
is the fallback. Set FCMEVAL_PURE_KERNELS=1 to force the fallback (used by
the parity tests and the benchmark).
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("FCMEVAL_PURE_KERNELS") == "1":
    _backend = pure
    BACKEND = "pure"
else:
    try:
        from . import _ckernels as _backend  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _backend = pure
        BACKEND = "pure"

bleu_kernel = _backend.bleu_kernel
rouge1_kernel = _backend.rouge1_kernel
meteor_align = _backend.meteor_align
ALIGN_DP_LIMIT = pure.ALIGN_DP_LIMIT


def get_backend(name: str):
    """Return a kernel module by name ("pure" or "compiled")."""
    if name == "pure":
        return pure
    if name == "compiled":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend: {name!r}")
