"""Pick the kernel implementation once, at import.

The compiled extension is preferred; set ``QEF_BACKEND=python`` to force the
reference implementation (the benchmark and the parity tests do this).
"""

from __future__ import annotations

import importlib
import logging
import os
from types import ModuleType

log = logging.getLogger(__name__)

BACKENDS = ("compiled", "python")


def load(name: str | None = None) -> ModuleType:
    name = name or os.environ.get("QEF_BACKEND", "compiled")
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "compiled":
        try:
            return importlib.import_module("qef._kernels")
        except ImportError:
            log.info("compiled kernels unavailable, using python fallback")
    return importlib.import_module("qef._pykernels")


kernels = load()
NAME = "python" if kernels.__name__ == "qef._pykernels" else "compiled"
