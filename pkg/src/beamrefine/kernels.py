"""Backend selection for the exhaustive-scan hot loop.

The compiled Cython kernel is preferred when its extension built; otherwise
a blocked numpy implementation takes over. Both produce bit-identical
results. Set BEAMREFINE_BACKEND=numpy or =compiled to force one (the
compiled choice fails loudly if the extension is missing).
"""

import os

import numpy as np

from .arraymodel import ArrayConfig

_FORCED = os.environ.get("BEAMREFINE_BACKEND")

if _FORCED == "numpy":
    from . import _scan_py as _backend

    BACKEND = "numpy"
elif _FORCED == "compiled":
    from . import _scan as _backend  # ImportError here means no built extension

    BACKEND = "compiled"
elif _FORCED:
    raise ImportError(f"unknown BEAMREFINE_BACKEND value {_FORCED!r}")
else:
    try:
        from . import _scan as _backend

        BACKEND = "compiled"
    except ImportError:
        from . import _scan_py as _backend

        BACKEND = "numpy"


def backend_name() -> str:
    return BACKEND


def antenna_tables(h: np.ndarray, cfg: ArrayConfig):
    """Per-antenna product tables T[i][c] = h_i * w(c), split re/im.

    c runs over the 2**N per-antenna configurations, amplitude-major:
    c = (amp_idx - 1) * phase_levels + (phase_idx - 1).
    """
    P = cfg.phase_levels
    c = np.arange(cfg.configs_per_antenna)
    amps = (c // P + 1) / cfg.amp_levels
    phases = (c % P + 1) * (2.0 * np.pi / P)
    w = amps * np.exp(-1j * phases)
    t = np.asarray(h, dtype=np.complex128)[:, None] * w[None, :]
    return np.ascontiguousarray(t.real), np.ascontiguousarray(t.imag)


def scan_range(tre, tim, start: int, stop: int):
    return _backend.scan_range(tre, tim, start, stop)
