"""Backend selection for the numerical kernels.

The hot loops have two implementations: numba-compiled KD-tree kernels and
a pure-numpy brute-force fallback. The active backend comes from the
CHAMFERFIT_BACKEND environment variable ("auto", "numba" or "numpy",
default "auto" which picks numba when installed) and can be overridden at
runtime with set_backend(), which takes precedence over the environment.
"""

from __future__ import annotations

import os

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

_ENV_VAR = "CHAMFERFIT_BACKEND"
_CHOICES = ("auto", "numba", "numpy")

_override: str | None = None


def set_backend(name: str) -> None:
    """Force a backend for the current process; "auto" restores env control."""
    global _override
    if name not in _CHOICES:
        raise ValueError(f"backend must be one of {_CHOICES}, got {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    _override = None if name == "auto" else name


def active_backend() -> str:
    """Resolve the backend actually in use: "numba" or "numpy"."""
    if _override is not None:
        return _override
    req = os.environ.get(_ENV_VAR, "auto").lower()
    if req not in _CHOICES:
        raise ValueError(
            f"{_ENV_VAR} must be one of {_CHOICES}, got {req!r}"
        )
    if req == "numba":
        if not HAS_NUMBA:
            raise RuntimeError(f"{_ENV_VAR}=numba but numba is not installed")
        return "numba"
    if req == "numpy":
        return "numpy"
    return "numba" if HAS_NUMBA else "numpy"


def use_numba() -> bool:
    return active_backend() == "numba"
