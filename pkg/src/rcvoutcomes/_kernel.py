"""Tally-kernel selection.

Imports the compiled kernel when it is built, otherwise the pure-Python
fallback. Set ``RCV_KERNEL=python`` (or ``cython``) to force a backend;
``load_backend`` exists so benchmarks can time both on one process.
"""

import os

from . import _tally_py


def load_backend(name: str = "auto"):
    """Return the kernel module for ``name`` ("auto", "python" or "cython")."""
    if name in ("auto", ""):
        name = os.environ.get("RCV_KERNEL", "").lower() or "auto"
    if name in ("auto", "cython"):
        try:
            from . import _tally_cy

            return _tally_cy
        except ImportError:
            if name == "cython":
                raise
    if name in ("auto", "python"):
        return _tally_py
    raise ValueError(f"unknown kernel backend: {name!r}")


_active = load_backend()

BACKEND = _active.BACKEND
prepare_ballots = _active.prepare_ballots
tally_ballots = _active.tally_ballots
