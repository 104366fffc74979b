"""Backend selection for the trial decoder.

Each trial reads a fixed row of uniforms; slots 0..N-1 drive the first-stage
taps of each mode, N the solo-click sign, N+1 and N+2 the final VP on the two
beam-splitter outputs, N+3 the final sign. Rows are padded to a multiple of
four so that a Philox stream can be positioned at any trial.

Set ``PPPM_PURE_PYTHON=1`` to force the numpy fallback.
"""
from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("PPPM_PURE_PYTHON", "") == "1":
    _compiled = None
else:
    try:
        from . import _kernel as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
decode_block = _compiled.decode_block if _compiled is not None else _kernel_py.decode_block
python_decode_block = _kernel_py.decode_block
compiled_decode_block = _compiled.decode_block if _compiled is not None else None


def slots_per_trial(n_modes: int) -> int:
    return 4 * ((n_modes + 4 + 3) // 4)
