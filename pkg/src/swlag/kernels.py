"""Backend selection for the sweep kernels.

The compiled extension is preferred when importable; setting
SWLAG_PURE_PYTHON=1 (or a failed build) selects the pure-Python reference
kernels.  Both backends implement identical arithmetic, stage by stage.
"""

from __future__ import annotations

import os

if os.environ.get("SWLAG_PURE_PYTHON", "") == "1":
    from . import _sweeps_py as _impl
else:
    try:
        from . import _sweeps as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _sweeps_py as _impl

BACKEND: str = _impl.BACKEND

sweep_inv3 = _impl.sweep_inv3
sweep_inv2 = _impl.sweep_inv2
sweep_sampop = _impl.sweep_sampop
sweep_yelenin = _impl.sweep_yelenin
step_explicit_kernel = _impl.step_explicit
step_korobitsyn_kernel = _impl.step_korobitsyn
sweep_mass3 = _impl.sweep_mass3


def available_backends() -> dict[str, object]:
    """Importable kernel modules keyed by backend name (for the benchmark)."""
    from . import _sweeps_py
    out = {"python": _sweeps_py}
    try:
        from . import _sweeps  # type: ignore[attr-defined]
        out["cython"] = _sweeps
    except ImportError:
        pass
    return out
