"""Shared nonlinear solver for the per-step implicit systems.

Convergence is measured on successive updates in the relative max-norm; the
residual at the returned point is reported alongside.  The primary iteration
is a damped fixed point z <- z - damping * r(z); if the update ratio stalls
above STALL_RATIO for STALL_WINDOW consecutive iterations, the solver falls
back to a finite-difference Newton step (dense for small systems, diagonal
secant otherwise).  Deterministic for identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonConvergenceError, NumericalBlowupError

STALL_RATIO = 0.9
STALL_WINDOW = 5
_FD_STEP = 1e-7


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    final_defect: float
    converged: bool
    used_newton: bool = False

    def __post_init__(self):
        if self.converged and not np.isfinite(self.final_defect):
            raise ValueError("converged report with non-finite defect")


def _scale(z: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(z))) if z.size else 1.0)


def _newton_step(residual_map: Callable, z: np.ndarray, r: np.ndarray) -> np.ndarray:
    n = z.size
    if n <= 50:
        jac = np.empty((n, n))
        for j in range(n):
            dz = _FD_STEP * max(1.0, abs(z[j]))
            zp = z.copy()
            zp[j] += dz
            jac[:, j] = (np.asarray(residual_map(zp), dtype=float) - r) / dz
        try:
            return z - np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            return z - r
    dz = _FD_STEP * np.maximum(1.0, np.abs(z))
    rp = np.asarray(residual_map(z + dz), dtype=float)
    diag = (rp - r) / dz
    diag = np.where(np.abs(diag) < 1e-14, 1.0, diag)
    return z - r / diag


def fixed_point_solve(residual_map: Callable, initial_guess, eps_iter: float,
                      max_iter: int = 200, damping: float = 1.0,
                      newton_fallback: bool = True) -> tuple[np.ndarray, SolveReport]:
    """Solve residual_map(z) = 0; returns (z, SolveReport).

    Raises NonConvergenceError (carrying the report) past max_iter and
    NumericalBlowupError on NaN/Inf.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must be in (0, 1], got {damping}")
    if eps_iter <= 0.0:
        raise ValueError("eps_iter must be positive")
    z = np.atleast_1d(np.asarray(initial_guess, dtype=float)).copy()
    r = np.asarray(residual_map(z), dtype=float)
    if not np.all(np.isfinite(r)):
        raise NumericalBlowupError("residual not finite at initial guess")

    used_newton = False
    defect_hist: list[float] = []
    defect = float("inf")
    for it in range(1, max_iter + 1):
        stalled = (newton_fallback and len(defect_hist) >= STALL_WINDOW + 1
                   and all(defect_hist[-i] > STALL_RATIO * defect_hist[-i - 1]
                           for i in range(1, STALL_WINDOW + 1)))
        if stalled:
            z_new = _newton_step(residual_map, z, r)
            used_newton = True
        else:
            z_new = z - damping * r
        if not np.all(np.isfinite(z_new)):
            raise NumericalBlowupError(f"iterate not finite at iteration {it}")
        defect = float(np.max(np.abs(z_new - z))) / _scale(z_new)
        defect_hist.append(defect)
        z = z_new
        r = np.asarray(residual_map(z), dtype=float)
        if not np.all(np.isfinite(r)):
            raise NumericalBlowupError(f"residual not finite at iteration {it}")
        if defect <= eps_iter:
            return z, SolveReport(iterations=it, final_defect=defect,
                                  converged=True, used_newton=used_newton)
    report = SolveReport(iterations=max_iter, final_defect=defect,
                         converged=False, used_newton=used_newton)
    raise NonConvergenceError(
        f"no convergence in {max_iter} iterations (defect {defect:.3e})", report=report)
