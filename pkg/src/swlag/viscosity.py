"""Linear-quadratic artificial viscosity used by the comparison runs.

omega = -nu * rho * u_s + 0.5 (1 + gamma) * rho * (kappa * h_s / pi) * u_s^2

with gamma = 2 for shallow water.  Fluxes replace the pressure p by
q = p + omega; the stored thermodynamic p is never modified.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ViscosityParams:
    nu: float = 0.0
    kappa_visc: float = 0.0
    gamma: float = 2.0

    def __post_init__(self):
        if self.nu < 0.0 or self.kappa_visc < 0.0:
            raise ValueError("viscosity coefficients must be non-negative")

    @property
    def enabled(self) -> bool:
        return self.nu != 0.0 or self.kappa_visc != 0.0


def artificial_viscosity(rho, u_s, vp: ViscosityParams, h_s: float):
    rho = np.asarray(rho, dtype=float)
    u_s = np.asarray(u_s, dtype=float)
    omega = (-vp.nu * rho * u_s
             + 0.5 * (1.0 + vp.gamma) * rho * (vp.kappa_visc * h_s / np.pi) * u_s ** 2)
    return omega if omega.ndim else float(omega)
