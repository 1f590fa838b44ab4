"""Pure-Python sweep kernels (reference implementation).

Each function performs one relaxation pass of a scheme's solved-form update,
mutating the *_new arrays in place.  Boundary entries of u/x are boundary
conditions and are never touched.  The compiled twins in _sweeps.pyx follow
the same stage order and elementwise expressions, so both backends produce
identical floating-point results.

All kernels take the artificial-viscosity augmentation as a precomputed
per-cell array (see stepping.lagged_omega / the relaxed implicit variant).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def sweep_inv3(x_new, x_curr, x_prev, tau, h, mu):
    """Gauss-Seidel pass (left to right) of the three-level position scheme."""
    n = x_new.shape[0]
    tt = tau * tau
    for m in range(1, n - 1):
        ah_s = (x_new[m + 1] - x_new[m]) / h
        ah_sb = (x_new[m] - x_new[m - 1]) / h
        ac_s = (x_prev[m + 1] - x_prev[m]) / h
        ac_sb = (x_prev[m] - x_prev[m - 1]) / h
        flux = (1.0 / (ah_s * ac_s) - 1.0 / (ah_sb * ac_sb)) / h
        visc = mu * 0.5 * ((ah_s - ah_sb) / h + (ac_s - ac_sb) / h)
        x_new[m] = 2.0 * x_curr[m] - x_prev[m] - tt * (flux + visc)


def sweep_inv2(u_new, v_new, u_old, v_old, p_new, omega, tau, h):
    """One pass of the two-level mass scheme (flux stage, u stage, V stage).

    omega is the per-cell artificial-viscosity augmentation, precomputed from
    the previous layer (a fully implicit omega makes the relaxation
    non-contractive near shocks)."""
    n_cells = v_new.shape[0]
    phi = np.empty(n_cells)
    for m in range(n_cells):
        inv_q = (4.0 * v_new[m] * v_old[m]
                 - (2.0 / np.sqrt(p_new[m])) * (v_new[m] + v_old[m]) + 1.0 / p_new[m])
        phi[m] = 1.0 / inv_q + omega[m]
    for m in range(1, n_cells):
        u_new[m] = u_old[m] - (tau / h) * (phi[m] - phi[m - 1])
    for m in range(n_cells):
        v_new[m] = v_old[m] + (tau / (2.0 * h)) * (
            (u_new[m + 1] + u_old[m + 1]) - (u_new[m] + u_old[m]))


def sweep_sampop(u_new, x_new, v_new, p_new, u_old, x_old, omega, tau, h):
    """One pass of the Samarskiy-Popov scheme (x, rho/p stages, then u)."""
    n_cells = v_new.shape[0]
    for m in range(n_cells + 1):
        x_new[m] = x_old[m] + tau * 0.5 * (u_new[m] + u_old[m])
    phi = np.empty(n_cells)
    for m in range(n_cells):
        v_new[m] = (x_new[m + 1] - x_new[m]) / h
        rho = 1.0 / v_new[m]
        p_new[m] = rho * rho
        phi[m] = p_new[m] + omega[m]
    for m in range(1, n_cells):
        u_new[m] = u_old[m] - (tau / h) * (phi[m] - phi[m - 1])


def sweep_yelenin(u_new, v_new, big_p_new, u_old, v_old, big_p_old, rho_old, tau, h):
    """One pass of the modified Yelenin-Krylov scheme (no artificial viscosity).

    The state modulus is the two-layer form rho_new^3 + rho_old^3; the
    one-layer 2 rho_old^3 makes the pressure response lag and the scheme
    anti-diffusive (unstable)."""
    n_cells = v_new.shape[0]
    g = np.empty(n_cells)
    for m in range(n_cells):
        v_new[m] = v_old[m] + (tau / (2.0 * h)) * (
            (u_new[m + 1] + u_old[m + 1]) - (u_new[m] + u_old[m]))
        rho_new = 1.0 / v_new[m]
        w = rho_new * rho_new * rho_new + rho_old[m] * rho_old[m] * rho_old[m]
        big_p_new[m] = big_p_old[m] + (v_new[m] - v_old[m]) * w
        g[m] = 0.5 * (big_p_new[m] + big_p_old[m]) + 0.5 * (v_new[m] + v_old[m]) * w
    for m in range(1, n_cells):
        u_new[m] = u_old[m] - (tau / h) * (g[m] - g[m - 1])


def step_explicit(u_new, v_new, x_new, u_old, v_old, rho_old, x_old,
                  omega, tau, h):
    """Full explicit step: continuity from the old u, then momentum."""
    n_cells = v_new.shape[0]
    phi = np.empty(n_cells)
    for m in range(n_cells):
        v_new[m] = v_old[m] + (tau / h) * (u_old[m + 1] - u_old[m])
        phi[m] = rho_old[m] * (1.0 / v_new[m]) + omega[m]
    for m in range(1, n_cells):
        u_new[m] = u_old[m] - (tau / h) * (phi[m] - phi[m - 1])
    for m in range(n_cells + 1):
        x_new[m] = x_old[m] + tau * u_old[m]
    return phi


def step_korobitsyn(u_new, v_new, x_new, p_new, eps_new,
                    u_old, v_old, rho_old, x_old, p_old, eps_old,
                    omega, tau, h, q):
    """Full explicit Korobitsyn step: momentum, position, continuity, pressure."""
    n_cells = v_new.shape[0]
    phi = np.empty(n_cells)
    for m in range(n_cells):
        phi[m] = p_old[m] + omega[m]
    for m in range(1, n_cells):
        u_new[m] = u_old[m] - (tau / h) * (phi[m] - phi[m - 1])
    for m in range(n_cells + 1):
        x_new[m] = x_old[m] + tau * 0.5 * (u_old[m] + u_new[m])
    for m in range(n_cells):
        v_new[m] = v_old[m] + (tau / (2.0 * h)) * (
            (u_new[m + 1] + u_old[m + 1]) - (u_new[m] + u_old[m]))
        eps_new[m] = eps_old[m] - 2.0 * phi[m] * (v_new[m] - v_old[m])
    for m in range(n_cells):
        rho_left = rho_old[m - 1] if m > 0 else rho_old[0]
        u_t = (u_new[m] - u_old[m]) / tau
        p_new[m] = (0.5 * q * (rho_left + rho_old[m]) + (1.0 - q) * rho_old[m]) * (
            rho_old[m] + 0.25 * q * tau * tau * u_t * u_t)
    return phi


def sweep_mass3(u_mid, v_new, u_prev, v_old, rho_prev, tau, h):
    """One pass of the three-level mass scheme (flux, u stage, V stage)."""
    n_cells = v_new.shape[0]
    phi = np.empty(n_cells)
    for m in range(n_cells):
        phi[m] = (1.0 / v_new[m]) * rho_prev[m]
    for m in range(1, n_cells):
        u_mid[m] = u_prev[m] - (tau / h) * (phi[m] - phi[m - 1])
    for m in range(n_cells):
        v_new[m] = v_old[m] + (tau / h) * (u_mid[m + 1] - u_mid[m])
