"""Closed-form and semi-analytic solutions used as oracles.

Contents: the travelling wave x = s - alpha*t, the dilation family
x = (54 s t^2)^{1/3} with its geometric-mesh constraints, the reduced
three-level equation psi^ psiv psi_ttc = K and its first integral, and the
characteristics/jump oracles for the piston problems.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import BreakdownError, OracleDomainError, VacuumError
from .mesh import MassMesh, PotentialHistory

BISECT_TOL = 1e-14


def _bisect(f, lo: float, hi: float, tol: float = BISECT_TOL, max_iter: int = 200) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) <= tol * max(1.0, abs(mid)):
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _scan_roots(f, lo: float, hi: float, n_scan: int = 4000) -> list[float]:
    grid = np.exp(np.linspace(np.log(lo), np.log(hi), n_scan))
    vals = np.array([f(g) for g in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(_bisect(f, float(grid[i]), float(grid[i + 1])))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    # collapse near-duplicates from exact hits on grid points
    out = []
    for r in sorted(roots):
        if not out or abs(r - out[-1]) > 1e-10 * max(1.0, abs(r)):
            out.append(r)
    return out


# --------------------------------------------------------------------------
# travelling wave
# --------------------------------------------------------------------------

def travelling_wave(mesh: MassMesh, alpha: float, t0: float = 0.0) -> PotentialHistory:
    """Layers of x = s - alpha*t at times t0 - tau, t0, t0 + tau.

    The reduction onto the travelling-wave subgroup matches the lattice only
    when alpha = h_s / tau; other alphas still solve the scheme (the flux
    differences cancel layer-wise) but not the reduced one, so a warning is
    emitted.
    """
    if abs(alpha - mesh.h_s / mesh.tau) > 1e-12 * max(1.0, abs(alpha)):
        warnings.warn("travelling wave with alpha != h_s/tau does not match the "
                      "reduced lattice", stacklevel=2)
    layers = tuple(mesh.s_nodes - alpha * (t0 + k * mesh.tau) for k in (-1, 0, 1))
    return PotentialHistory(layers=layers, t=t0)


# --------------------------------------------------------------------------
# dilation solution and its lattice constraints
# --------------------------------------------------------------------------

def dilation_exact(s, t):
    """x = (54 s t^2)^{1/3}, exact solution of x_tt = 2 x_ss / x_s^3."""
    return np.cbrt(54.0 * np.asarray(s, dtype=float) * np.asarray(t, dtype=float) ** 2)


def dilation_velocity(s, t, mu: float):
    """Forward-difference velocity of the dilation solution on a mu-lattice."""
    return (1.0 - mu ** 2) / (1.0 - mu ** 3) * np.cbrt(54.0 * np.asarray(s) / np.asarray(t))


def dilation_rho(s, t, kappa: float):
    """Forward-stretch height of the dilation solution on a kappa-lattice."""
    return (kappa ** 2 + kappa + 1.0) / np.cbrt(54.0) * np.cbrt((np.asarray(s) / np.asarray(t)) ** 2)


def kappa_residual(kappa: float, delta: float) -> float:
    k = kappa
    return (k * k + k + 1.0) * (k * k + 1.0) * (k + 1.0) - (12.0 - delta) * k ** 4


def solve_kappa(delta: float, lo: float = 1e-3, hi: float = 1e3) -> list[float]:
    """All positive roots of the kappa lattice constraint found by bracketing."""
    return _scan_roots(lambda k: kappa_residual(k, delta), lo, hi)


def mu_constraint_residual(mu: float, delta: float) -> float:
    return 54.0 * mu ** 3 * (mu + 1.0) - (12.0 - delta) * (mu * mu + mu + 1.0) ** 2


def solve_mu(delta: float, lo: float = 1e-3, hi: float = 1e3) -> list[float]:
    return _scan_roots(lambda m: mu_constraint_residual(m, delta), lo, hi)


def coupling_residual(kappa: float, mu: float) -> float:
    """Relation pairing the s- and t-lattice densities of the exact solution."""
    k, m = kappa, mu
    lhs = (k * k + k + 1.0) * (k * k + 1.0) * (k + 1.0) / k ** 4
    rhs = 54.0 * m ** 3 * (m + 1.0) / (m * m + m + 1.0) ** 2
    return lhs - rhs


def reduced_dilation_residual(psi_prev, psi, psi_next, t_prev, t, t_next,
                              s_m, s_minus, s_plus):
    """Residual of the scheme reduced onto x = s^{1/3} psi(t).

    psi_ttc keeps the three-level normalization ((psi_t - psiv_t)/tau_-);
    the mass-flux difference is divided by s^{1/3} (s_+ - s), the divisor
    consistent with the kappa lattice constraint.  The stretch ratios
    (s' - s)/(s'^{1/3} - s^{1/3}) are expanded by the difference of cubes,
    which removes the catastrophic cancellation on nearly-uniform lattices.
    """
    tau_p = t_next - t
    tau_m = t - t_prev
    psi_ttc = ((psi_next - psi) / tau_p - (psi - psi_prev) / tau_m) / tau_m
    c_m, c_p, c_mm = np.cbrt(s_m), np.cbrt(s_plus), np.cbrt(s_minus)
    r_plus = c_p * c_p + c_p * c_m + c_m * c_m
    r_minus = c_mm * c_mm + c_mm * c_m + c_m * c_m
    flux = ((r_plus - r_minus) * (r_plus + r_minus)) / (c_m * (s_plus - s_m))
    return psi_next * psi_prev * psi_ttc + flux


def dilation_lattice(kappa: float, mu: float, s0: float, t0: float,
                     m_cells: int, n_steps: int):
    """(t_n, s_m, x) arrays of the exact solution on the constrained lattice."""
    n = np.arange(n_steps + 1, dtype=float)
    m = np.arange(m_cells + 1, dtype=float)
    t = t0 * mu ** (3.0 * n)
    s = s0 * kappa ** (3.0 * m)
    x = dilation_exact(s[None, :], t[:, None])
    return t, s, x


# --------------------------------------------------------------------------
# reduced equation psi^ psiv psi_ttc = K
# --------------------------------------------------------------------------

def psi_ode_step(psi_prev: float, psi: float, K: float, tau: float) -> float:
    """Next value of the reduced three-level equation on a uniform lattice.

    psi^ solves psiv * psi^^2 + psiv (psiv - 2 psi) psi^ = K tau^2, i.e. the
    positive branch of psi^ = [(2 psi - psiv) + sqrt((2 psi - psiv)^2
    + 4 K tau^2 / psiv)] / 2.
    """
    if psi <= 0.0 or psi_prev <= 0.0:
        raise BreakdownError("reduced equation needs positive psi values")
    b = 2.0 * psi - psi_prev
    disc = b * b + 4.0 * K * tau * tau / psi_prev
    if disc < 0.0:
        raise BreakdownError("no real branch in reduced-equation update")
    psi_next = 0.5 * (b + np.sqrt(disc))
    if psi_next <= 0.0:
        raise BreakdownError("no positive branch in reduced-equation update")
    return float(psi_next)


def psi_first_integral(psi: float, psi_next: float, K: float, tau: float) -> float:
    """psi_t^2 + K (1/psi^ + 1/psi); constant along discrete orbits."""
    return ((psi_next - psi) / tau) ** 2 + K * (1.0 / psi_next + 1.0 / psi)


def psi_cauchy_residual(psi_val: float, t_n: float, psi0: float, K: float, C1: float) -> float:
    """Residual of the implicit Cauchy-form relation for psi(t_n)."""
    return (psi_val - psi0) ** 2 + t_n ** 2 * K * (1.0 / psi_val + 1.0 / psi0) - t_n ** 2 * C1


def psi_cauchy_solve(t_n: float, psi0: float, K: float, C1: float,
                     lo: float = 1e-8, hi: float = 1e8) -> float:
    """Root of the implicit Cauchy-form relation nearest the scan bracket."""
    roots = _scan_roots(lambda v: psi_cauchy_residual(v, t_n, psi0, K, C1), lo, hi)
    if not roots:
        raise BreakdownError("implicit Cauchy relation has no positive root")
    return min(roots, key=lambda r: abs(r - psi0))


# --------------------------------------------------------------------------
# piston oracles, state relation p = rho^2 (sound speed c = sqrt(2 rho))
# --------------------------------------------------------------------------

def rarefaction_oracle(u_piston: float, rho0: float, t: float, x, x_piston0: float = 0.0):
    """Centered-fan solution for a piston withdrawing at u_piston <= 0.

    Returns (u, rho) at Eulerian positions x and time t > 0.  Fluid occupies
    x > x_piston0 initially; the left-going Riemann invariant u - 2c is
    uniform, so the fan obeys u = 2(xi - c0)/3, c = (xi + 2 c0)/3 with
    xi = (x - x_piston0)/t.
    """
    if u_piston > 0.0:
        raise OracleDomainError("rarefaction oracle needs u_piston <= 0")
    c0 = np.sqrt(2.0 * rho0)
    if abs(u_piston) >= 2.0 * c0:
        raise VacuumError(f"piston speed {u_piston} reaches vacuum (2 c0 = {2 * c0:.6g})")
    if t <= 0.0:
        raise OracleDomainError("oracle needs t > 0 (centered wave)")
    xi = (np.asarray(x, dtype=float) - x_piston0) / t
    head = c0
    tail = c0 + 1.5 * u_piston
    u_fan = 2.0 * (xi - c0) / 3.0
    c_fan = (xi + 2.0 * c0) / 3.0
    u = np.where(xi >= head, 0.0, np.where(xi <= tail, u_piston, u_fan))
    c = np.where(xi >= head, c0, np.where(xi <= tail, c0 + 0.5 * u_piston, c_fan))
    rho = 0.5 * c ** 2
    return u, rho


def shock_state_oracle(u_piston: float, rho0: float) -> tuple[float, float]:
    """Post-shock height and mass-coordinate shock speed for a compressing piston.

    Jump conditions in mass coordinates, W [1/rho] = -[u] and W [u] = [p],
    eliminate W into (rho1^2 - rho0^2)(rho1 - rho0) / (rho1 rho0) = u^2;
    rho1 is found by bisection and W = [p]/[u].
    """
    if u_piston <= 0.0:
        raise OracleDomainError("shock oracle needs u_piston > 0")

    def f(r1):
        return (r1 ** 2 - rho0 ** 2) * (r1 - rho0) / (r1 * rho0) - u_piston ** 2

    hi = rho0 + 1.0
    while f(hi) < 0.0:
        hi *= 2.0
    rho1 = _bisect(f, rho0 * (1.0 + 1e-15), hi)
    w = (rho1 ** 2 - rho0 ** 2) / u_piston
    return rho1, w
