"""Time stepping for the structure-preserving scheme and the comparison schemes.

Conventions shared by every scheme here:

* u and x live at nodes, rho/p at cells indexed by their left node;
* the left boundary node is the piston side, the right one a wall or a
  second piston; boundary nodes carry prescribed velocities (mass schemes)
  or positions (position schemes), interior nodes satisfy the scheme;
* implicit systems are solved by Gauss-Seidel-style sweeps (see kernels)
  driven by the shared fixed-point solver, tolerance on relative updates.

Steps never mutate their input states.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import InvalidConfigError, MeshTanglingError, NumericalBlowupError
from .mesh import (FLAT_BOTTOM, BottomProfile, MassHistory3, MassMesh, MassState,
                   PotentialHistory)
from .solver import SolveReport, fixed_point_solve
from .stencil import (Stencil9, flux_Q, residual_bottom_energy,
                      residual_bottom_momentum, stencils_from_layers)
from .viscosity import ViscosityParams, artificial_viscosity

SCHEME_IDS = ("inv3", "inv3_viscous", "inv2", "explicit", "sampop", "yelenin",
              "korobitsyn", "inv_bottom_energy", "inv_bottom_momentum")

# Default linear-viscosity coefficients of the comparison study; the quadratic
# coefficient is 4.5 for every scheme that uses viscosity at all.
DEFAULT_NU = {"explicit": 0.005, "sampop": 0.001, "korobitsyn": 0.001,
              "inv2": 0.001, "yelenin": 0.0}
DEFAULT_KAPPA = 4.5


@dataclass(frozen=True)
class SchemeConfig:
    scheme_id: str = "inv2"
    nu: float = 0.001
    kappa_visc: float = 4.5
    mu_visc: float = 0.0
    eps_iter: float = 1e-3
    max_iter: int = 200
    q_korob: float = 1.0

    def __post_init__(self):
        if self.scheme_id not in SCHEME_IDS:
            raise InvalidConfigError(f"unknown scheme {self.scheme_id!r}; "
                                     f"choose one of {SCHEME_IDS}")
        if self.eps_iter <= 0.0:
            raise InvalidConfigError("eps_iter must be positive")
        if not 0.0 <= self.q_korob <= 1.0:
            raise InvalidConfigError("q_korob must lie in [0, 1]")
        if self.nu < 0.0 or self.kappa_visc < 0.0:
            raise InvalidConfigError("viscosity coefficients must be non-negative")

    def viscosity(self) -> ViscosityParams:
        return ViscosityParams(nu=self.nu, kappa_visc=self.kappa_visc)


@dataclass(frozen=True)
class PistonBC:
    """Velocity laws of the two boundary nodes; None marks a rigid wall."""

    left: Callable[[float], float] | None = None
    right: Callable[[float], float] | None = None

    def velocity(self, side: str, t: float) -> float:
        law = self.left if side == "left" else self.right
        return 0.0 if law is None else float(law(t))


WALLS = PistonBC()


@dataclass(frozen=True)
class StepResult:
    """New state plus the solve report and the fluxes the step actually used."""

    state: object
    report: SolveReport | None
    fluxes: dict = field(default_factory=dict)


def _visc_coeffs(vp: ViscosityParams, h: float) -> tuple[float, float]:
    return -vp.nu, 0.5 * (1.0 + vp.gamma) * (vp.kappa_visc * h / math.pi)


def _omega_np(rho, u_s, c_lin, c_quad):
    return c_lin * rho * u_s + c_quad * rho * u_s * u_s


def _check_mu(mu: float, h: float) -> None:
    if mu != 0.0 and abs(mu) >= h * h:
        warnings.warn(f"|mu_visc|={abs(mu):.3g} is not small against h_s^2={h * h:.3g}",
                      stacklevel=3)


# ---------------------------------------------------------------------------
# three-level position scheme (flat bottom)
# ---------------------------------------------------------------------------

def startup_layers(mesh: MassMesh, x0: np.ndarray, u0: np.ndarray,
                   bottom: BottomProfile = FLAT_BOTTOM) -> PotentialHistory:
    """Second-order two-sided Taylor start around t = 0.

    The acceleration is taken from the continuous equation,
    a = 2 x_ss / x_s^3 + H'(x), evaluated on the initial layer.
    """
    tau, h = mesh.tau, mesh.h_s
    x_s = np.diff(x0) / h
    a = np.zeros_like(x0)
    x_ss = (x0[2:] - 2.0 * x0[1:-1] + x0[:-2]) / h ** 2
    x_s_c = 0.5 * (x_s[1:] + x_s[:-1])
    a[1:-1] = 2.0 * x_ss / x_s_c ** 3 + bottom.dH(x0[1:-1])
    x_back = x0 - tau * u0 + 0.5 * tau ** 2 * a
    x_fwd = x0 + tau * u0 + 0.5 * tau ** 2 * a
    return PotentialHistory(layers=(x_back, x0.copy(), x_fwd), t=0.0)


def step_inv3(hist: PotentialHistory, bc: PistonBC, cfg: SchemeConfig,
              mesh: MassMesh) -> StepResult:
    """Advance the three-level position scheme by one layer.

    The residual is anchored at hist.x_next; the new layer keeps
    max-residual <= eps_iter at every interior node.
    """
    tau, h = mesh.tau, mesh.h_s
    mu = cfg.mu_visc if cfg.scheme_id == "inv3_viscous" else 0.0
    _check_mu(mu, h)
    x_a, x_b = hist.x_curr, hist.x_next
    t_anchor = hist.t + tau
    t_new = t_anchor + tau
    x_left = x_b[0] + tau * bc.velocity("left", t_anchor + 0.5 * tau)
    x_right = x_b[-1] + tau * bc.velocity("right", t_anchor + 0.5 * tau)

    work = np.empty_like(x_b)

    def residual(z):
        work[0], work[-1] = x_left, x_right
        work[1:-1] = z
        kernels.sweep_inv3(work, x_b, x_a, tau, h, mu)
        return z - work[1:-1]

    guess = (2.0 * x_b - x_a)[1:-1]
    z, report = fixed_point_solve(residual, guess, cfg.eps_iter, cfg.max_iter)
    x_new = np.empty_like(x_b)
    x_new[0], x_new[-1] = x_left, x_right
    x_new[1:-1] = z
    out = PotentialHistory(layers=(x_a.copy(), x_b.copy(), x_new), t=t_anchor)
    out.require_monotone()
    xh_s = np.diff(x_new) / h
    xc_s = np.diff(x_a) / h
    flux = 1.0 / (xh_s * xc_s) + mu * 0.5 * (xh_s + xc_s)
    return StepResult(state=out, report=report, fluxes={"momentum": flux})


def step_inv3_general(x_prev: np.ndarray, x_curr: np.ndarray, s_nodes: np.ndarray,
                      t_prev: float, t_curr: float, t_next: float,
                      x_left: float, x_right: float, eps_iter: float = 1e-12,
                      max_iter: int = 400) -> np.ndarray:
    """Position scheme on an arbitrary orthogonal lattice (exact-solution checks).

    The flux difference is divided by the forward mass step, the divisor
    consistent with the geometric-lattice constraints of the dilation
    solution.  Boundary values of the new layer are prescribed.
    """
    tau_p = t_next - t_curr
    tau_m = t_curr - t_prev
    h_p = np.diff(s_nodes)[1:]
    h_m = np.diff(s_nodes)[:-1]

    def residual(z):
        x_new = np.empty_like(x_curr)
        x_new[0], x_new[-1] = x_left, x_right
        x_new[1:-1] = z
        ah_s = (x_new[2:] - x_new[1:-1]) / h_p
        ah_sb = (x_new[1:-1] - x_new[:-2]) / h_m
        ac_s = (x_prev[2:] - x_prev[1:-1]) / h_p
        ac_sb = (x_prev[1:-1] - x_prev[:-2]) / h_m
        flux = (1.0 / (ah_s * ac_s) - 1.0 / (ah_sb * ac_sb)) / h_p
        target = x_curr[1:-1] + tau_p * ((x_curr[1:-1] - x_prev[1:-1]) / tau_m
                                         - tau_m * flux)
        return z - target

    guess = (2.0 * x_curr - x_prev)[1:-1]
    z, _ = fixed_point_solve(residual, guess, eps_iter, max_iter)
    x_new = np.empty_like(x_curr)
    x_new[0], x_new[-1] = x_left, x_right
    x_new[1:-1] = z
    return x_new


# ---------------------------------------------------------------------------
# arbitrary-bottom position schemes
# ---------------------------------------------------------------------------

def step_bottom(hist: PotentialHistory, bc: PistonBC, cfg: SchemeConfig,
                mesh: MassMesh, bottom: BottomProfile) -> StepResult:
    """One step of either arbitrary-bottom scheme (selected by cfg.scheme_id)."""
    tau, h = mesh.tau, mesh.h_s
    kind = "energy" if cfg.scheme_id == "inv_bottom_energy" else "momentum"
    x_a, x_b = hist.x_curr, hist.x_next
    t_anchor = hist.t + tau
    x_left = x_b[0] + tau * bc.velocity("left", t_anchor + 0.5 * tau)
    x_right = x_b[-1] + tau * bc.velocity("right", t_anchor + 0.5 * tau)

    def residual(z):
        x_new = np.empty_like(x_b)
        x_new[0], x_new[-1] = x_left, x_right
        x_new[1:-1] = z
        st = stencils_from_layers(x_a, x_b, x_new, tau, h)
        if kind == "energy":
            res = residual_bottom_energy(st, bottom)
            return tau * tau * res
        res = residual_bottom_momentum(st, bottom)
        x_bar_s = 0.5 * (st.x_s + st.x_sb)
        pref = 0.5 * (1.0 / np.sqrt(st.xh_s * st.xc_s) + 1.0 / np.sqrt(st.xh_sb * st.xc_sb))
        return tau * tau * res / (pref * x_bar_s)

    guess = (2.0 * x_b - x_a)[1:-1]
    z, report = fixed_point_solve(residual, guess, cfg.eps_iter, cfg.max_iter)
    x_new = np.empty_like(x_b)
    x_new[0], x_new[-1] = x_left, x_right
    x_new[1:-1] = z
    out = PotentialHistory(layers=(x_a.copy(), x_b.copy(), x_new), t=t_anchor)
    out.require_monotone()
    return StepResult(state=out, report=report)


# ---------------------------------------------------------------------------
# two-level mass scheme
# ---------------------------------------------------------------------------

def inv2_new_pressure(rho_old: np.ndarray, p_old: np.ndarray) -> np.ndarray:
    """State relation 1/sqrt(p_new) = 2/rho_old - 1/sqrt(p_old)."""
    inv_sqrt = 2.0 / rho_old - 1.0 / np.sqrt(p_old)
    if np.any(inv_sqrt <= 0.0):
        raise NumericalBlowupError("state relation produced non-positive pressure")
    return 1.0 / inv_sqrt ** 2


def omega_cells(u: np.ndarray, rho: np.ndarray, vp: ViscosityParams, h: float,
                ) -> np.ndarray:
    """Per-cell viscous pressure augmentation, compression zones only.

    In expansion the quadratic term is anti-dissipative and destabilizes
    impulsively started pistons, so it is switched off there (standard
    practice for this linear-quadratic form).
    """
    c_lin, c_quad = _visc_coeffs(vp, h)
    u_s = np.diff(u) / h
    return np.where(u_s < 0.0, _omega_np(rho, u_s, c_lin, c_quad), 0.0)


def lagged_omega(state: MassState, vp: ViscosityParams, h: float, tau: float,
                 ) -> np.ndarray:
    """Stability-clamped omega from the previous layer, for explicit stepping.

    An explicit viscous flux is a forward-Euler diffusion with diffusivity
    ~ d(omega)/d(u_s); the strain entering the formula is clamped so the
    viscous step stays inside the stability bound
    (2 tau / h^2) (nu rho + 2 c_quad rho |u_s|) <= 0.9 (impulsive piston
    starts otherwise place a full velocity jump on one cell and explode).
    """
    c_lin, c_quad = _visc_coeffs(vp, h)
    u_s = np.diff(state.u) / h
    if c_quad > 0.0:
        cap = (0.9 * h * h / (2.0 * tau) - vp.nu * state.rho) / (2.0 * c_quad * state.rho)
        u_s = np.maximum(u_s, -np.maximum(cap, 0.0))
    return np.where(np.diff(state.u) < 0.0,
                    _omega_np(state.rho, u_s, c_lin, c_quad), 0.0)


class _RelaxedOmega:
    """Implicit viscous augmentation for the iterative schemes.

    The target omega(u_s) of the *current* layer enters the sweeps through a
    pointwise under-relaxed state; the relaxation factor 1/(1+g) is sized
    against the local coupling gain g so the combined iteration stays
    contractive where a direct substitution would not be.
    """

    def __init__(self, n_cells: int, vp: ViscosityParams, h: float, tau: float):
        self.value = np.zeros(n_cells)
        self.vp = vp
        self.h = h
        self.tau = tau
        self.enabled = vp.enabled

    def update(self, u: np.ndarray, rho: np.ndarray) -> np.ndarray:
        if not self.enabled:
            return self.value
        h, tau, vp = self.h, self.tau, self.vp
        c_lin, c_quad = _visc_coeffs(vp, h)
        u_s = np.diff(u) / h
        target = np.where(u_s < 0.0, _omega_np(rho, u_s, c_lin, c_quad), 0.0)
        gain = (2.0 * tau / (h * h)) * (vp.nu * rho + 2.0 * c_quad * rho * np.abs(u_s))
        theta = 1.0 / (1.0 + gain)
        self.value = self.value + theta * (target - self.value)
        return self.value


def step_inv2(state: MassState, bc: PistonBC, cfg: SchemeConfig,
              mesh: MassMesh) -> StepResult:
    """Advance the two-level mass scheme by one step."""
    tau, h = mesh.tau, mesh.h_s
    n_cells = mesh.n_cells
    t_new = state.t + tau
    p_new = inv2_new_pressure(state.rho, state.p)
    v_old = 1.0 / state.rho
    relax = _RelaxedOmega(n_cells, cfg.viscosity(), h, tau)

    u_work = np.empty(n_cells + 1)
    v_work = np.empty(n_cells)
    u_left = bc.velocity("left", t_new)
    u_right = bc.velocity("right", t_new)

    def residual(z):
        u_work[0], u_work[-1] = u_left, u_right
        u_work[1:-1] = z[:n_cells - 1]
        v_work[:] = z[n_cells - 1:]
        omega = relax.update(u_work, 1.0 / np.maximum(v_work, 1e-12))
        kernels.sweep_inv2(u_work, v_work, state.u, v_old, p_new, omega, tau, h)
        return np.concatenate([z[:n_cells - 1] - u_work[1:-1], z[n_cells - 1:] - v_work])

    guess = np.concatenate([state.u[1:-1], v_old])
    z, report = fixed_point_solve(residual, guess, cfg.eps_iter, cfg.max_iter,
                                  newton_fallback=not relax.enabled)
    u_new = np.empty(n_cells + 1)
    u_new[0], u_new[-1] = u_left, u_right
    u_new[1:-1] = z[:n_cells - 1]
    v_new = z[n_cells - 1:]
    if np.any(v_new <= 0.0):
        raise MeshTanglingError("two-level step produced non-positive volume")
    new = MassState(x=state.x + tau * state.u, u=u_new, rho=1.0 / v_new,
                    p=p_new, t=t_new)
    phi = flux_Q(1.0 / v_new, state.rho, p_new) + relax.value
    return StepResult(state=new, report=report, fluxes={"momentum": phi})


# ---------------------------------------------------------------------------
# three-level mass scheme
# ---------------------------------------------------------------------------

def init_mass_history(hist: PotentialHistory, mesh: MassMesh) -> MassHistory3:
    """Mass-coordinate mirror of the top two layers of a position history
    (rho = 1/x_s, u = x_t), anchored where the next position step anchors."""
    tau, h = mesh.tau, mesh.h_s
    rho_prev = h / np.diff(hist.x_curr)
    rho = h / np.diff(hist.x_next)
    u_prev = (hist.x_next - hist.x_curr) / tau
    return MassHistory3(rho_prev=rho_prev, rho=rho, u_prev=u_prev,
                        x=hist.x_next.copy(), t=hist.t + tau)


def step_inv3_mass(mh: MassHistory3, bc: PistonBC, cfg: SchemeConfig,
                   mesh: MassMesh) -> StepResult:
    """Advance the three-level mass scheme: unknowns are u at the anchor layer
    and rho on the next one."""
    tau, h = mesh.tau, mesh.h_s
    n_cells = mesh.n_cells
    v_old = 1.0 / mh.rho
    u_left = bc.velocity("left", mh.t + 0.5 * tau)
    u_right = bc.velocity("right", mh.t + 0.5 * tau)
    u_work = np.empty(n_cells + 1)
    v_work = np.empty(n_cells)

    def residual(z):
        u_work[0], u_work[-1] = u_left, u_right
        u_work[1:-1] = z[:n_cells - 1]
        v_work[:] = z[n_cells - 1:]
        kernels.sweep_mass3(u_work, v_work, mh.u_prev, v_old, mh.rho_prev, tau, h)
        return np.concatenate([z[:n_cells - 1] - u_work[1:-1], z[n_cells - 1:] - v_work])

    guess = np.concatenate([mh.u_prev[1:-1], v_old])
    z, report = fixed_point_solve(residual, guess, cfg.eps_iter, cfg.max_iter)
    u_mid = np.empty(n_cells + 1)
    u_mid[0], u_mid[-1] = u_left, u_right
    u_mid[1:-1] = z[:n_cells - 1]
    v_new = z[n_cells - 1:]
    if np.any(v_new <= 0.0):
        raise MeshTanglingError("three-level mass step produced non-positive volume")
    new = MassHistory3(rho_prev=mh.rho.copy(), rho=1.0 / v_new, u_prev=u_mid,
                       x=mh.x + tau * u_mid, t=mh.t + tau)
    phi = (1.0 / v_new) * mh.rho_prev
    return StepResult(state=new, report=report, fluxes={"momentum": phi})


# ---------------------------------------------------------------------------
# comparison schemes
# ---------------------------------------------------------------------------

def step_explicit(state: MassState, bc: PistonBC, vp: ViscosityParams,
                  mesh: MassMesh) -> StepResult:
    tau, h = mesh.tau, mesh.h_s
    n_cells = mesh.n_cells
    c_mass = float(np.max(state.rho * np.sqrt(2.0 * state.rho)))
    if tau * c_mass / h > 1.0:
        warnings.warn(f"explicit step beyond the stability bound: "
                      f"tau*max(rho*c)/h = {tau * c_mass / h:.3f}", stacklevel=2)
    t_new = state.t + tau
    omega = lagged_omega(state, vp, h, tau)
    u_new = np.empty(n_cells + 1)
    u_new[0] = bc.velocity("left", t_new)
    u_new[-1] = bc.velocity("right", t_new)
    v_new = np.empty(n_cells)
    x_new = np.empty(n_cells + 1)
    phi = kernels.step_explicit_kernel(u_new, v_new, x_new, state.u,
                                       1.0 / state.rho, state.rho, state.x,
                                       omega, tau, h)
    if np.any(v_new <= 0.0):
        raise MeshTanglingError("explicit step produced non-positive volume")
    rho_new = 1.0 / v_new
    new = MassState(x=x_new, u=u_new, rho=rho_new, p=rho_new ** 2, t=t_new)
    return StepResult(state=new, report=None, fluxes={"momentum": np.asarray(phi)})


def step_samarskiy_popov(state: MassState, bc: PistonBC, cfg: SchemeConfig,
                         vp: ViscosityParams, mesh: MassMesh) -> StepResult:
    tau, h = mesh.tau, mesh.h_s
    n_cells = mesh.n_cells
    t_new = state.t + tau
    eps_old = state.eps if state.eps is not None else state.rho.copy()
    relax = _RelaxedOmega(n_cells, vp, h, tau)
    u_work = np.empty(n_cells + 1)
    x_work = np.empty(n_cells + 1)
    v_work = np.empty(n_cells)
    p_work = np.empty(n_cells)
    u_left = bc.velocity("left", t_new)
    u_right = bc.velocity("right", t_new)
    v_work[:] = 1.0 / state.rho

    def residual(z):
        u_work[0], u_work[-1] = u_left, u_right
        u_work[1:-1] = z
        omega = relax.update(u_work, 1.0 / np.maximum(v_work, 1e-12))
        kernels.sweep_sampop(u_work, x_work, v_work, p_work, state.u, state.x,
                             omega, tau, h)
        return z - u_work[1:-1]

    z, report = fixed_point_solve(residual, state.u[1:-1].copy(), cfg.eps_iter,
                                  cfg.max_iter, newton_fallback=not relax.enabled)
    u_new = np.empty(n_cells + 1)
    u_new[0], u_new[-1] = u_left, u_right
    u_new[1:-1] = z
    x_new = state.x + tau * 0.5 * (u_new + state.u)
    v_new = np.diff(x_new) / h
    if np.any(v_new <= 0.0):
        raise MeshTanglingError("Samarskiy-Popov step produced non-positive volume")
    rho_new = 1.0 / v_new
    p_new = rho_new ** 2
    phi = p_new + relax.value
    eps_new = eps_old - phi * (v_new - 1.0 / state.rho)
    new = MassState(x=x_new, u=u_new, rho=rho_new, p=p_new, t=t_new, eps=eps_new)
    return StepResult(state=new, report=report, fluxes={"momentum": phi})


def step_yelenin_krylov(state: MassState, bc: PistonBC, cfg: SchemeConfig,
                        mesh: MassMesh) -> StepResult:
    tau, h = mesh.tau, mesh.h_s
    n_cells = mesh.n_cells
    t_new = state.t + tau
    big_p_old = state.P if state.P is not None else state.rho ** 2
    v_old = 1.0 / state.rho
    u_work = np.empty(n_cells + 1)
    v_work = np.empty(n_cells)
    p_work = np.empty(n_cells)
    u_left = bc.velocity("left", t_new)
    u_right = bc.velocity("right", t_new)

    def residual(z):
        u_work[0], u_work[-1] = u_left, u_right
        u_work[1:-1] = z
        v_work[:] = 1.0 / state.rho
        kernels.sweep_yelenin(u_work, v_work, p_work, state.u, v_old, big_p_old,
                              state.rho, tau, h)
        return z - u_work[1:-1]

    z, report = fixed_point_solve(residual, state.u[1:-1].copy(), cfg.eps_iter,
                                  cfg.max_iter)
    u_new = np.empty(n_cells + 1)
    u_new[0], u_new[-1] = u_left, u_right
    u_new[1:-1] = z
    v_new = v_old + (tau / (2.0 * h)) * np.diff(u_new + state.u)
    if np.any(v_new <= 0.0):
        raise MeshTanglingError("Yelenin-Krylov step produced non-positive volume")
    rho_new = 1.0 / v_new
    w = rho_new ** 3 + state.rho ** 3
    big_p_new = big_p_old + (v_new - v_old) * w
    g = 0.5 * (big_p_new + big_p_old) + 0.5 * (v_new + v_old) * w
    new = MassState(x=state.x + tau * 0.5 * (u_new + state.u), u=u_new,
                    rho=rho_new, p=rho_new ** 2, t=t_new, P=big_p_new)
    return StepResult(state=new, report=report, fluxes={"momentum": g})


def step_korobitsyn(state: MassState, bc: PistonBC, vp: ViscosityParams,
                    q_korob: float, mesh: MassMesh) -> StepResult:
    tau, h = mesh.tau, mesh.h_s
    n_cells = mesh.n_cells
    t_new = state.t + tau
    eps_old = state.eps if state.eps is not None else 2.0 * state.rho
    omega = lagged_omega(state, vp, h, tau)
    u_new = np.empty(n_cells + 1)
    u_new[0] = bc.velocity("left", t_new)
    u_new[-1] = bc.velocity("right", t_new)
    v_new = np.empty(n_cells)
    x_new = np.empty(n_cells + 1)
    p_new = np.empty(n_cells)
    eps_new = np.empty(n_cells)
    phi = kernels.step_korobitsyn_kernel(u_new, v_new, x_new, p_new, eps_new,
                                         state.u, 1.0 / state.rho, state.rho,
                                         state.x, state.p, eps_old,
                                         omega, tau, h, q_korob)
    if np.any(v_new <= 0.0):
        raise MeshTanglingError("Korobitsyn step produced non-positive volume")
    new = MassState(x=x_new, u=u_new, rho=1.0 / v_new, p=p_new, t=t_new,
                    eps=eps_new)
    return StepResult(state=new, report=None, fluxes={"momentum": np.asarray(phi)})
