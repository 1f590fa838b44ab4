"""The 9-point stencil and the residuals of the structure-preserving schemes.

Difference quotients use the standard orientation throughout:

    x_t   = (x^ - x) / tau_plus          forward in t
    xc_t  = (x - xv) / tau_minus         forward in t, one layer down
    x_ttc = (x_t - xc_t) / tau_minus     three-level second difference
    f_s   = (f+ - f) / h_plus            forward in s
    f_sb  = (f - f-) / h_minus           backward in s

where ^ marks the upper time layer and v the lower one.  All formulas accept
scalars or broadcastable numpy arrays, so a whole layer of stencils can be
evaluated in one call.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import SingularFluxError, SingularStencilError
from .mesh import BottomProfile

# Relative threshold below which the chord slope (H(x^)-H(xv))/(x^-xv) in the
# energy-form bottom scheme is replaced by the backward-space form.
BOTTOM_CHORD_SWITCH = 1e-12


@dataclass(frozen=True)
class Stencil9:
    """Values on the 9-point stencil of the three-level position schemes.

    Naming: plain = middle layer, h-prefix = upper layer, c-prefix = lower
    layer; p/m suffix = right/left space neighbour.  t and s locate the
    stencil centre (needed only by the finite group transformations).
    """

    tau_m: float
    tau_p: float
    h_m: float
    h_p: float
    x: float
    xp: float
    xm: float
    xh: float
    xhp: float
    xhm: float
    xc: float
    xcp: float
    xcm: float
    t: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.tau_m) <= 0) or np.any(np.asarray(self.tau_p) <= 0) \
                or np.any(np.asarray(self.h_m) <= 0) or np.any(np.asarray(self.h_p) <= 0):
            raise SingularStencilError("stencil steps must be positive")

    # -- forward/backward difference quotients ------------------------------
    @property
    def x_t(self):
        return (self.xh - self.x) / self.tau_p

    @property
    def xc_t(self):
        return (self.x - self.xc) / self.tau_m

    @property
    def x_ttc(self):
        return (self.x_t - self.xc_t) / self.tau_m

    @property
    def x_s(self):
        return (self.xp - self.x) / self.h_p

    @property
    def x_sb(self):
        return (self.x - self.xm) / self.h_m

    @property
    def xh_s(self):
        return (self.xhp - self.xh) / self.h_p

    @property
    def xh_sb(self):
        return (self.xh - self.xhm) / self.h_m

    @property
    def xc_s(self):
        return (self.xcp - self.xc) / self.h_p

    @property
    def xc_sb(self):
        return (self.xc - self.xcm) / self.h_m

    @property
    def xh_ssb(self):
        return (self.xh_s - self.xh_sb) / self.h_m

    @property
    def xc_ssb(self):
        return (self.xc_s - self.xc_sb) / self.h_m


def stencils_from_layers(x_prev, x_curr, x_next, tau: float, h: float,
                         t: float = 0.0, s_nodes=None) -> Stencil9:
    """Vector stencil over the interior nodes 1..M-1 of three uniform layers."""
    sl, c, sr = slice(0, -2), slice(1, -1), slice(2, None)
    s_mid = 0.0 if s_nodes is None else np.asarray(s_nodes)[c]
    return Stencil9(
        tau_m=tau, tau_p=tau, h_m=h, h_p=h,
        x=x_curr[c], xp=x_curr[sr], xm=x_curr[sl],
        xh=x_next[c], xhp=x_next[sr], xhm=x_next[sl],
        xc=x_prev[c], xcp=x_prev[sr], xcm=x_prev[sl],
        t=t, s=s_mid,
    )


def residual_inv3(st: Stencil9, mu_visc: float = 0.0):
    """Three-level position scheme; approximates x_tt - 2 x_ss / x_s^3 = 0.

    The mu_visc term is the dissipative regularization
    mu * (x^_ssb + xv_ssb) / 2; mu_visc = 0 gives the pure scheme.
    """
    a = st.xh_s * st.xc_s
    b = st.xh_sb * st.xc_sb
    if np.any(np.asarray(a) == 0.0) or np.any(np.asarray(b) == 0.0):
        raise SingularStencilError("degenerate layer spacing in flux term")
    res = st.x_ttc + (1.0 / a - 1.0 / b) / st.h_m
    if np.any(mu_visc != 0.0):
        res = res + mu_visc * 0.5 * (st.xh_ssb + st.xc_ssb)
    return res


def scaled_residual_inv3(st: Stencil9, mu_visc: float = 0.0):
    """tau_-^{4/3} h_-^{-1/3} times the scheme residual.

    This is the combination left unchanged by all six point symmetries of
    the flat-bottom equation (the bare residual only scales under the
    dilations).
    """
    return st.tau_m ** (4.0 / 3.0) / st.h_m ** (1.0 / 3.0) * residual_inv3(st, mu_visc)


def flux_Q(rho, rho_prev, p):
    """Pressure-like flux of the two-level mass scheme.

    1/Q = 4/(rho*rhov) - (2/sqrt(p)) (1/rho + 1/rhov) + 1/p, with rhov the
    lower-layer height.  On a uniform state (c, c, c^2) this returns c^2.
    """
    rho = np.asarray(rho, dtype=float)
    rho_prev = np.asarray(rho_prev, dtype=float)
    p = np.asarray(p, dtype=float)
    inv_q = 4.0 / (rho * rho_prev) - (2.0 / np.sqrt(p)) * (1.0 / rho + 1.0 / rho_prev) + 1.0 / p
    bad = ~np.isfinite(inv_q) | (inv_q == 0.0)
    if np.any(bad):
        cell = int(np.argmax(np.atleast_1d(bad)))
        raise SingularFluxError("vanishing denominator in Q flux", cell=cell)
    q = 1.0 / inv_q
    return q if q.ndim else float(q)


def _bottom_chord_slope(st: Stencil9, bottom: BottomProfile):
    """[(H-Hv)/tau_- + (H^-H)/tau_+] / (x_t + xc_t).

    On a uniform time lattice this is the chord slope
    (H(x^)-H(xv))/(x^-xv) ~ H'(x).  Nodes that are instantaneously at rest
    (x_t + xc_t ~ 0) make it 0/0; there the backward-space form
    (H(x)-H(x-))/(x-x-) is substituted.
    """
    h_mid = bottom.H(st.x)
    num = (h_mid - bottom.H(st.xc)) / st.tau_m + (bottom.H(st.xh) - h_mid) / st.tau_p
    den = st.x_t + st.xc_t
    vel_scale = np.maximum(np.abs(st.x_t) + np.abs(st.xc_t),
                           (np.abs(st.xh) + np.abs(st.xc)) / (st.tau_m + st.tau_p))
    singular = np.abs(den) <= BOTTOM_CHORD_SWITCH * np.maximum(vel_scale, 1.0)
    safe_den = np.where(singular, 1.0, den)
    chord = num / safe_den
    fallback = (h_mid - bottom.H(st.xm)) / np.maximum(st.x - st.xm, 1e-300)
    return np.where(singular, fallback, chord), np.any(singular)


def residual_bottom_energy(st: Stencil9, bottom: BottomProfile):
    """Arbitrary-bottom scheme built on the chord form of H'(x).

    Keeps the discrete mass and energy balances exact; for a flat bottom it
    reduces to residual_inv3 with mu_visc = 0.
    """
    chord, _ = _bottom_chord_slope(st, bottom)
    a = st.xh_s * st.xc_s
    b = st.xh_sb * st.xc_sb
    return st.x_ttc + (1.0 / a - 1.0 / b) / st.h_m - chord


def residual_bottom_momentum(st: Stencil9, bottom: BottomProfile):
    """Arbitrary-bottom scheme built on the backward-space form of H'(x).

    Keeps the discrete mass and momentum balances exact.
    """
    a = np.sqrt(st.xh_s * st.xc_s)
    b = np.sqrt(st.xh_sb * st.xc_sb)
    dsb_h = (bottom.H(st.x) - bottom.H(st.xm)) / st.h_m
    bracket = 0.5 * (st.x_s + st.x_sb) * st.x_ttc - dsb_h
    return 0.5 * (1.0 / a + 1.0 / b) * bracket + (1.0 / a ** 2 - 1.0 / b ** 2) / st.h_m


def bottom_momentum_multiplier(st: Stencil9):
    """Integrating factor turning residual_bottom_momentum into a divergence."""
    a = np.sqrt(st.xh_s * st.xc_s)
    b = np.sqrt(st.xh_sb * st.xc_sb)
    return 2.0 * a * b / (a + b)


def transform_linear_to_flat(x, t_n, t_np1, c1: float):
    """Map a linear-bottom solution to a flat-bottom one: x~ = x - (C1/2) t t^."""
    return x - 0.5 * c1 * t_n * t_np1


def apply_linear_bottom(x, t_n, t_np1, c1: float):
    """Inverse of transform_linear_to_flat."""
    return x + 0.5 * c1 * t_n * t_np1
