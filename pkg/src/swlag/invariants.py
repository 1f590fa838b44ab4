"""Difference invariants and finite point-group transformations.

The six generators of the flat-bottom equation are

    X1 = d/dt, X2 = d/ds, X3 = d/dx, X4 = t d/dx,
    X5 = 3t d/dt + 2x d/dx, X6 = 3s d/ds + x d/dx.

On the 15 coordinates of the 9-point stencil they leave exactly nine
functionally independent combinations I1..I9 unchanged, with the scale
omega^3 = tau_-^2 h_-.  Invariance of the scheme is checked here through the
exponentiated (finite) transformations, not infinitesimally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import SingularRepresentationError
from .stencil import Stencil9, residual_inv3, scaled_residual_inv3


@dataclass(frozen=True)
class InvariantVector:
    I1: float
    I2: float
    I3: float
    I4: float
    I5: float
    I6: float
    I7: float
    I8: float
    I9: float
    omega: float


@dataclass(frozen=True)
class GroupElement:
    """Generator index k in 1..6 and finite parameter eps."""

    k: int
    eps: float

    def __post_init__(self):
        if self.k not in (1, 2, 3, 4, 5, 6):
            raise ValueError(f"generator index must be 1..6, got {self.k}")
        if not np.all(np.isfinite(self.eps)):
            raise ValueError("group parameter must be finite")


def difference_invariants(st: Stencil9) -> InvariantVector:
    omega = np.cbrt(st.tau_m ** 2 * st.h_m)
    return InvariantVector(
        I1=st.h_p / st.h_m,
        I2=st.tau_p / st.tau_m,
        I3=(st.x - st.xm) / omega,
        I4=(st.xp - st.x) / omega,
        I5=(st.xcp - st.xc) / omega,
        I6=(st.xc - st.xcm) / omega,
        I7=(st.tau_p * (st.x - st.xc) + st.tau_m * (st.x - st.xh)) / (omega * st.tau_m),
        I8=(st.tau_p * (st.x - st.xc) + st.tau_m * (st.x - st.xhp)) / (omega * st.tau_m),
        I9=(st.tau_p * (st.x - st.xc) + st.tau_m * (st.x - st.xhm)) / (omega * st.tau_m),
        omega=omega,
    )


def residual_via_invariants(iv: InvariantVector, mu_visc: float = 0.0, alpha: float = 0.0):
    """Scheme residual rebuilt from the nine invariants.

    Equals tau_-^{4/3} h_-^{-1/3} * residual_inv3 on the matching stencil.
    The dissipative term additionally carries the mesh ratio
    alpha = tau_-/h_- (the mu-regularized scheme is not invariant under the
    two dilations, so a purely invariant form of it cannot exist).
    """
    d1 = iv.I2 * iv.I6 * (iv.I7 - iv.I9)
    d2 = iv.I5 * (iv.I7 - iv.I8)
    if np.any(np.asarray(d1) == 0.0) or np.any(np.asarray(d2) == 0.0):
        raise SingularRepresentationError("vanishing denominator in invariant form")
    res = (iv.I2 - iv.I6 * iv.I7 * (iv.I7 - iv.I9)) / d1 + iv.I1 ** 2 / d2
    if np.any(mu_visc != 0.0):
        res = res + (mu_visc * alpha ** 2 / 2.0) * (
            (iv.I5 + iv.I7 - iv.I8) / iv.I1 + iv.I7 - iv.I9 - iv.I6)
    return res


def group_transform(g: GroupElement, st: Stencil9) -> Stencil9:
    """Finite transformation of a stencil under one generator."""
    t_layers = (st.t - st.tau_m, st.t, st.t + st.tau_p)
    if g.k == 1:
        return replace(st, t=st.t + g.eps)
    if g.k == 2:
        return replace(st, s=st.s + g.eps)
    if g.k == 3:
        e = g.eps
        return replace(st, x=st.x + e, xp=st.xp + e, xm=st.xm + e,
                       xh=st.xh + e, xhp=st.xhp + e, xhm=st.xhm + e,
                       xc=st.xc + e, xcp=st.xcp + e, xcm=st.xcm + e)
    if g.k == 4:
        e = g.eps
        tc, tn, th = t_layers
        return replace(st, x=st.x + e * tn, xp=st.xp + e * tn, xm=st.xm + e * tn,
                       xh=st.xh + e * th, xhp=st.xhp + e * th, xhm=st.xhm + e * th,
                       xc=st.xc + e * tc, xcp=st.xcp + e * tc, xcm=st.xcm + e * tc)
    if g.k == 5:
        a_t = math.exp(3.0 * g.eps)
        a_x = math.exp(2.0 * g.eps)
        return replace(st, t=st.t * a_t, tau_m=st.tau_m * a_t, tau_p=st.tau_p * a_t,
                       x=st.x * a_x, xp=st.xp * a_x, xm=st.xm * a_x,
                       xh=st.xh * a_x, xhp=st.xhp * a_x, xhm=st.xhm * a_x,
                       xc=st.xc * a_x, xcp=st.xcp * a_x, xcm=st.xcm * a_x)
    a_s = math.exp(3.0 * g.eps)
    a_x = math.exp(g.eps)
    return replace(st, s=st.s * a_s, h_m=st.h_m * a_s, h_p=st.h_p * a_s,
                   x=st.x * a_x, xp=st.xp * a_x, xm=st.xm * a_x,
                   xh=st.xh * a_x, xhp=st.xhp * a_x, xhm=st.xhm * a_x,
                   xc=st.xc * a_x, xcp=st.xcp * a_x, xcm=st.xcm * a_x)


def group_transform_solution(g: GroupElement, t_layers: np.ndarray, s_nodes: np.ndarray,
                             x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Finite transformation of a whole mesh + solution.

    x has shape (n_layers, n_nodes); regular meshes stay regular because all
    six transformations act affinely on t and s separately.
    """
    t = np.asarray(t_layers, dtype=float).copy()
    s = np.asarray(s_nodes, dtype=float).copy()
    x = np.asarray(x, dtype=float).copy()
    if g.k == 1:
        t += g.eps
    elif g.k == 2:
        s += g.eps
    elif g.k == 3:
        x += g.eps
    elif g.k == 4:
        x += g.eps * t[:, None]
    elif g.k == 5:
        t *= math.exp(3.0 * g.eps)
        x *= math.exp(2.0 * g.eps)
    else:
        s *= math.exp(3.0 * g.eps)
        x *= math.exp(g.eps)
    return t, s, x


def invariance_defect(g: GroupElement, st: Stencil9, mu_visc: float = 0.0):
    """|W(g(st)) - W(st)| with W the scaled scheme residual."""
    w0 = scaled_residual_inv3(st, mu_visc)
    w1 = scaled_residual_inv3(group_transform(g, st), mu_visc)
    return abs(w1 - w0)


def equivariance_factor(k: int, eps: float) -> float:
    """Exact scaling of the bare residual under one generator.

    Translations and the Galilean boost leave it unchanged; the dilations
    scale it by exp(-4 eps) (X5) and exp(eps) (X6).
    """
    if k == 5:
        return math.exp(-4.0 * eps)
    if k == 6:
        return math.exp(eps)
    return 1.0
