"""Consistency-order studies against the closed-form dilation solution.

x = (54 s t^2)^{1/3} solves the flat-bottom equation exactly, so the scheme
residuals evaluated on it measure pure truncation error; halving (h, tau)
together gives the observed order directly.
"""

from __future__ import annotations

import numpy as np

from .exact import dilation_exact
from .stencil import flux_Q, residual_inv3, stencils_from_layers


def _grids(level: int, h0: float, tau_ratio: float, s_lo: float, s_span: float):
    h = h0 / 2 ** level
    tau = tau_ratio * h
    n_cells = int(round(s_span / h))
    s = s_lo + h * np.arange(n_cells + 1)
    return h, tau, s


def residual_norm_inv3(level: int, h0: float = 0.08, tau_ratio: float = 0.8,
                       s_lo: float = 1.0, s_span: float = 1.0,
                       t_anchor: float = 1.5) -> float:
    h, tau, s = _grids(level, h0, tau_ratio, s_lo, s_span)
    layers = [dilation_exact(s, t_anchor + k * tau) for k in (-1, 0, 1)]
    st = stencils_from_layers(layers[0], layers[1], layers[2], tau, h)
    return float(np.max(np.abs(residual_inv3(st))))


def residual_norm_inv2(level: int, h0: float = 0.08, tau_ratio: float = 0.8,
                       s_lo: float = 1.0, s_span: float = 1.0,
                       t_anchor: float = 1.5) -> float:
    """Worst residual of the two-level relations on exact point values.

    Fields are sampled from the dilation solution (u = d x/dt, rho = 1/x_s,
    p = rho^2 pointwise); the continuity, momentum and state relations are
    each consistent to first order.
    """
    h, tau, s = _grids(level, h0, tau_ratio, s_lo, s_span)
    t0, t1 = t_anchor - tau, t_anchor

    def fields(t):
        u = (2.0 / 3.0) * np.cbrt(54.0 * s / t)
        s_c = 0.5 * (s[:-1] + s[1:])
        rho = 3.0 * s_c ** (2.0 / 3.0) / np.cbrt(54.0 * t * t)
        return u, rho, rho ** 2

    u0, rho0, p0 = fields(t0)
    u1, rho1, p1 = fields(t1)
    r_state = 1.0 / np.sqrt(p1) + 1.0 / np.sqrt(p0) - 2.0 / rho0
    r_cont = (1.0 / rho1 - 1.0 / rho0) / tau \
        - ((u1 + u0)[1:] - (u1 + u0)[:-1]) / (2.0 * h)
    q = flux_Q(rho1, rho0, p1)
    r_mom = (u1[1:-1] - u0[1:-1]) / tau + (q[1:] - q[:-1]) / h
    return float(max(np.max(np.abs(r_state)),
                     np.max(np.abs(r_cont)), np.max(np.abs(r_mom))))


def observed_orders(norm_fn, levels: int = 4, **kw) -> tuple[list[float], list[float]]:
    norms = [norm_fn(k, **kw) for k in range(levels)]
    orders = [float(np.log2(norms[k] / norms[k + 1])) for k in range(levels - 1)]
    return norms, orders
