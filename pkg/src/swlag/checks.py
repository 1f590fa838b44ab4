"""Randomized verification drivers shared by the CLI and the test suite."""

from __future__ import annotations

import numpy as np

from .exact import (coupling_residual, dilation_exact, dilation_lattice,
                    kappa_residual, mu_constraint_residual,
                    reduced_dilation_residual, solve_kappa, solve_mu)
from .invariants import (GroupElement, difference_invariants, equivariance_factor,
                         group_transform, residual_via_invariants)
from .stencil import Stencil9, residual_inv3, scaled_residual_inv3
from .stepping import step_inv3_general

EPS_VALUES = (-1.0, -0.25, 0.25, 1.0)


def random_stencil(rng, regular: bool = True, min_w: float = 1e-3,
                   max_tries: int = 200) -> Stencil9:
    """Monotone random stencil with the scaled residual bounded away from 0."""
    for _ in range(max_tries):
        tau_m = rng.uniform(0.5, 2.0)
        h_m = rng.uniform(0.5, 2.0)
        tau_p = tau_m if regular else rng.uniform(0.5, 2.0)
        h_p = h_m if regular else rng.uniform(0.5, 2.0)
        t = rng.uniform(0.5, 2.0)
        s = rng.uniform(0.5, 2.0)
        layers = []
        for _ in range(3):
            xm = rng.uniform(-1.0, 1.0)
            x = xm + rng.uniform(0.6, 1.6) * h_m
            xp = x + rng.uniform(0.6, 1.6) * h_p
            layers.append((xm, x, xp))
        st = Stencil9(tau_m=tau_m, tau_p=tau_p, h_m=h_m, h_p=h_p,
                      x=layers[1][1], xp=layers[1][2], xm=layers[1][0],
                      xh=layers[2][1], xhp=layers[2][2], xhm=layers[2][0],
                      xc=layers[0][1], xcp=layers[0][2], xcm=layers[0][0],
                      t=t, s=s)
        if abs(scaled_residual_inv3(st)) >= min_w:
            return st
    raise RuntimeError("failed to draw a non-degenerate stencil")


def invariance_report(n_samples: int = 100, seed: int = 2024,
                      eps_values=EPS_VALUES) -> dict[str, float]:
    """Worst relative defects of W-invariance and bare-residual equivariance."""
    rng = np.random.default_rng(seed)
    stencils = [random_stencil(rng) for _ in range(n_samples)]
    out = {}
    for k in range(1, 7):
        worst = 0.0
        for st in stencils:
            w0 = scaled_residual_inv3(st)
            for eps in eps_values:
                w1 = scaled_residual_inv3(group_transform(GroupElement(k, eps), st))
                worst = max(worst, abs(w1 - w0) / abs(w0))
        out[f"W invariance X{k}"] = worst
    for k in (5, 6):
        worst = 0.0
        for st in stencils:
            r0 = residual_inv3(st)
            for eps in eps_values:
                r1 = residual_inv3(group_transform(GroupElement(k, eps), st))
                factor = equivariance_factor(k, eps)
                worst = max(worst, abs(r1 - factor * r0) / abs(factor * r0))
        out[f"residual equivariance X{k}"] = worst
    return out


def representation_report(n_samples: int = 1000, seed: int = 2024,
                          mu_visc: float = 0.01) -> dict[str, float]:
    """Invariant representation vs the directly scaled residual."""
    rng = np.random.default_rng(seed)
    worst_plain = worst_visc = 0.0
    for _ in range(n_samples):
        st = random_stencil(rng, regular=False)
        iv = difference_invariants(st)
        w_direct = scaled_residual_inv3(st)
        w_inv = residual_via_invariants(iv)
        worst_plain = max(worst_plain, abs(w_inv - w_direct) / abs(w_direct))
        alpha = st.tau_m / st.h_m
        wv_direct = scaled_residual_inv3(st, mu_visc)
        wv_inv = residual_via_invariants(iv, mu_visc, alpha)
        worst_visc = max(worst_visc, abs(wv_inv - wv_direct) / abs(wv_direct))
    return {"plain": worst_plain, "viscous": worst_visc}


def pick_lattice_roots(delta: float) -> tuple[float, float]:
    """kappa root nearest (but not equal to) 1, and the mu root nearest 1."""
    kappas = [k for k in solve_kappa(delta) if abs(k - 1.0) > 1e-8]
    mus = solve_mu(delta)
    if not kappas or not mus:
        raise RuntimeError(f"no usable lattice roots at delta={delta}")
    kappa = min(kappas, key=lambda k: abs(k - 1.0))
    mu = min(mus, key=lambda m: abs(m - 1.0))
    return kappa, mu


def dilation_report(delta: float = 0.01, m_cells: int = 6, n_steps: int = 6,
                    s0: float = 1.0, t0: float = 1.0) -> dict:
    kappa, mu = pick_lattice_roots(delta)
    t, s, x = dilation_lattice(kappa, mu, s0, t0, m_cells, n_steps)
    # The residual is algebraically zero on the constrained lattice; with the
    # kappa root next to 1 the lattice is nearly uniform and the three-level
    # second difference amplifies double rounding of psi by 1/tau^2 ~ 1e-9,
    # so the identity itself is evaluated in extended precision.
    tl = np.longdouble(t0) * np.longdouble(mu) ** (3 * np.arange(n_steps + 1))
    sl = np.longdouble(s0) * np.longdouble(kappa) ** (3 * np.arange(m_cells + 1))
    psi = np.cbrt(np.longdouble(54.0) * tl * tl)
    worst = 0.0
    for n in range(1, n_steps):
        for m in range(1, m_cells):
            res = reduced_dilation_residual(psi[n - 1], psi[n], psi[n + 1],
                                            tl[n - 1], tl[n], tl[n + 1],
                                            sl[m], sl[m - 1], sl[m + 1])
            worst = max(worst, float(abs(res)) / 12.0)
    x_new = step_inv3_general(x[0], x[1], s, t[0], t[1], t[2],
                              x[2][0], x[2][-1], eps_iter=1e-13)
    step_err = float(np.max(np.abs(x_new - x[2]) / np.abs(x[2])))
    return {
        "delta": delta, "kappa": kappa, "mu": mu,
        "kappa_roots": solve_kappa(delta), "mu_roots": solve_mu(delta),
        "kappa_residual": kappa_residual(kappa, delta),
        "mu_residual": mu_constraint_residual(mu, delta),
        "coupling_residual": coupling_residual(kappa, mu),
        "max_reduced_residual": worst,
        "step_error": step_err,
    }
