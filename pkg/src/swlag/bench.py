"""Benchmark of the sweep kernels: compiled extension vs pure Python."""

from __future__ import annotations

import time

import numpy as np

from .kernels import BACKEND, available_backends


def _setup(n_cells: int):
    rng = np.random.default_rng(7)
    h, tau = 0.02, 5e-4
    u = rng.uniform(-0.1, 0.1, n_cells + 1)
    v = rng.uniform(0.8, 1.2, n_cells)
    p = (1.0 / v) ** 2
    x = np.concatenate([[0.0], np.cumsum(v * h)])
    return h, tau, u, v, p, x


def _time_inv2(mod, n_cells: int, n_steps: int) -> float:
    h, tau, u, v, p, _ = _setup(n_cells)
    u_new, v_new = u.copy(), v.copy()
    omega = np.zeros(n_cells)
    start = time.perf_counter()
    for _ in range(n_steps):
        mod.sweep_inv2(u_new, v_new, u, v, p, omega, tau, h)
    return time.perf_counter() - start


def _time_inv3(mod, n_cells: int, n_steps: int) -> float:
    h, tau, _, v, _, x = _setup(n_cells)
    x_prev, x_curr, x_new = x.copy(), x.copy(), x.copy()
    start = time.perf_counter()
    for _ in range(n_steps):
        mod.sweep_inv3(x_new, x_curr, x_prev, tau, h, 0.0)
    return time.perf_counter() - start


def _time_explicit(mod, n_cells: int, n_steps: int) -> float:
    h, tau, u, v, _, x = _setup(n_cells)
    rho = 1.0 / v
    u_new, v_new, x_new = u.copy(), v.copy(), x.copy()
    omega = np.zeros(n_cells)
    start = time.perf_counter()
    for _ in range(n_steps):
        mod.step_explicit(u_new, v_new, x_new, u, v, rho, x, omega, tau, h)
    return time.perf_counter() - start


def run_benchmark(n_cells: int = 150, n_steps: int = 400) -> None:
    backends = available_backends()
    print(f"active backend: {BACKEND}")
    print(f"{n_steps} sweeps over {n_cells} cells:")
    timings = {}
    for name, mod in backends.items():
        timings[name] = {
            "inv3 sweep": _time_inv3(mod, n_cells, n_steps),
            "inv2 sweep": _time_inv2(mod, n_cells, n_steps),
            "explicit step": _time_explicit(mod, n_cells, n_steps),
        }
    for kernel in ("inv3 sweep", "inv2 sweep", "explicit step"):
        line = f"  {kernel:>14}:"
        for name in backends:
            dt = timings[name][kernel]
            line += f"  {name} {dt * 1e3:8.2f} ms"
        if "cython" in timings and "python" in timings:
            speedup = timings["python"][kernel] / timings["cython"][kernel]
            line += f"  (speedup {speedup:5.1f}x)"
        print(line)
