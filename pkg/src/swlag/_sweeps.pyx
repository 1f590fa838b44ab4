# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled sweep kernels; stage order and elementwise expressions mirror
_sweeps_py.py exactly (compiled with -ffp-contract=off so both backends are
bit-identical)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

BACKEND = "cython"

ctypedef cnp.float64_t f64


def sweep_inv3(f64[::1] x_new, f64[::1] x_curr, f64[::1] x_prev,
               double tau, double h, double mu):
    cdef Py_ssize_t n = x_new.shape[0]
    cdef Py_ssize_t m
    cdef double tt = tau * tau
    cdef double ah_s, ah_sb, ac_s, ac_sb, flux, visc
    for m in range(1, n - 1):
        ah_s = (x_new[m + 1] - x_new[m]) / h
        ah_sb = (x_new[m] - x_new[m - 1]) / h
        ac_s = (x_prev[m + 1] - x_prev[m]) / h
        ac_sb = (x_prev[m] - x_prev[m - 1]) / h
        flux = (1.0 / (ah_s * ac_s) - 1.0 / (ah_sb * ac_sb)) / h
        visc = mu * 0.5 * ((ah_s - ah_sb) / h + (ac_s - ac_sb) / h)
        x_new[m] = 2.0 * x_curr[m] - x_prev[m] - tt * (flux + visc)


def sweep_inv2(f64[::1] u_new, f64[::1] v_new, f64[::1] u_old, f64[::1] v_old,
               f64[::1] p_new, f64[::1] omega, double tau, double h):
    cdef Py_ssize_t n_cells = v_new.shape[0]
    cdef Py_ssize_t m
    cdef double inv_q
    phi_arr = np.empty(n_cells)
    cdef f64[::1] phi = phi_arr
    for m in range(n_cells):
        inv_q = (4.0 * v_new[m] * v_old[m]
                 - (2.0 / sqrt(p_new[m])) * (v_new[m] + v_old[m]) + 1.0 / p_new[m])
        phi[m] = 1.0 / inv_q + omega[m]
    for m in range(1, n_cells):
        u_new[m] = u_old[m] - (tau / h) * (phi[m] - phi[m - 1])
    for m in range(n_cells):
        v_new[m] = v_old[m] + (tau / (2.0 * h)) * (
            (u_new[m + 1] + u_old[m + 1]) - (u_new[m] + u_old[m]))


def sweep_sampop(f64[::1] u_new, f64[::1] x_new, f64[::1] v_new, f64[::1] p_new,
                 f64[::1] u_old, f64[::1] x_old, f64[::1] omega,
                 double tau, double h):
    cdef Py_ssize_t n_cells = v_new.shape[0]
    cdef Py_ssize_t m
    cdef double rho
    phi_arr = np.empty(n_cells)
    cdef f64[::1] phi = phi_arr
    for m in range(n_cells + 1):
        x_new[m] = x_old[m] + tau * 0.5 * (u_new[m] + u_old[m])
    for m in range(n_cells):
        v_new[m] = (x_new[m + 1] - x_new[m]) / h
        rho = 1.0 / v_new[m]
        p_new[m] = rho * rho
        phi[m] = p_new[m] + omega[m]
    for m in range(1, n_cells):
        u_new[m] = u_old[m] - (tau / h) * (phi[m] - phi[m - 1])


def sweep_yelenin(f64[::1] u_new, f64[::1] v_new, f64[::1] big_p_new,
                  f64[::1] u_old, f64[::1] v_old, f64[::1] big_p_old,
                  f64[::1] rho_old, double tau, double h):
    cdef Py_ssize_t n_cells = v_new.shape[0]
    cdef Py_ssize_t m
    cdef double w, rho_new
    g_arr = np.empty(n_cells)
    cdef f64[::1] g = g_arr
    for m in range(n_cells):
        v_new[m] = v_old[m] + (tau / (2.0 * h)) * (
            (u_new[m + 1] + u_old[m + 1]) - (u_new[m] + u_old[m]))
        rho_new = 1.0 / v_new[m]
        w = rho_new * rho_new * rho_new + rho_old[m] * rho_old[m] * rho_old[m]
        big_p_new[m] = big_p_old[m] + (v_new[m] - v_old[m]) * w
        g[m] = 0.5 * (big_p_new[m] + big_p_old[m]) + 0.5 * (v_new[m] + v_old[m]) * w
    for m in range(1, n_cells):
        u_new[m] = u_old[m] - (tau / h) * (g[m] - g[m - 1])


def step_explicit(f64[::1] u_new, f64[::1] v_new, f64[::1] x_new,
                  f64[::1] u_old, f64[::1] v_old, f64[::1] rho_old, f64[::1] x_old,
                  f64[::1] omega, double tau, double h):
    cdef Py_ssize_t n_cells = v_new.shape[0]
    cdef Py_ssize_t m
    phi_arr = np.empty(n_cells)
    cdef f64[::1] phi = phi_arr
    for m in range(n_cells):
        v_new[m] = v_old[m] + (tau / h) * (u_old[m + 1] - u_old[m])
        phi[m] = rho_old[m] * (1.0 / v_new[m]) + omega[m]
    for m in range(1, n_cells):
        u_new[m] = u_old[m] - (tau / h) * (phi[m] - phi[m - 1])
    for m in range(n_cells + 1):
        x_new[m] = x_old[m] + tau * u_old[m]
    return phi_arr


def step_korobitsyn(f64[::1] u_new, f64[::1] v_new, f64[::1] x_new, f64[::1] p_new,
                    f64[::1] eps_new, f64[::1] u_old, f64[::1] v_old, f64[::1] rho_old,
                    f64[::1] x_old, f64[::1] p_old, f64[::1] eps_old,
                    f64[::1] omega, double tau, double h, double q):
    cdef Py_ssize_t n_cells = v_new.shape[0]
    cdef Py_ssize_t m
    cdef double u_t, rho_left
    phi_arr = np.empty(n_cells)
    cdef f64[::1] phi = phi_arr
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
    return phi_arr


def sweep_mass3(f64[::1] u_mid, f64[::1] v_new, f64[::1] u_prev, f64[::1] v_old,
                f64[::1] rho_prev, double tau, double h):
    cdef Py_ssize_t n_cells = v_new.shape[0]
    cdef Py_ssize_t m
    phi_arr = np.empty(n_cells)
    cdef f64[::1] phi = phi_arr
    for m in range(n_cells):
        phi[m] = (1.0 / v_new[m]) * rho_prev[m]
    for m in range(1, n_cells):
        u_mid[m] = u_prev[m] - (tau / h) * (phi[m] - phi[m - 1])
    for m in range(n_cells):
        v_new[m] = v_old[m] + (tau / h) * (u_mid[m + 1] - u_mid[m])
