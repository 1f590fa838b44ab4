"""Command-line interface.

Subcommands: run (piston tests), oracle (closed-form piston profiles),
invariance-check (finite group transformations), convergence (order study),
exact-dilation (geometric-lattice exact solution), bench (kernel backends).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, SwlagError
from .harness import asserted_laws, parse_config, run


def _add_run_parser(sub):
    p = sub.add_parser("run", help="advance a scheme on one of the piston tests")
    p.add_argument("--scheme", help="scheme id (default inv2)")
    p.add_argument("--test", help="test problem 1..4 (default 2)")
    p.add_argument("--hs", help="mass step (default 0.02)")
    p.add_argument("--tau-ratio", dest="tau_ratio", help="tau / h_s (default 0.025)")
    p.add_argument("--nu", help="linear viscosity coefficient")
    p.add_argument("--kappa-visc", dest="kappa_visc", help="quadratic viscosity coefficient")
    p.add_argument("--mu-visc", dest="mu_visc", help="three-level dissipative factor")
    p.add_argument("--eps", help="iteration tolerance (default 1e-3)")
    p.add_argument("--t-end", dest="t_end", help="final time (default per test)")
    p.add_argument("--out", help="output directory for CSV artifacts")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--q-korob", dest="q_korob", help="Korobitsyn weight in [0,1]")
    p.add_argument("--u-piston", dest="u_piston", help="test-1 withdrawal speed")
    p.add_argument("--max-iter", dest="max_iter", help="iteration cap")
    p.add_argument("--rho0", help="initial column height (default 1)")


def _cmd_run(args) -> int:
    overrides = {k: getattr(args, k) for k in
                 ("scheme", "test", "hs", "tau_ratio", "nu", "kappa_visc",
                  "mu_visc", "eps", "t_end", "out", "q_korob", "u_piston",
                  "max_iter", "rho0")}
    config = parse_config(args.config, overrides)
    result = run(config)
    if result.ledger is not None:
        print(f"steps: {result.n_steps}")
        for law in ("mass", "momentum", "energy", "center_of_mass"):
            e = result.ledger.entries[law]
            print(f"{law:>15}: defect {e.defect_abs:.3e} (rel {e.defect_rel:.3e})")
    for path in result.snapshot_paths:
        print(f"snapshot: {path}")
    if not result.completed:
        print(f"aborted: {result.error}", file=sys.stderr)
        return 2
    if result.failed_laws:
        print(f"conservation assertion failed for: "
              f"{', '.join(result.failed_laws)}", file=sys.stderr)
        return 1
    print(f"asserted laws ok: {', '.join(asserted_laws(config.scheme))}")
    return 0


def _cmd_oracle(args) -> int:
    from .exact import rarefaction_oracle, shock_state_oracle
    test = int(args.test)
    rho0 = float(args.rho0)
    t = float(args.t) if args.t is not None else (0.55 if test == 1 else 0.6)
    n = int(args.points)
    rows = []
    if test == 1:
        u_p = float(args.u_piston)
        x = np.linspace(u_p * t, 3.0 / rho0, n)
        u, rho = rarefaction_oracle(u_p, rho0, t, x)
        rows = [(t, x[i], u[i], rho[i], rho[i] ** 2) for i in range(n)]
    elif test == 2:
        u_p = abs(float(args.u_piston))
        rho1, w = shock_state_oracle(u_p, rho0)
        x_shock = w / rho0 * t
        x = np.linspace(u_p * t, 3.0 / rho0, n)
        for xi in x:
            if xi < x_shock:
                rows.append((t, xi, u_p, rho1, rho1 ** 2))
            else:
                rows.append((t, xi, 0.0, rho0, rho0 ** 2))
        print(f"post-shock height: {rho1!r}")
        print(f"shock speed (mass coordinate): {w!r}")
        print(f"shock position at t={t}: {x_shock!r}")
    else:
        raise ConfigError("oracle supports tests 1 (fan) and 2 (shock)")
    header = "t,x,u,rho,p"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        print(f"wrote {args.out}")
    else:
        print(header)
        for row in rows:
            print(",".join(f"{v:.8g}" for v in row))
    return 0


def _cmd_invariance(args) -> int:
    from .checks import invariance_report
    report = invariance_report(n_samples=int(args.samples), seed=int(args.seed))
    worst = 0.0
    for name, defect in report.items():
        print(f"{name:>28}: {defect:.3e}")
        worst = max(worst, defect)
    ok = worst <= 1e-10
    print(f"worst relative defect: {worst:.3e} ({'ok' if ok else 'FAIL'})")
    return 0 if ok else 1


def _cmd_convergence(args) -> int:
    from .convergence import observed_orders, residual_norm_inv2, residual_norm_inv3
    levels = int(args.levels)
    code = 0
    for name, fn, target in (("three-level position scheme", residual_norm_inv3, 1.9),
                             ("two-level mass scheme", residual_norm_inv2, 0.9)):
        norms, orders = observed_orders(fn, levels=levels)
        print(f"{name}:")
        for k, r in enumerate(norms):
            msg = f"  level {k}: residual {r:.6e}"
            if k:
                msg += f"  order {orders[k - 1]:.3f}"
            print(msg)
        if min(orders) < target:
            print(f"  observed order below {target}")
            code = 1
    return code


def _cmd_exact_dilation(args) -> int:
    from .checks import dilation_report
    rep = dilation_report(delta=float(args.delta))
    print(f"delta = {rep['delta']!r}")
    print(f"kappa roots: {rep['kappa_roots']}")
    print(f"mu roots: {rep['mu_roots']}")
    print(f"paired (kappa, mu) = ({rep['kappa']!r}, {rep['mu']!r})")
    print(f"coupling residual: {rep['coupling_residual']:.3e}")
    print(f"max reduced-scheme residual: {rep['max_reduced_residual']:.3e}")
    print(f"step reproduction error: {rep['step_error']:.3e}")
    ok = rep["max_reduced_residual"] <= 1e-10
    print("ok" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_bench(args) -> int:
    from .bench import run_benchmark
    run_benchmark(n_cells=int(args.cells), n_steps=int(args.steps))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="swlag",
        description="Structure-preserving schemes for the shallow water "
                    "equations in Lagrangian mass coordinates")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    _add_run_parser(sub)

    p = sub.add_parser("oracle", help="closed-form piston-problem profiles")
    p.add_argument("--test", default="1", help="1 = rarefaction fan, 2 = shock")
    p.add_argument("--t", default=None, help="sample time")
    p.add_argument("--points", default="200")
    p.add_argument("--u-piston", dest="u_piston", default="-0.5")
    p.add_argument("--rho0", default="1.0")
    p.add_argument("--out", default=None)

    p = sub.add_parser("invariance-check", help="finite symmetry transformations")
    p.add_argument("--samples", default="100")
    p.add_argument("--seed", default="2024")

    p = sub.add_parser("convergence", help="consistency-order study")
    p.add_argument("--levels", default="4")

    p = sub.add_parser("exact-dilation", help="exact solution on the geometric lattice")
    p.add_argument("--delta", default="0.01")

    p = sub.add_parser("bench", help="compare kernel backends")
    p.add_argument("--cells", default="150")
    p.add_argument("--steps", default="400")

    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "oracle": _cmd_oracle,
                "invariance-check": _cmd_invariance,
                "convergence": _cmd_convergence,
                "exact-dilation": _cmd_exact_dilation,
                "bench": _cmd_bench}
    try:
        return handlers[args.command](args)
    except SwlagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
