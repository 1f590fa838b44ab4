"""Piston test problems, the run loop, configuration and CSV emission.

Four test problems drive the comparison study, all starting from a fluid
column of height 1 at rest:

  1  left piston withdraws at constant speed (default -0.5), right wall;
  2  left piston compresses at +0.5, right wall;
  3  left piston at 0.8, sin^2-ramped to 1.6 over t in [0.25, 0.5], wall;
  4  two pistons compress at +0.5 / -0.5 (total mass 4).

Defaults: h_s = 0.02, tau = 0.025 h_s, snapshot at t = 0.55 / 0.6 / 0.74 /
1.0 respectively.  Runs are deterministic; re-running a config reproduces
byte-identical CSVs.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import conservation as cons
from .errors import (ConfigError, InvalidConfigError, MeshTanglingError,
                     NonConvergenceError, NumericalBlowupError)
from .mesh import (MassMesh, MassState, PotentialHistory, build_uniform_mass_mesh,
                   init_rest_state, to_eulerian_snapshot)
from .stepping import (DEFAULT_KAPPA, DEFAULT_NU, SCHEME_IDS, PistonBC, SchemeConfig,
                       StepResult, step_bottom, step_explicit, step_inv2, step_inv3,
                       step_korobitsyn, step_samarskiy_popov, step_yelenin_krylov)
from .mesh import FLAT_BOTTOM

TEST_IDS = (1, 2, 3, 4)
SNAPSHOT_DEFAULTS = {1: 0.55, 2: 0.6, 3: 0.74, 4: 1.0}
TOTAL_MASS = {1: 3.0, 2: 3.0, 3: 3.0, 4: 4.0}

# piston law of test 3
T3_U0, T3_U1, T3_T1, T3_T2 = 0.8, 1.6, 0.25, 0.5


def piston_velocity(test_id: int, t: float, side: str = "left",
                    u_withdraw: float = -0.5) -> float:
    """Prescribed piston speed of a test problem at time t."""
    if test_id == 1:
        return u_withdraw if side == "left" else 0.0
    if test_id == 2:
        return 0.5 if side == "left" else 0.0
    if test_id == 3:
        if side != "left":
            return 0.0
        if t <= T3_T1:
            return T3_U0
        if t >= T3_T2:
            return T3_U1
        s = math.sin(0.5 * math.pi * (t - T3_T1) / (T3_T2 - T3_T1))
        return T3_U0 + (T3_U1 - T3_U0) * s * s
    if test_id == 4:
        return 0.5 if side == "left" else -0.5
    raise InvalidConfigError(f"unknown test id {test_id}")


@dataclass(frozen=True)
class TestProblem:
    test_id: int
    total_mass: float
    t_end: float
    right_wall: bool
    u_withdraw: float = -0.5

    def bc(self) -> PistonBC:
        left = lambda t: piston_velocity(self.test_id, t, "left", self.u_withdraw)
        right = None if self.right_wall else \
            (lambda t: piston_velocity(self.test_id, t, "right", self.u_withdraw))
        return PistonBC(left=left, right=right)


def test_problem(test_id: int, u_withdraw: float = -0.5,
                 t_end: float | None = None) -> TestProblem:
    if test_id not in TEST_IDS:
        raise InvalidConfigError(f"unknown test id {test_id}")
    return TestProblem(test_id=test_id, total_mass=TOTAL_MASS[test_id],
                       t_end=SNAPSHOT_DEFAULTS[test_id] if t_end is None else t_end,
                       right_wall=test_id != 4, u_withdraw=u_withdraw)


@dataclass(frozen=True)
class RunConfig:
    test_id: int = 2
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    h_s: float = 0.02
    tau_ratio: float = 0.025
    t_end: float | None = None
    rho0: float = 1.0
    u_withdraw: float = -0.5
    out_dir: str | None = None
    snapshot_times: tuple[float, ...] | None = None

    def problem(self) -> TestProblem:
        return test_problem(self.test_id, self.u_withdraw, self.t_end)

    def mesh(self) -> MassMesh:
        prob = self.problem()
        n_cells = int(round(prob.total_mass / self.h_s))
        return build_uniform_mass_mesh(n_cells, self.h_s, self.tau_ratio * self.h_s)


@dataclass
class RunResult:
    completed: bool
    n_steps: int
    ledger: cons.ConservationLedger | None
    snapshot_paths: list[str]
    out_dir: str | None
    error: str | None = None
    failed_laws: list[str] = field(default_factory=list)
    solve_log: list[tuple[int, float, int, float]] = field(default_factory=list)

    @property
    def conservation_ok(self) -> bool:
        return not self.failed_laws


# laws asserted (exit-code relevant) per scheme; energy joins the set when a
# run carries no artificial dissipation.
ASSERTED_LAWS = {
    "inv2": ("mass", "momentum", "center_of_mass"),
    "explicit": ("mass", "momentum", "center_of_mass"),
    "sampop": ("mass", "momentum"),
    "yelenin": ("mass", "momentum", "energy"),
    "korobitsyn": ("mass", "momentum", "energy"),
    "inv3": ("mass", "momentum", "center_of_mass", "energy"),
    "inv3_viscous": ("mass", "momentum", "center_of_mass"),
    "inv_bottom_energy": ("mass",),
    "inv_bottom_momentum": ("mass",),
}


def asserted_laws(cfg: SchemeConfig) -> tuple[str, ...]:
    laws = ASSERTED_LAWS[cfg.scheme_id]
    if cfg.scheme_id == "inv2" and cfg.nu == 0.0 and cfg.kappa_visc == 0.0:
        laws = laws + ("energy",)
    return laws


def assertion_bound(cfg: SchemeConfig, n_steps: int) -> float:
    eps = cfg.eps_iter if cfg.scheme_id not in ("explicit", "korobitsyn") else 1e-15
    return max(1e-9, 10.0 * eps * max(1, n_steps))


def _fmt(v: float) -> str:
    return repr(float(v))


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_snapshot(path: str, t: float, mesh: MassMesh, obj, step: int) -> None:
    rows = to_eulerian_snapshot(obj, mesh, step=step)
    s = mesh.s_nodes[:-1]
    data = [(t, s[i], rows[i, 0], rows[i, 1], rows[i, 2], rows[i, 3])
            for i in range(rows.shape[0])]
    _write_csv(path, "t,s,x,u,rho,p", data)


def _warn_wall_proximity(state_rows: np.ndarray, rho0: float, warned: list) -> None:
    if warned:
        return
    tail_u = state_rows[-5:, 1]
    tail_rho = state_rows[-5:, 2]
    if np.any(np.abs(tail_u) > 1e-8) or np.any(np.abs(tail_rho - rho0) > 1e-6):
        warnings.warn("disturbance reached within 5 cells of the right wall",
                      stacklevel=3)
        warned.append(True)


def run(config: RunConfig) -> RunResult:
    """Advance the configured scheme from rest and emit the run artifacts."""
    prob = config.problem()
    mesh = config.mesh()
    bc = prob.bc()
    cfg = config.scheme
    tau = mesh.tau
    n_steps = int(round(prob.t_end / tau)) if prob.t_end > 0 else 0
    snap_times = config.snapshot_times if config.snapshot_times is not None \
        else (prob.t_end,)
    snap_steps = {}
    for ts in snap_times:
        snap_steps.setdefault(int(round(ts / tau)), ts)

    out_dir = config.out_dir
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _echo_config(os.path.join(out_dir, "config_echo.txt"), config, mesh, n_steps)

    hist, state = init_rest_state(mesh, config.rho0)
    potential = cfg.scheme_id in ("inv3", "inv3_viscous", "inv_bottom_energy",
                                  "inv_bottom_momentum")
    if potential:
        x_fwd = hist.x_next.copy()
        x_fwd[0] += tau * bc.velocity("left", 0.5 * tau)
        x_fwd[-1] += tau * bc.velocity("right", 0.5 * tau)
        hist = PotentialHistory(layers=(hist.x_prev, hist.x_curr, x_fwd), t=0.0)
        ledger = cons.ConservationLedger(cons.inv3_totals(hist, mesh))
        current = hist
    else:
        ledger = cons.ConservationLedger(
            cons.inv2_totals(state, mesh) if cfg.scheme_id == "inv2"
            else cons.forward_scheme_totals(state, mesh, cfg.scheme_id))
        current = state

    snapshots: list[str] = []
    solve_log: list[tuple[int, float, int, float]] = []
    warned_wall: list = []
    error = None
    completed = True
    vp = cfg.viscosity()

    def take_snapshot(step, t_snap, obj):
        if out_dir is None:
            return
        path = os.path.join(out_dir, f"snapshot_t{t_snap:.6g}.csv")
        _write_snapshot(path, t_snap, mesh, obj, step)
        snapshots.append(path)
        if prob.right_wall:
            _warn_wall_proximity(to_eulerian_snapshot(obj, mesh), config.rho0,
                                 warned_wall)

    if 0 in snap_steps:
        take_snapshot(0, snap_steps[0], current)

    step = 0
    try:
        for step in range(1, n_steps + 1):
            if cfg.scheme_id == "inv2":
                res = step_inv2(current, bc, cfg, mesh)
                totals = cons.inv2_totals(res.state, mesh)
                incr = cons.inv2_increments(current, res.state,
                                            res.fluxes["momentum"], mesh)
            elif cfg.scheme_id == "explicit":
                res = step_explicit(current, bc, vp, mesh)
                totals = cons.forward_scheme_totals(res.state, mesh, cfg.scheme_id)
                incr = cons.forward_scheme_increments(current, res.state,
                                                      res.fluxes["momentum"], mesh,
                                                      cfg.scheme_id)
            elif cfg.scheme_id == "sampop":
                res = step_samarskiy_popov(current, bc, cfg, vp, mesh)
                totals = cons.forward_scheme_totals(res.state, mesh, cfg.scheme_id)
                incr = cons.forward_scheme_increments(current, res.state,
                                                      res.fluxes["momentum"], mesh,
                                                      cfg.scheme_id)
            elif cfg.scheme_id == "yelenin":
                res = step_yelenin_krylov(current, bc, cfg, mesh)
                totals = cons.forward_scheme_totals(res.state, mesh, cfg.scheme_id)
                incr = cons.forward_scheme_increments(current, res.state,
                                                      res.fluxes["momentum"], mesh,
                                                      cfg.scheme_id)
            elif cfg.scheme_id == "korobitsyn":
                res = step_korobitsyn(current, bc, vp, cfg.q_korob, mesh)
                totals = cons.forward_scheme_totals(res.state, mesh, cfg.scheme_id)
                incr = cons.forward_scheme_increments(current, res.state,
                                                      res.fluxes["momentum"], mesh,
                                                      cfg.scheme_id)
            elif cfg.scheme_id in ("inv_bottom_energy", "inv_bottom_momentum"):
                res = step_bottom(current, bc, cfg, mesh, FLAT_BOTTOM)
                totals = cons.inv3_totals(res.state, mesh)
                incr = {}
            else:  # inv3 / inv3_viscous
                res = step_inv3(current, bc, cfg, mesh)
                totals = cons.inv3_totals(res.state, mesh)
                incr = cons.inv3_increments(res.state, mesh, res.fluxes["momentum"])
            current = res.state
            t_now = step * tau
            ledger.update(t_now, totals, incr)
            if res.report is not None:
                solve_log.append((step, t_now, res.report.iterations,
                                  res.report.final_defect))
            if step in snap_steps:
                take_snapshot(step, snap_steps[step], current)
    except (MeshTanglingError, NonConvergenceError, NumericalBlowupError) as exc:
        completed = False
        error = f"step {step}: {exc}"
        if out_dir is not None:
            t_abort = (step - 1) * tau
            try:
                path = os.path.join(out_dir, f"snapshot_abort_t{t_abort:.6g}.csv")
                _write_snapshot(path, t_abort, mesh, current, step - 1)
                snapshots.append(path)
            except MeshTanglingError:
                pass

    if out_dir is not None:
        _write_csv(os.path.join(out_dir, "conservation.csv"),
                   "t,mass_defect,momentum_defect,energy_defect,com_defect",
                   [(t, d["mass"], d["momentum"], d["energy"], d["center_of_mass"])
                    for t, d in ledger.history])
        _write_csv(os.path.join(out_dir, "solve_log.csv"),
                   "step,t,iterations,defect",
                   [(s, t, it, d) for s, t, it, d in solve_log])

    failed = []
    if completed and n_steps > 0:
        bound = assertion_bound(cfg, n_steps)
        for law in asserted_laws(cfg):
            if ledger.defect_rel(law) > bound:
                failed.append(law)
    return RunResult(completed=completed, n_steps=n_steps, ledger=ledger,
                     snapshot_paths=snapshots, out_dir=out_dir, error=error,
                     failed_laws=failed, solve_log=solve_log)


# ---------------------------------------------------------------------------
# configuration files and flag overrides
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "scheme": str, "test": int, "hs": float, "tau_ratio": float, "nu": float,
    "kappa_visc": float, "mu_visc": float, "eps": float, "t_end": float,
    "out": str, "q_korob": float, "u_piston": float, "max_iter": int,
    "rho0": float,
}


def _read_config_file(path: str) -> dict:
    values = {}
    unknown = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _CONFIG_KEYS:
                unknown.append(key)
                continue
            try:
                values[key] = _CONFIG_KEYS[key](val)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {val!r}")
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return values


def parse_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge a flat key=value file with explicit flag overrides.

    Flags win over the file; scheme-dependent viscosity defaults fill the
    rest.  The Yelenin-Krylov scheme runs without artificial viscosity, so
    explicitly requesting a nonzero coefficient for it is a contradiction.
    """
    values = _read_config_file(path) if path else {}
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown option: {key}")
        values[key] = _CONFIG_KEYS[key](val)

    scheme_id = values.get("scheme", "inv2")
    if scheme_id not in SCHEME_IDS:
        raise ConfigError(f"unknown scheme {scheme_id!r}; choose one of {SCHEME_IDS}")
    explicit_nu = "nu" in values
    explicit_kappa = "kappa_visc" in values
    if scheme_id == "yelenin":
        if (explicit_nu and values["nu"] != 0.0) or \
                (explicit_kappa and values["kappa_visc"] != 0.0):
            raise ConfigError("the Yelenin-Krylov scheme runs without artificial "
                              "viscosity; nu/kappa_visc must stay 0")
        nu, kappa = 0.0, 0.0
    else:
        nu = values.get("nu", DEFAULT_NU.get(scheme_id, 0.001))
        kappa = values.get("kappa_visc", DEFAULT_KAPPA)
    scheme = SchemeConfig(scheme_id=scheme_id, nu=nu, kappa_visc=kappa,
                          mu_visc=values.get("mu_visc", 0.0),
                          eps_iter=values.get("eps", 1e-3),
                          max_iter=values.get("max_iter", 200),
                          q_korob=values.get("q_korob", 1.0))
    return RunConfig(test_id=values.get("test", 2), scheme=scheme,
                     h_s=values.get("hs", 0.02),
                     tau_ratio=values.get("tau_ratio", 0.025),
                     t_end=values.get("t_end"),
                     rho0=values.get("rho0", 1.0),
                     u_withdraw=values.get("u_piston", -0.5),
                     out_dir=values.get("out"))


def _echo_config(path: str, config: RunConfig, mesh: MassMesh, n_steps: int) -> None:
    cfg = config.scheme
    lines = [
        f"scheme = {cfg.scheme_id}",
        f"test = {config.test_id}",
        f"hs = {_fmt(config.h_s)}",
        f"tau_ratio = {_fmt(config.tau_ratio)}",
        f"nu = {_fmt(cfg.nu)}",
        f"kappa_visc = {_fmt(cfg.kappa_visc)}",
        f"mu_visc = {_fmt(cfg.mu_visc)}",
        f"eps = {_fmt(cfg.eps_iter)}",
        f"max_iter = {cfg.max_iter}",
        f"q_korob = {_fmt(cfg.q_korob)}",
        f"t_end = {_fmt(config.problem().t_end)}",
        f"rho0 = {_fmt(config.rho0)}",
        f"u_piston = {_fmt(config.u_withdraw)}",
        f"n_cells = {mesh.n_cells}",
        f"tau = {_fmt(mesh.tau)}",
        f"n_steps = {n_steps}",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
