"""Meshes, field layers and rest-state initialization.

All schemes live on a lattice in the mass coordinate s: cell m carries the
fluid between nodes s_m and s_{m+1}, so the cell width h_s is a mass.  Node
positions x, node velocities u and cell quantities (rho = column height,
p = rho^2) are indexed by the cell's *left* node throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfigError, MeshTanglingError


@dataclass(frozen=True)
class MassMesh:
    """Lattice in the mass coordinate s and a fixed time step tau.

    kind is "uniform" (s_{m+1} - s_m = h_s) or "geometric"
    (s_{m+1} = kappa^3 s_m, used only by the exact-solution checks).
    """

    s_nodes: np.ndarray
    h_s: float
    tau: float
    kind: str = "uniform"
    kappa: float = 1.0

    @property
    def n_cells(self) -> int:
        return len(self.s_nodes) - 1

    @property
    def total_mass(self) -> float:
        return float(self.s_nodes[-1] - self.s_nodes[0])


def build_uniform_mass_mesh(n_cells: int, h_s: float, tau: float, s0: float = 0.0) -> MassMesh:
    if n_cells < 3:
        raise InvalidConfigError(f"need at least 3 cells, got {n_cells}")
    if h_s <= 0.0 or tau <= 0.0:
        raise InvalidConfigError(f"steps must be positive: h_s={h_s}, tau={tau}")
    s = s0 + h_s * np.arange(n_cells + 1, dtype=float)
    return MassMesh(s_nodes=s, h_s=float(h_s), tau=float(tau), kind="uniform")


def build_geometric_mass_mesh(n_cells: int, kappa: float, s0: float, tau: float = 1.0) -> MassMesh:
    """Lattice with s_{m+1} = kappa^3 s_m; all nodes keep the sign of s0."""
    if n_cells < 3:
        raise InvalidConfigError(f"need at least 3 cells, got {n_cells}")
    if kappa <= 0.0 or kappa == 1.0 or s0 <= 0.0:
        raise InvalidConfigError(f"geometric mesh needs kappa > 0, kappa != 1, s0 > 0")
    s = s0 * (kappa ** (3.0 * np.arange(n_cells + 1, dtype=float)))
    return MassMesh(s_nodes=s, h_s=float("nan"), tau=tau, kind="geometric", kappa=float(kappa))


@dataclass(frozen=True)
class PotentialHistory:
    """Three consecutive layers of node positions for the position schemes.

    layers = (x at t_{n-1}, x at t_n, x at t_{n+1}); t is the middle time.
    """

    layers: tuple[np.ndarray, np.ndarray, np.ndarray]
    t: float

    @property
    def x_prev(self) -> np.ndarray:
        return self.layers[0]

    @property
    def x_curr(self) -> np.ndarray:
        return self.layers[1]

    @property
    def x_next(self) -> np.ndarray:
        return self.layers[2]

    def require_monotone(self, step: int | None = None) -> None:
        for x in self.layers:
            if np.any(np.diff(x) <= 0.0):
                raise MeshTanglingError("node positions are not strictly increasing", step=step)


@dataclass(frozen=True)
class MassState:
    """One time layer of the mass-coordinate fields.

    u and x live at the M+1 nodes, rho and p at the M cells.  eps and P are
    optional per-cell tracks used by the Samarskiy-Popov / Korobitsyn energy
    accounting and by the Yelenin-Krylov pressure-like variable.
    """

    x: np.ndarray
    u: np.ndarray
    rho: np.ndarray
    p: np.ndarray
    t: float
    eps: np.ndarray | None = None
    P: np.ndarray | None = None

    def __post_init__(self):
        if np.any(self.rho <= 0.0):
            raise MeshTanglingError("non-positive column height rho")
        if np.any(self.p <= 0.0):
            raise MeshTanglingError("non-positive pressure p")


@dataclass(frozen=True)
class MassHistory3:
    """State of the three-level mass scheme.

    rho_prev is the layer-(n-1) height, rho the layer-n height, u_prev the
    forward-difference velocity over [t_{n-1}, t_n].  x holds the layer-n
    node positions (x_n = x_{n-1} + tau * u_prev).
    """

    rho_prev: np.ndarray
    rho: np.ndarray
    u_prev: np.ndarray
    x: np.ndarray
    t: float


@dataclass(frozen=True)
class BottomProfile:
    """Bottom elevation H(x); flat by default, or linear C1*x + C2."""

    kind: str = "flat"
    c1: float = 0.0
    c2: float = 0.0
    height: object = None     # callable H(x) for kind="tabulated"
    slope: object = None      # callable H'(x) for kind="tabulated"

    def H(self, x):
        if self.kind == "flat":
            return np.zeros_like(np.asarray(x, dtype=float))
        if self.kind == "linear":
            return self.c1 * np.asarray(x, dtype=float) + self.c2
        return self.height(x)

    def dH(self, x):
        if self.kind == "flat":
            return np.zeros_like(np.asarray(x, dtype=float))
        if self.kind == "linear":
            return np.full_like(np.asarray(x, dtype=float), self.c1)
        return self.slope(x)


FLAT_BOTTOM = BottomProfile()


def init_rest_state(mesh: MassMesh, rho0: float, x_left: float = 0.0,
                    ) -> tuple[PotentialHistory, MassState]:
    """Fluid column of uniform height rho0 at rest; x = x_left + (s - s_0)/rho0."""
    if rho0 <= 0.0:
        raise InvalidConfigError(f"rho0 must be positive, got {rho0}")
    x = x_left + (mesh.s_nodes - mesh.s_nodes[0]) / rho0
    hist = PotentialHistory(layers=(x.copy(), x.copy(), x.copy()), t=0.0)
    m = mesh.n_cells
    state = MassState(
        x=x.copy(),
        u=np.zeros(m + 1),
        rho=np.full(m, float(rho0)),
        p=np.full(m, float(rho0) ** 2),
        t=0.0,
    )
    return hist, state


def to_eulerian_snapshot(obj, mesh: MassMesh, step: int | None = None) -> np.ndarray:
    """Per-cell rows (x, u, rho, p) at the cell's left node.

    For a PotentialHistory, u is the backward time difference
    (x_n - x_{n-1})/tau and rho the forward mass stretch h_s/(x_{m+1}-x_m)
    of the middle layer; p = rho^2.
    """
    if isinstance(obj, PotentialHistory):
        x = obj.x_curr
        if np.any(np.diff(x) <= 0.0):
            raise MeshTanglingError("snapshot on tangled mesh", step=step)
        u = (obj.x_curr - obj.x_prev) / mesh.tau
        h = np.diff(mesh.s_nodes)
        rho = h / np.diff(x)
        p = rho ** 2
        return np.column_stack([x[:-1], u[:-1], rho, p])
    if isinstance(obj, MassState):
        if np.any(np.diff(obj.x) <= 0.0):
            raise MeshTanglingError("snapshot on tangled mesh", step=step)
        return np.column_stack([obj.x[:-1], obj.u[:-1], obj.rho, obj.p])
    raise TypeError(f"cannot snapshot {type(obj).__name__}")
