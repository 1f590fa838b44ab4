"""Structure-preserving finite-difference schemes for the one-dimensional
shallow water equations in Lagrangian mass and potential coordinates."""

__version__ = "0.1.0"

from .errors import (BreakdownError, ConfigError, InvalidConfigError,
                     MeshTanglingError, NonConvergenceError, NumericalBlowupError,
                     OracleDomainError, SingularFluxError, SingularStencilError,
                     SwlagError, VacuumError)
from .mesh import (FLAT_BOTTOM, BottomProfile, MassHistory3, MassMesh, MassState,
                   PotentialHistory, build_geometric_mass_mesh,
                   build_uniform_mass_mesh, init_rest_state, to_eulerian_snapshot)
from .stencil import (Stencil9, flux_Q, residual_bottom_energy,
                      residual_bottom_momentum, residual_inv3, scaled_residual_inv3,
                      stencils_from_layers, transform_linear_to_flat)
from .invariants import (GroupElement, InvariantVector, difference_invariants,
                         equivariance_factor, group_transform,
                         group_transform_solution, invariance_defect,
                         residual_via_invariants)
from .viscosity import ViscosityParams, artificial_viscosity
from .solver import SolveReport, fixed_point_solve
from .stepping import (PistonBC, SchemeConfig, StepResult, WALLS, init_mass_history,
                       startup_layers, step_bottom, step_explicit, step_inv2,
                       step_inv3, step_inv3_general, step_inv3_mass,
                       step_korobitsyn, step_samarskiy_popov, step_yelenin_krylov)
from .exact import (dilation_exact, dilation_lattice, dilation_rho,
                    dilation_velocity, coupling_residual, kappa_residual,
                    mu_constraint_residual, psi_cauchy_residual, psi_cauchy_solve,
                    psi_first_integral, psi_ode_step, rarefaction_oracle,
                    reduced_dilation_residual, shock_state_oracle, solve_kappa,
                    solve_mu, travelling_wave)
from .conservation import (ConservationLedger, run_divergence_identity_suite,
                           IDENTITIES, NOT_CONSERVED_BY_DESIGN)
from .harness import (RunConfig, RunResult, TestProblem, parse_config,
                      piston_velocity, run, test_problem)
from .kernels import BACKEND as KERNEL_BACKEND
