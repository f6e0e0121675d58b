"""Structure-preserving finite differences for wave maps into the unit sphere.

The sphere-valued wave equation is integrated through its angular-momentum
form ``d_t = d x w``, ``w_t = lap d x d`` with an implicit midpoint rule.
The discretization conserves the discrete energy and keeps every director
on the sphere to rounding; each step is solved by a contractive
fixed-point iteration whose director subproblem has a closed-form
per-node rotation.
"""

from .analytic import (DAlembertCoeffs, ErrorTracker, analytic_state, error_d,
                       error_energy, error_w, theta, theta_gradient, theta_t)
from .fixedpoint import (NumericalBlowupError, SolverState, StepReport,
                         fixed_point_step, residual)
from .grid import (BoundaryRule, Grid, ScalarField, VectorField, backward_diff,
                   divergence, forward_diff, gradient, inner_product, l2_norm,
                   laplacian)
from .integrator import (ConvergenceFailure, Diagnostics, energy, grad_max,
                         initialize, kinetic_energy, run, state_norms)
from .rotation import RotationParams, apply_rotation, cross3, q_matrix, v_matrix
from .scenario import (BlowupCase, CaseResult, ErrorTable, ScenarioConfig,
                       build_blowup_initial, build_dalembert_initial,
                       default_wave_coeffs, make_initial_state, run_blowup,
                       run_blowup_case, run_convergence_case,
                       run_convergence_suite, steepest_growth_time,
                       tolerance_for)

__version__ = "0.1.0"
