"""Numerical engine for twisted Verlinde-type index formulas.

Evaluates the fixed-point sum for the graded index of twisted differentials
on moduli of principal bundles, tracks the fixed points from t = 0 toward
t = -1, reconstructs the index polynomial in t, and verifies its divisibility
by (1+t)^{(g-1)*rank} at desk scale.
"""

from .errors import (ConfigError, FitFailureError, NoConvergenceError,
                     NumericalError, PathFailureError, SingularEvaluationError,
                     TheoremViolationError, UnsupportedGroupError, VvindexError)
from .fixed_points import (FixedPointPath, FixedPointSet, TrackControls,
                           count_solutions, enumerate_t0, hessian_matrix,
                           log_chi, make_schedule, newton_correct, track_path,
                           track_set)
from .gamma_calc import (KPolynomial, check_equivalence_ii_iii,
                         gamma_from_lambda, lambda_from_gamma,
                         vanishing_order_at_minus1)
from .index_engine import (HessianForm, IndexResult, IndexTask, OddInsertion,
                           chebyshev_nodes, dilog, fit_polynomial, flag_rhs_sum,
                           hessian, master_potential, odd_cofactor, rhs_sum,
                           theta_inverse, vanishing_check, verlinde_su2)
from .jets import Jet
from .lie_core import (Representation, RootSystemData, TorusPoint, adjoint_rep,
                       build_root_system, canonicalize, character_jets,
                       dominant_weights_at_level, flag_poincare,
                       highest_weight_rep, orbit_representatives, regularity,
                       trivial_rep)
from .limit_analysis import (SingularLimit, centralizer, fit_expansion,
                             limit_theta, solve_at_minus1,
                             verify_vanishing_mechanism, xi1_solve)
from .precision import Precision, resolve_precision

__version__ = "0.1.0"
