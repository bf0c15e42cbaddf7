"""polylab: numerics for random polytopes spanned by heavy-tailed matrices.

The library implements the objects behind the inclusion
K_N = Gamma* B_1^N  ⊇  const * (B_inf^n ∩ sqrt(ln(N/n)) B_2^n)
for matrices with independent symmetric unit-variance entries under a
small-ball condition, together with the covering, singular-value, volume and
mean-width machinery used to test it empirically.
"""

from .ensembles import (Ensemble, SmallBallConstants, concentration_fn,
                        make_ensemble, parse_ensemble, sample_entries,
                        sample_matrix, small_ball_constants)
from .errors import DomainError, NumericalError, SizeError
from .experiments import ExperimentConfig, TrialReport
from .linalg import (decreasing_rearrangement, hs_norm, operator_norm,
                     singular_values, smallest_singular_value)
from .nets import (DyadicDiagonal, NetBundle, TSpec, build_net, cardinality_F,
                   compute_D_gamma, cover_ball_inf, cover_sparse_sphere,
                   enumerate_Q, validate_net)
from .norms import (IntersectionBody, PartitionCertificate, h_L, k_norm,
                    mixed_norm_kkr, ms_block_partition, ms_norm_brute,
                    ms_norm_heuristic, sample_boundary_L_polar,
                    support_cube_cap)
from .polytope import (GeometryEstimate, Polytope, ball_volume,
                       check_conditions, gauge_KN, inclusion_check,
                       mean_width_M, mean_width_polar, member_KN,
                       quotient_check, santalo_check, support_KN,
                       volume_exact_2d, volume_mc)
from .simplex import LpProblem, LpSolution, l1_min, lp_solve

__version__ = "0.1.0"
