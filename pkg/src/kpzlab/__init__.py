"""kpzlab: a desk-scale numerical laboratory for nearest-neighbor walks
in weak random media, their directed-polymer time reversal, and the
stochastic-heat-equation limit of their rescaled transition
probabilities, with exact enumeration oracles and contour-integral
moment formulas throughout.
"""

from .scaling import LatticePoint, ScalingFrame, SnappedPoint, affine_map, snap
from .ssrw import (
    LdpQuery,
    heat_kernel,
    ldp_limit,
    rate_pair,
    rescaled_ssrw,
    speed_divergence,
    ssrw_log_prob,
    uniform_bound_fit,
)
from .environment import (
    Environment,
    EnvironmentSpec,
    null_spec,
    omega_stats,
    sample_environment,
)
from .rwre import (
    LogProbRow,
    evolve_rwre,
    polymer_evolve,
    rescaled_polymer,
    rescaled_rwre,
    rescaled_rwre_batch,
    time_reversal_law_check,
)
from .chaos import (
    ChaosTerm,
    PolyExpansion,
    chaos_coefficient,
    chaos_coefficient_limit,
    chaos_identity_residual,
    chaos_poly_dp,
    chaos_terms,
    rescaled_chaos_coefficient,
)
from .she import (
    FieldGrid,
    heat_solution,
    she_point_samples,
    she_second_moment_quadrature,
    she_second_moment_series,
    she_solve,
)
from .moments import (
    CircleContour,
    MomentResult,
    VerticalContour,
    beta_moment_closed_form_k1,
    beta_moment_contour,
    beta_moment_oracle,
    critical_point,
    moment_convergence_table,
    she_moment_closed_form_k1,
    she_moment_contour,
    taylor_check,
)

__version__ = "0.1.0"
