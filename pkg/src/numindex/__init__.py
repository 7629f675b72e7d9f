"""Numerical radius, skew-hermitian structure and numerical indices of
finite-dimensional real normed spaces."""

from .spaces import (
    AbsoluteSum,
    DualityPair,
    ESum,
    Gauge2d,
    Lp,
    NonSmoothPoint,
    NumericalDiagnostic,
    SpaceValidationError,
    build_dual,
    dual_norm,
    gauge_distance,
    load_space,
    lp_gauge_table,
    mixture_gauge,
    norm,
    norm_many,
    norming_functional,
    random_gauge2d,
    real_line,
    sample_sphere,
    space_dim,
    space_from_json,
    space_to_json,
)
from .operators import (
    Estimate,
    Operator,
    adjoint,
    load_operator,
    numerical_radius,
    numerical_radius_closed,
    op_norm,
    operator_from_json,
    operator_to_json,
)
from .lie import LieBasis, detect_components, lie_basis, verify_skew
from .quotient import (
    IndexEstimate,
    estimate_index,
    estimate_second_index,
    quotient_norm,
)
from .constructions import (
    ShiftOperator,
    absolute_sum,
    ck_model,
    ck_model_operator,
    esum,
    l1_sum_witness,
    lift_operator,
    shift_bound_check,
    shift_operator,
    sup_sum_witness,
)
from .suite import ClaimResult, SuiteConfig, run_suite

__version__ = "0.1.0"
