"""Numerical verification of inequalities for matrix means of positive definite matrices."""

from .errors import MatMeansError
from .linalg import (
    EigenDecomposition,
    SpdMatrix,
    complex_power,
    condition_number,
    congruence,
    hermitian_eigen,
    matrix_function,
    real_power,
    spd,
)
from .means import (
    MeanParams,
    geometric_mean,
    geometric_mean_t,
    heinz_products,
    heron_kubo_ando,
    heron_naive,
    power_mean,
    power_mean_closed,
    power_mean_fixed_point,
    q_mean,
    sharp,
)
from .sampler import (
    SamplerConfig,
    Structure,
    random_commuting_pair,
    random_furuta_pair,
    random_spd,
)
from .spectral import (
    MajorizationKind,
    MajorizationReport,
    Verdict,
    compound,
    log_det,
    log_majorization,
    schatten_norm,
    singular_values,
    trace_product,
)
from .verifier import CheckResult, TrialSpec

__version__ = "0.1.0"
