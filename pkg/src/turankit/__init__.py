"""turankit: weighted Turan-type inequalities for recurrence-defined
orthogonal polynomial families -- evaluation, exact certification, and
empirical sharp-exponent search."""

from .certify import (
    Certificate,
    ThetaEstimate,
    batch_table,
    certify_exact,
    scan_min,
    sharp_theta,
    taylor_slope_check,
)
from .curves import (
    CurveBranches,
    HermiteScheme,
    SymmetricUnitScheme,
    UltrasphericalScheme,
    VertexInfo,
    asymptotic_gap_probe,
    branches,
    hermite_resultant_in_x2,
    hermite_vertex_value,
    nesting_check,
    resultant_exact,
    resultant_symbolic,
    resultant_value,
    vertex,
)
from .exact_algebra import (
    RationalPoly,
    SturmChain,
    deflate_at_one,
    resultant_quadratics,
    sturm_chain,
    sturm_count_roots,
)
from .families import (
    EvalTriple,
    ExplicitList,
    GeneralThreeTerm,
    HermiteMonicHalf,
    MonicSymmetric,
    SymmetricUnit,
    Ultraspherical,
    UltrasphericalRatio,
    eval_triple,
    exact_coefficients,
    hermite_convert,
    ratio_t,
)
from .turan_core import (
    FixedTheta,
    HermiteFactor,
    InfimumRule,
    TuranSample,
    UltrasphericalSharp,
    askey_turan_check,
    audit_quantities,
    identity_residual,
    theta_infimum,
    theta_ultraspherical,
    turan_delta,
    turan_delta_exact,
    universal_bound_check,
)
from .zeros_claims import (
    ZeroSet,
    cd_kernel_positivity,
    isolate_zeros,
    vertex_vs_zeros,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
