"""Shintani L-functions of several variables: evaluation and verification."""

from .core import (
    EvalResult,
    ParityType,
    Region,
    ShintaniDatum,
    SignVector,
    SpectralPoint,
    F_prod,
    G_prod,
    e_of,
    gamma_C,
    gamma_R,
    gamma_chi,
    phi,
    reduce_torus,
)
from .errors import (
    CapExceeded,
    DomainError,
    GammaPole,
    NonPositiveMatrix,
    OutsideRegion,
    ParityMismatch,
    PoleClearanceError,
    PrefactorPole,
    QuadratureFailure,
    RegionError,
    ShintaniError,
    SingularMatrix,
    TruncationFailure,
    ZeroMatrix,
)
from .lfunction import (
    LConfig,
    LRequest,
    Method,
    Variant,
    L_completed,
    L_normalized,
    L_ordinary,
    R_family,
    continue_L,
    derivative_check,
    evaluate,
    fe_check,
)
from .quadrature import (
    QuadConfig,
    contour_L,
    fourier_F,
    integral_L,
)
from .series import (
    SeriesConfig,
    bilateral_r1,
    dirichlet_L,
    lerch_sum,
)
from .taylor import (
    MultiIndex,
    TruncatedSeries,
    bernoulli_B,
    special_value_neg,
    special_value_pos,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "DomainError",
    "EvalResult",
    "F_prod",
    "G_prod",
    "GammaPole",
    "LConfig",
    "LRequest",
    "L_completed",
    "L_normalized",
    "L_ordinary",
    "Method",
    "MultiIndex",
    "NonPositiveMatrix",
    "OutsideRegion",
    "ParityMismatch",
    "ParityType",
    "PoleClearanceError",
    "PrefactorPole",
    "QuadConfig",
    "QuadratureFailure",
    "R_family",
    "Region",
    "RegionError",
    "SeriesConfig",
    "ShintaniDatum",
    "ShintaniError",
    "SignVector",
    "SingularMatrix",
    "SpectralPoint",
    "TruncatedSeries",
    "TruncationFailure",
    "Variant",
    "ZeroMatrix",
    "bernoulli_B",
    "bilateral_r1",
    "continue_L",
    "contour_L",
    "derivative_check",
    "dirichlet_L",
    "e_of",
    "evaluate",
    "fe_check",
    "fourier_F",
    "gamma_C",
    "gamma_R",
    "gamma_chi",
    "integral_L",
    "lerch_sum",
    "phi",
    "reduce_torus",
    "special_value_neg",
    "special_value_pos",
]
