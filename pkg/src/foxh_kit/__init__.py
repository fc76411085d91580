"""foxh-kit: bivariate Fox H-function evaluation, integral/derivative
identities with built-in numerical cross-checks, and performance metrics for
composite fading channels (outage, symbol error probability, generalized MGF),
with Monte-Carlo validation and a CSV/plotting CLI."""

__version__ = "0.1.0"

SCHEMA_VERSION = 1

from .errors import (  # noqa: F401
    ConvergenceError,
    DivergenceError,
    FoxHError,
    ImaginaryResidueError,
    NoSeparatingStripError,
    ParameterError,
    PoleError,
    RangeOverflowError,
    StructuralValidationError,
)
from .fox_h import (  # noqa: F401
    BivariateHDescriptor,
    GammaPair,
    GammaTriple,
    ScaledBivariateH,
    ScaledUnivariateH,
    UnivariateHDescriptor,
    canonical,
    descriptor_from_json,
    descriptor_to_json,
    eval_bivariate,
    eval_univariate,
    validate,
)
from .identities import (  # noqa: F401
    definite_integral,
    derivative_arg,
    derivative_x,
    kernel_integral,
    laplace_transform,
)
from .fading import (  # noqa: F401
    FadingParams,
    Modulation,
    asymptotic_outage,
    asymptotic_sep,
    composite_pdf,
    composite_pdf_descriptor,
    conditional_error,
    db_to_linear,
    derive_constants,
    gen_mgf,
    linear_to_db,
    outage,
    parse_modulation,
    pdf_direct,
    pdf_foxh,
    sep,
)
from .montecarlo import (  # noqa: F401
    MCResult,
    SamplerConfig,
    empirical_outage,
    empirical_sep,
    ks_grid,
    sample_snr,
)
