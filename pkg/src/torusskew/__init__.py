"""Sine-skewed distributions on the d-dimensional torus.

Base densities (von Mises products, sine/cosine bivariate and
multivariate families, bivariate wrapped Cauchy) are perturbed by odd
skewing factors; the package evaluates and samples the resulting models,
computes the Fisher information matrix at the symmetric point, decides
whether it is singular, certifies singular cases by an explicit
line-invariance property of the tilted base density, fits models by
constrained maximum likelihood, and measures how estimation error decays
with sample size on regular versus singular bases.
"""

from .bessel import bessel_i0, log_bessel_i0
from .densities import (
    DEFAULT_GRID_N,
    FAMILIES,
    BaseDensity,
    BivariateWrappedCauchy,
    Cosine,
    MultivariateCosine,
    MultivariateSine,
    NormalizationCache,
    ProductVonMises,
    Sine,
    log_norm_constant,
)
from .descriptors import (
    base_from_dict,
    base_to_dict,
    mechanism_from_value,
    model_from_dict,
    model_to_dict,
    read_model_file,
)
from .errors import (
    AccuracyError,
    ConstraintError,
    DegenerateMatrixError,
    DomainError,
    EnvelopeError,
    InconsistentEvidenceError,
    ResourceError,
    TorusSkewError,
)
from .estimation import (
    FitResult,
    RateRow,
    RateTable,
    fit_mle,
    free_from_lambda,
    lambda_from_free,
    rate_experiment,
    write_rate_csv,
)
from .fisher import (
    FimReport,
    ScoreVector,
    diagnose,
    fim_at_symmetry,
    fim_doubling_change,
    fim_report,
    find_direction_representative,
    pointwise_dependence,
    score_at_symmetry,
)
from .singularity import (
    Certificate,
    NonSingular,
    Singular,
    characterize,
    check_line_invariance,
    kronecker_lattice,
    tilted_log_density,
    verdict_to_json,
)
from .skewing import (
    PowerSkew,
    ProductSkew,
    SineSkew,
    SkewModel,
    Violation,
    expected_sin_cos,
    sample,
    write_samples_csv,
)
from .torus import TWO_PI, TorusGrid, make_grid, rng_stream, wrap, wrapped_distance

__version__ = "0.1.0"

__all__ = [
    "TWO_PI",
    "TorusGrid",
    "make_grid",
    "rng_stream",
    "wrap",
    "wrapped_distance",
    "bessel_i0",
    "log_bessel_i0",
    "DEFAULT_GRID_N",
    "FAMILIES",
    "BaseDensity",
    "ProductVonMises",
    "Sine",
    "Cosine",
    "MultivariateSine",
    "MultivariateCosine",
    "BivariateWrappedCauchy",
    "NormalizationCache",
    "log_norm_constant",
    "SineSkew",
    "ProductSkew",
    "PowerSkew",
    "SkewModel",
    "Violation",
    "sample",
    "expected_sin_cos",
    "write_samples_csv",
    "ScoreVector",
    "FimReport",
    "score_at_symmetry",
    "fim_at_symmetry",
    "fim_doubling_change",
    "fim_report",
    "diagnose",
    "find_direction_representative",
    "pointwise_dependence",
    "Certificate",
    "Singular",
    "NonSingular",
    "characterize",
    "check_line_invariance",
    "kronecker_lattice",
    "tilted_log_density",
    "verdict_to_json",
    "FitResult",
    "RateRow",
    "RateTable",
    "fit_mle",
    "rate_experiment",
    "write_rate_csv",
    "lambda_from_free",
    "free_from_lambda",
    "base_from_dict",
    "base_to_dict",
    "model_from_dict",
    "model_to_dict",
    "mechanism_from_value",
    "read_model_file",
    "TorusSkewError",
    "DomainError",
    "ConstraintError",
    "AccuracyError",
    "ResourceError",
    "EnvelopeError",
    "DegenerateMatrixError",
    "InconsistentEvidenceError",
]
