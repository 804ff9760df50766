"""Exception types shared across the package.

The CLI maps these onto exit codes: domain errors (bad parameters, bad
input files) exit 1, accuracy/resource errors exit 2.
"""

__all__ = [
    "TorusSkewError",
    "DomainError",
    "ConstraintError",
    "AccuracyError",
    "ResourceError",
    "EnvelopeError",
    "DegenerateMatrixError",
    "InconsistentEvidenceError",
]


class TorusSkewError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TorusSkewError):
    """Invalid input: non-finite angles, malformed descriptors, bad arguments."""


class ConstraintError(DomainError):
    """A skewness-parameter constraint is violated.

    Carries the individual violations (objects with a readable ``str``) in
    ``self.violations``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class AccuracyError(TorusSkewError):
    """A quadrature result failed its convergence check."""


class ResourceError(TorusSkewError):
    """A requested grid exceeds the configured node budget."""


class EnvelopeError(TorusSkewError):
    """Rejection sampling envelope failed (acceptance rate collapsed or the
    grid-estimated density bound was exceeded)."""

    def __init__(self, message, max_density_estimate=None):
        self.max_density_estimate = max_density_estimate
        super().__init__(message)


class DegenerateMatrixError(TorusSkewError):
    """A matrix expected to be nonzero PSD has no positive eigenvalue."""


class InconsistentEvidenceError(TorusSkewError):
    """The information matrix is rank deficient but no valid line-invariance
    certificate could be produced.

    This signals either a quadrature artifact or a null space that admits no
    representative with all nonzero direction components. It is a result, not
    a failure: the CLI reports it as the verdict "inconsistent" with exit 0.
    """

    def __init__(self, null_space_dim, best_alpha, deviation, message=None):
        self.null_space_dim = int(null_space_dim)
        self.best_alpha = None if best_alpha is None else list(best_alpha)
        self.deviation = None if deviation is None else float(deviation)
        super().__init__(
            message
            or f"rank-deficient information matrix without certificate "
            f"(null space dim {null_space_dim}, best deviation {deviation})"
        )
