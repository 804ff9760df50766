"""Line-invariance characterization of information singularity.

A rank-deficient information matrix at the symmetric model corresponds to
an exact pointwise dependence among score components, encoded by a null
vector (alpha, beta) with every alpha_i nonzero.  Writing gamma_i =
beta_i / alpha_i, the dependence holds exactly when the tilted density

    h0(theta) = f0(theta) * exp(sum_i gamma_i cos(theta_i))

is constant along every line theta + t * alpha.  `characterize` runs the
full pipeline: information matrix -> rank diagnosis -> null-space
representative -> tilt extraction -> line-invariance scan, and returns a
Singular verdict carrying the certificate, a NonSingular verdict carrying
the smallest eigenvalue, or raises InconsistentEvidenceError when the
numerical evidence does not cohere (a result the CLI reports, not a
crash).

The invariance scan samples offsets t covering one full period of the
slowest coordinate plus golden-ratio multiples (to defeat accidental
period coincidences: a sine-model line wraps around exactly at one full
period, so scanning only full periods would falsely pass), evaluated from
a low-discrepancy lattice of base points for reproducibility.
"""

import math
from dataclasses import dataclass

import numpy as np

from .densities import DEFAULT_GRID_N, BaseDensity
from .errors import DomainError, InconsistentEvidenceError
from .fisher import (
    DEFAULT_TOL_REL,
    MIN_COMPONENT_REL,
    find_direction_representative,
    fim_report,
    pointwise_dependence,
)
from .torus import TWO_PI, wrap

__all__ = [
    "Certificate",
    "Singular",
    "NonSingular",
    "tilted_log_density",
    "check_line_invariance",
    "kronecker_lattice",
    "characterize",
    "verdict_to_json",
]

DEFAULT_INVARIANCE_TOL = 1e-6
MIN_CHARACTERIZE_GRID_N = 64
DEFAULT_T_SAMPLES = 48
DEFAULT_THETA_SAMPLES = 512
MIN_T_SAMPLES = 16
MIN_THETA_SAMPLES = 256
POINTWISE_CERT_TOL = 1e-5
_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class Certificate:
    """A verified line-invariance certificate (direction and tilt)."""

    alpha: np.ndarray
    gamma: np.ndarray
    max_invariance_deviation: float
    t_samples: int
    theta_samples: int


@dataclass(frozen=True)
class Singular:
    """Rank-deficient information matrix with a verified certificate."""

    certificate: Certificate
    null_vector: np.ndarray
    grid_N: int


@dataclass(frozen=True)
class NonSingular:
    """Full-rank information matrix."""

    min_eigenvalue: float
    grid_N: int


def tilted_log_density(base, gamma, theta):
    """log h0: the base log-density plus the cosine tilt sum_i gamma_i cos(theta_i).

    Unnormalized (constants do not affect line invariance); exactly
    periodic because evaluation wraps first.
    """
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    if gamma.size != base.dim:
        raise DomainError(f"gamma must have length {base.dim}")
    arr = np.asarray(theta, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != base.dim:
        raise DomainError(f"expected angles of dimension {base.dim}")
    delta = wrap(arr)
    out = base._log_unnorm(delta) + np.cos(delta) @ gamma
    return float(out[0]) if single else out


def kronecker_lattice(dim, count):
    """Low-discrepancy points on the torus from the generalized-golden lattice.

    The generator is built from the real root g > 1 of x^(d+1) = x + 1;
    coordinates advance by the fractional parts of 1/g^(i+1).  Deterministic
    and well spread, which keeps the invariance deviation reproducible.
    """
    g = 1.5
    for _ in range(64):
        g -= (g ** (dim + 1) - g - 1.0) / ((dim + 1) * g**dim - 1.0)
    alpha = np.array([(1.0 / g) ** (i + 1) % 1.0 for i in range(dim)])
    k = np.arange(1, count + 1)[:, None]
    frac = (0.5 + k * alpha) % 1.0
    return -math.pi + TWO_PI * frac


def _offsets(alpha, t_count):
    """Scan offsets: a full period of the slowest coordinate plus golden multiples.

    Both sets scale as 1 / min |alpha_i|, so rescaling alpha by c rescales
    every offset by 1/|c| and the scanned points theta + t * alpha are
    unchanged — certificates are scale invariant as they should be.
    """
    min_a = float(np.min(np.abs(alpha)))
    period = np.arange(1, t_count + 1) * (TWO_PI / (t_count * min_a))
    golden = np.arange(1, t_count + 1) * (_GOLDEN / min_a)
    return np.concatenate([period, golden])


def check_line_invariance(base, gamma, alpha, t_samples=DEFAULT_T_SAMPLES,
                          theta_samples=DEFAULT_THETA_SAMPLES):
    """Max deviation of log h0 along lines theta + t * alpha.

    Zero (to roundoff) exactly when h0 is constant along every such line.
    """
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    if alpha.size != base.dim or gamma.size != base.dim:
        raise DomainError(f"alpha and gamma must have length {base.dim}")
    if np.any(alpha == 0.0) or not np.all(np.isfinite(alpha)):
        raise DomainError("every component of alpha must be nonzero and finite")
    if t_samples < MIN_T_SAMPLES:
        raise DomainError(f"t_samples must be >= {MIN_T_SAMPLES}")
    if theta_samples < MIN_THETA_SAMPLES:
        raise DomainError(f"theta_samples must be >= {MIN_THETA_SAMPLES}")
    points = kronecker_lattice(base.dim, theta_samples)
    h_base = tilted_log_density(base, gamma, points)
    worst = 0.0
    for t in _offsets(alpha, t_samples):
        h_shift = tilted_log_density(base, gamma, points + t * alpha)
        worst = max(worst, float(np.max(np.abs(h_shift - h_base))))
    return worst


def characterize(base, grid_N=DEFAULT_GRID_N, tol=DEFAULT_INVARIANCE_TOL,
                 tol_rel=DEFAULT_TOL_REL, skew_scale=1.0,
                 t_samples=DEFAULT_T_SAMPLES, theta_samples=DEFAULT_THETA_SAMPLES):
    """Full singularity verdict for a base density.

    Pipeline: information matrix at grid_N -> rank decision at tol_rel ->
    (if deficient) null-space representative with all direction components
    nonzero -> tilt gamma_i = skew_scale * beta_i / alpha_i -> pointwise
    dependence certificate -> line-invariance scan below `tol`.

    `skew_scale` is the mechanism's score factor (m for the power
    mechanism); the sine and product mechanisms share scale 1 and therefore
    share verdicts.

    Raises InconsistentEvidenceError when rank deficiency is detected but
    no certificate can be completed; callers should treat that as a
    reportable outcome.
    """
    if grid_N < MIN_CHARACTERIZE_GRID_N:
        raise DomainError(f"grid_N must be >= {MIN_CHARACTERIZE_GRID_N}")
    report = fim_report(base, None, grid_N, tol_rel, skew_scale)
    if report.null_dim == 0:
        return NonSingular(min_eigenvalue=report.min_eigenvalue, grid_N=int(grid_N))
    d = base.dim
    vector, q = find_direction_representative(report.null_basis, d)
    if vector is None or q <= MIN_COMPONENT_REL:
        raise InconsistentEvidenceError(
            report.null_dim,
            None if vector is None else vector[:d],
            None,
            message=(
                f"null space (dim {report.null_dim}) admits no representative "
                f"with all direction components nonzero (best quality {q:.3e})"
            ),
        )
    alpha = vector[:d]
    gamma = skew_scale * vector[d:] / alpha
    pw = pointwise_dependence(
        base, vector, grid_N=grid_N, weighted=True, skew_scale=skew_scale
    )
    if pw > POINTWISE_CERT_TOL:
        raise InconsistentEvidenceError(
            report.null_dim,
            alpha,
            pw,
            message=(
                f"pointwise dependence residual {pw:.3e} exceeds "
                f"{POINTWISE_CERT_TOL:.0e}: eigenvalue deficiency looks like a "
                f"quadrature artifact"
            ),
        )
    deviation = check_line_invariance(base, gamma, alpha, t_samples, theta_samples)
    if deviation >= tol:
        raise InconsistentEvidenceError(report.null_dim, alpha, deviation)
    certificate = Certificate(
        alpha=alpha,
        gamma=gamma,
        max_invariance_deviation=deviation,
        t_samples=2 * t_samples,
        theta_samples=theta_samples,
    )
    return Singular(certificate=certificate, null_vector=vector, grid_N=int(grid_N))


def verdict_to_json(verdict):
    """Stable JSON form of a verdict (or of inconsistent evidence)."""
    if isinstance(verdict, Singular):
        c = verdict.certificate
        return {
            "verdict": "singular",
            "alpha": c.alpha.tolist(),
            "gamma": c.gamma.tolist(),
            "deviation": c.max_invariance_deviation,
            "min_eigenvalue": None,
            "grid_N": verdict.grid_N,
        }
    if isinstance(verdict, NonSingular):
        return {
            "verdict": "nonsingular",
            "alpha": None,
            "gamma": None,
            "deviation": None,
            "min_eigenvalue": verdict.min_eigenvalue,
            "grid_N": verdict.grid_N,
        }
    if isinstance(verdict, InconsistentEvidenceError):
        return {
            "verdict": "inconsistent",
            "alpha": None if verdict.best_alpha is None else list(verdict.best_alpha),
            "gamma": None,
            "deviation": verdict.deviation,
            "min_eigenvalue": None,
            "grid_N": None,
        }
    raise DomainError(f"not a verdict: {verdict!r}")
