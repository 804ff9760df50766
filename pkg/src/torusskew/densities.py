"""Symmetric base families on the d-torus.

Six families, each with an unnormalized log-density, an analytic gradient,
and a normalizing constant (closed form for the independent von Mises
product, tensor-grid quadrature otherwise).  All densities here are
symmetric about the origin, f(theta) = f(-theta), and component-wise
2*pi-periodic; evaluation wraps its input first so periodicity holds
bitwise.

Angles enter as arrays of shape ``(d,)`` or ``(n, d)``; results follow.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bessel import log_bessel_i0
from .errors import AccuracyError, DomainError
from .torus import TWO_PI, TorusGrid, wrap

__all__ = [
    "BaseDensity",
    "ProductVonMises",
    "Sine",
    "Cosine",
    "MultivariateSine",
    "MultivariateCosine",
    "BivariateWrappedCauchy",
    "NormalizationCache",
    "log_norm_constant",
    "FAMILIES",
]

# Quadrature defaults: constants are computed at this resolution and checked
# against the doubled grid.
DEFAULT_GRID_N = 128
MIN_NORMALIZATION_GRID_N = 16
DOUBLING_WARN_TOL = 1e-10
DOUBLING_FAIL_TOL = 1e-6

# Grid used to validate the wrapped-Cauchy denominator at construction.
_POSITIVITY_GRID_N = 256


@dataclass(frozen=True)
class NormalizationCache:
    """Normalizing constant for a base density.

    ``exp(log_constant)`` times the unnormalized density integrates to one.
    ``doubling_change`` is the absolute change in ``log_constant`` when the
    quadrature grid is doubled (zero for the analytic branch).
    """

    log_constant: float
    method: str  # "analytic" | "quadrature"
    grid_N: int | None
    doubling_change: float


class BaseDensity:
    """Common machinery for the symmetric families.

    Subclasses set ``self.dim`` and implement ``_log_unnorm`` and ``_grad``
    on canonical ``(n, d)`` arrays.
    """

    family_name = None

    def __init__(self, dim):
        self.dim = int(dim)
        self._norm_cache = {}

    # -- evaluation ------------------------------------------------------

    def _prepare(self, theta):
        arr = np.asarray(theta, dtype=float)
        single = arr.ndim == 1
        arr = np.atleast_2d(arr)
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise DomainError(
                f"expected angles of dimension {self.dim}, got shape {arr.shape}"
            )
        return wrap(arr), single

    def log_unnormalized(self, theta):
        """Unnormalized log-density at ``theta`` (wrapped internally)."""
        delta, single = self._prepare(theta)
        out = self._log_unnorm(delta)
        return float(out[0]) if single else out

    def grad_log(self, theta):
        """Analytic gradient of the log-density with respect to ``theta``.

        Normalization does not depend on ``theta``, so this is also the
        gradient of the normalized log-density.
        """
        delta, single = self._prepare(theta)
        out = self._grad(delta)
        return out[0] if single else out

    # -- normalization ---------------------------------------------------

    def normalization(self, grid_N=DEFAULT_GRID_N):
        """Memoized :func:`log_norm_constant` for this density."""
        key = int(grid_N)
        if key not in self._norm_cache:
            self._norm_cache[key] = log_norm_constant(self, key)
        return self._norm_cache[key]

    def log_density(self, theta, grid_N=DEFAULT_GRID_N):
        """Normalized log-density."""
        return self.log_unnormalized(theta) + self.normalization(grid_N).log_constant

    def density(self, theta, grid_N=DEFAULT_GRID_N):
        return np.exp(self.log_density(theta, grid_N))

    # -- hooks -----------------------------------------------------------

    def _log_unnorm(self, delta):
        return self._log_unnorm_sc(np.sin(delta), np.cos(delta))

    def _log_unnorm_sc(self, s, c):
        """Log-density from precomputed sin/cos of the (wrapped) angles.

        Every family here is a polynomial in componentwise sines and
        cosines (or the log of one), which lets fitting loops trade
        per-point transcendentals for cached multiplies.
        """
        raise NotImplementedError

    def _grad(self, delta):
        raise NotImplementedError

    def shifted_logsum_factory(self, data):
        """Closure for sum_i log f0(data_i - mu), or None if unavailable.

        For the exponential-trigonometric families the data enter that sum
        only through a fixed set of trigonometric product sums, so after
        one O(n) pass the sum can be evaluated for any location in O(1).
        The closure takes (cos(mu), sin(mu)) as vectors.  Families whose
        log-density is not trig-polynomial return None and callers fall
        back to full passes.
        """
        return None

    def param_key(self):
        """Hashable structural key identifying family and parameters."""
        raise NotImplementedError

    # Unconstrained parameterization of the non-location parameters, used by
    # the optional free-concentration fitting mode.  Non-negative parameters
    # travel as square roots so any real vector maps to a valid instance.
    def free_param_vector(self):
        raise NotImplementedError

    def with_free_params(self, vec):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.param_key() == other.param_key()

    def __hash__(self):
        return hash(self.param_key())


def _as_vector(x, name):
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be a nonempty finite vector")
    return arr


def _as_interaction_matrix(m, d, name):
    arr = np.asarray(m, dtype=float)
    if arr.shape != (d, d):
        raise DomainError(f"{name} must be {d}x{d}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if not np.array_equal(arr, arr.T):
        raise DomainError(f"{name} must be symmetric")
    if np.any(np.diag(arr) != 0.0):
        raise DomainError(f"{name} must have a zero diagonal")
    return arr


class ProductVonMises(BaseDensity):
    """Independent von Mises coordinates.

    log f(theta) = sum_i kappa_i cos(theta_i), kappa_i >= 0, with the closed
    form constant prod_i 1/(2 pi I0(kappa_i)).  All kappa_i = 0 gives the
    uniform density on the torus.
    """

    family_name = "product_von_mises"

    def __init__(self, kappa):
        kappa = _as_vector(kappa, "kappa")
        if np.any(kappa < 0):
            raise DomainError("product von Mises requires kappa_i >= 0")
        super().__init__(kappa.size)
        self.kappa = kappa

    def _log_unnorm_sc(self, s, c):
        return c @ self.kappa

    def _grad(self, delta):
        return -self.kappa * np.sin(delta)

    def shifted_logsum_factory(self, data):
        sum_s = np.sin(data).sum(axis=0)
        sum_c = np.cos(data).sum(axis=0)

        def logsum(cm, sm):
            # sum_i cos(theta_ij - mu_j) = cm_j * sum_c_j + sm_j * sum_s_j
            return float(self.kappa @ (cm * sum_c + sm * sum_s))

        return logsum

    def param_key(self):
        return (self.family_name, tuple(self.kappa))

    def free_param_vector(self):
        return np.sqrt(self.kappa)

    def with_free_params(self, vec):
        vec = np.asarray(vec, dtype=float)
        return ProductVonMises(vec**2)

    def __repr__(self):
        return f"ProductVonMises(kappa={self.kappa.tolist()})"


class _Bivariate(BaseDensity):
    def __init__(self, kappa1, kappa2, beta):
        k1, k2, b = float(kappa1), float(kappa2), float(beta)
        if not (math.isfinite(k1) and math.isfinite(k2) and math.isfinite(b)):
            raise DomainError("parameters must be finite")
        if k1 < 0 or k2 < 0:
            raise DomainError(f"{self.family_name} requires kappa1, kappa2 >= 0")
        super().__init__(2)
        self.kappa1, self.kappa2, self.beta = k1, k2, b

    def param_key(self):
        return (self.family_name, self.kappa1, self.kappa2, self.beta)

    def free_param_vector(self):
        return np.array([math.sqrt(self.kappa1), math.sqrt(self.kappa2), self.beta])

    def with_free_params(self, vec):
        vec = np.asarray(vec, dtype=float)
        return type(self)(vec[0] ** 2, vec[1] ** 2, vec[2])

    def __repr__(self):
        return (
            f"{type(self).__name__}(kappa1={self.kappa1}, kappa2={self.kappa2}, "
            f"beta={self.beta})"
        )


class Sine(_Bivariate):
    """Bivariate sine model.

    log f(theta) = kappa1 cos(theta1) + kappa2 cos(theta2)
                   + beta sin(theta1) sin(theta2).
    """

    family_name = "sine"

    def _log_unnorm_sc(self, s, c):
        return self.kappa1 * c[:, 0] + self.kappa2 * c[:, 1] + self.beta * s[:, 0] * s[:, 1]

    def shifted_logsum_factory(self, data):
        s, c = np.sin(data), np.cos(data)
        sum_s, sum_c = s.sum(axis=0), c.sum(axis=0)
        ss = float(s[:, 0] @ s[:, 1])
        sc = float(s[:, 0] @ c[:, 1])
        cs = float(c[:, 0] @ s[:, 1])
        cc = float(c[:, 0] @ c[:, 1])

        def logsum(cm, sm):
            # sin(t1-m1) sin(t2-m2) expanded by angle differences.
            cross = (
                ss * cm[0] * cm[1]
                - sc * cm[0] * sm[1]
                - cs * sm[0] * cm[1]
                + cc * sm[0] * sm[1]
            )
            return float(
                self.kappa1 * (cm[0] * sum_c[0] + sm[0] * sum_s[0])
                + self.kappa2 * (cm[1] * sum_c[1] + sm[1] * sum_s[1])
                + self.beta * cross
            )

        return logsum

    def _grad(self, delta):
        c, s = np.cos(delta), np.sin(delta)
        return np.stack(
            [
                -self.kappa1 * s[:, 0] + self.beta * c[:, 0] * s[:, 1],
                -self.kappa2 * s[:, 1] + self.beta * s[:, 0] * c[:, 1],
            ],
            axis=1,
        )


class Cosine(_Bivariate):
    """Bivariate cosine model.

    log f(theta) = kappa1 cos(theta1) + kappa2 cos(theta2)
                   + beta cos(theta1 - theta2).
    """

    family_name = "cosine"

    def _log_unnorm_sc(self, s, c):
        # cos(d1 - d2) = c1 c2 + s1 s2
        return (
            self.kappa1 * c[:, 0]
            + self.kappa2 * c[:, 1]
            + self.beta * (c[:, 0] * c[:, 1] + s[:, 0] * s[:, 1])
        )

    def shifted_logsum_factory(self, data):
        s, c = np.sin(data), np.cos(data)
        sum_s, sum_c = s.sum(axis=0), c.sum(axis=0)
        diff = data[:, 0] - data[:, 1]
        sum_cd = float(np.sum(np.cos(diff)))
        sum_sd = float(np.sum(np.sin(diff)))

        def logsum(cm, sm):
            # cos((t1-t2) - (m1-m2)); the mu-difference trig comes from the
            # componentwise values, no extra transcendentals.
            cos_dm = cm[0] * cm[1] + sm[0] * sm[1]
            sin_dm = sm[0] * cm[1] - cm[0] * sm[1]
            return float(
                self.kappa1 * (cm[0] * sum_c[0] + sm[0] * sum_s[0])
                + self.kappa2 * (cm[1] * sum_c[1] + sm[1] * sum_s[1])
                + self.beta * (sum_cd * cos_dm + sum_sd * sin_dm)
            )

        return logsum

    def _grad(self, delta):
        s = np.sin(delta)
        sdiff = np.sin(delta[:, 0] - delta[:, 1])
        return np.stack(
            [
                -self.kappa1 * s[:, 0] - self.beta * sdiff,
                -self.kappa2 * s[:, 1] + self.beta * sdiff,
            ],
            axis=1,
        )


class MultivariateSine(BaseDensity):
    """Sine model on d coordinates.

    log f(theta) = kappa . cos(theta) + (1/2) sin(theta)' Lambda sin(theta),
    Lambda symmetric with zero diagonal; kappa may have any sign.
    """

    family_name = "multivariate_sine"

    def __init__(self, kappa, interaction):
        kappa = _as_vector(kappa, "kappa")
        super().__init__(kappa.size)
        self.kappa = kappa
        self.interaction = _as_interaction_matrix(interaction, self.dim, "interaction")

    def _log_unnorm_sc(self, s, c):
        return c @ self.kappa + 0.5 * np.einsum("ni,ni->n", s, s @ self.interaction)

    def _grad(self, delta):
        c, s = np.cos(delta), np.sin(delta)
        return -self.kappa * s + c * (s @ self.interaction)

    def _trig_gram(self, data):
        """First-order trig sums and the Gram matrix of [sin(data) | cos(data)].

        With U = [diag(cos mu) | -diag(sin mu)] and V = [diag(sin mu) |
        diag(cos mu)], the shifted product sums are (U M U')_jk =
        sum_i sin(d_ij) sin(d_ik) and (V M V')_jk the cosine analogue.
        """
        z = np.hstack([np.sin(data), np.cos(data)])
        return np.sin(data).sum(axis=0), np.cos(data).sum(axis=0), z.T @ z

    @staticmethod
    def _shift_mats(cm, sm):
        u = np.hstack([np.diag(cm), -np.diag(sm)])
        v = np.hstack([np.diag(sm), np.diag(cm)])
        return u, v

    def shifted_logsum_factory(self, data):
        sum_s, sum_c, gram = self._trig_gram(data)

        def logsum(cm, sm):
            u, _ = self._shift_mats(cm, sm)
            g_ss = u @ gram @ u.T
            return float(
                self.kappa @ (cm * sum_c + sm * sum_s)
                + 0.5 * np.sum(self.interaction * g_ss)
            )

        return logsum

    def param_key(self):
        return (
            self.family_name,
            tuple(self.kappa),
            tuple(map(tuple, self.interaction)),
        )

    def free_param_vector(self):
        iu = np.triu_indices(self.dim, k=1)
        return np.concatenate([self.kappa, self.interaction[iu]])

    def with_free_params(self, vec):
        vec = np.asarray(vec, dtype=float)
        d = self.dim
        kappa = vec[:d]
        mat = np.zeros((d, d))
        iu = np.triu_indices(d, k=1)
        mat[iu] = vec[d:]
        mat = mat + mat.T
        return type(self)(kappa, mat)

    def __repr__(self):
        return (
            f"{type(self).__name__}(kappa={self.kappa.tolist()}, "
            f"interaction={self.interaction.tolist()})"
        )


class MultivariateCosine(MultivariateSine):
    """Cosine model on d coordinates.

    log f(theta) = kappa . cos(theta) - sin(theta)' Delta sin(theta)
                   - cos(theta)' Delta cos(theta),
    equivalently kappa . cos(theta) - sum_{j != k} delta_jk cos(theta_k -
    theta_j); Delta symmetric with zero diagonal.
    """

    family_name = "multivariate_cosine"

    def _log_unnorm_sc(self, s, c):
        quad = np.einsum("ni,ni->n", s, s @ self.interaction) + np.einsum(
            "ni,ni->n", c, c @ self.interaction
        )
        return c @ self.kappa - quad

    def _grad(self, delta):
        c, s = np.cos(delta), np.sin(delta)
        pair = s * (c @ self.interaction) - c * (s @ self.interaction)
        return -self.kappa * s + 2.0 * pair

    def shifted_logsum_factory(self, data):
        sum_s, sum_c, gram = self._trig_gram(data)

        def logsum(cm, sm):
            u, v = self._shift_mats(cm, sm)
            quad = np.sum(self.interaction * (u @ gram @ u.T)) + np.sum(
                self.interaction * (v @ gram @ v.T)
            )
            return float(self.kappa @ (cm * sum_c + sm * sum_s) - quad)

        return logsum


class BivariateWrappedCauchy(BaseDensity):
    """Bivariate wrapped-Cauchy-type model.

    f(theta) proportional to 1 / (c0 - c1 cos(theta1) - c2 cos(theta2)
    - c3 cos(theta1) cos(theta2) - c4 sin(theta1) sin(theta2)); the
    denominator must stay positive, which is validated on a grid at
    construction.
    """

    family_name = "bivariate_wrapped_cauchy"

    def __init__(self, c0, c1, c2, c3, c4):
        coeffs = [float(c) for c in (c0, c1, c2, c3, c4)]
        if not all(map(math.isfinite, coeffs)):
            raise DomainError("coefficients must be finite")
        super().__init__(2)
        self.c0, self.c1, self.c2, self.c3, self.c4 = coeffs
        grid = TorusGrid(2, _POSITIVITY_GRID_N)
        min_den = min(
            float(np.min(self._denominator_sc(np.sin(b), np.cos(b))))
            for b in grid.iter_blocks()
        )
        if min_den <= 0:
            raise DomainError(
                f"denominator must be positive on the torus; grid minimum {min_den:.6g}"
            )

    def _denominator_sc(self, s, c):
        return (
            self.c0
            - self.c1 * c[:, 0]
            - self.c2 * c[:, 1]
            - self.c3 * c[:, 0] * c[:, 1]
            - self.c4 * s[:, 0] * s[:, 1]
        )

    def _log_unnorm_sc(self, s, c):
        return -np.log(self._denominator_sc(s, c))

    def _grad(self, delta):
        c, s = np.cos(delta), np.sin(delta)
        den = self._denominator_sc(s, c)
        d1 = self.c1 * s[:, 0] + self.c3 * s[:, 0] * c[:, 1] - self.c4 * c[:, 0] * s[:, 1]
        d2 = self.c2 * s[:, 1] + self.c3 * c[:, 0] * s[:, 1] - self.c4 * s[:, 0] * c[:, 1]
        return -np.stack([d1, d2], axis=1) / den[:, None]

    def param_key(self):
        return (self.family_name, self.c0, self.c1, self.c2, self.c3, self.c4)

    def free_param_vector(self):
        return np.array([self.c0, self.c1, self.c2, self.c3, self.c4])

    def with_free_params(self, vec):
        vec = np.asarray(vec, dtype=float)
        return BivariateWrappedCauchy(*vec)

    def __repr__(self):
        return (
            f"BivariateWrappedCauchy(c0={self.c0}, c1={self.c1}, c2={self.c2}, "
            f"c3={self.c3}, c4={self.c4})"
        )


FAMILIES = {
    cls.family_name: cls
    for cls in (
        ProductVonMises,
        Sine,
        Cosine,
        MultivariateSine,
        MultivariateCosine,
        BivariateWrappedCauchy,
    )
}


def log_integral_unnormalized(base, grid_N):
    """log of the torus integral of the unnormalized density.

    Single deterministic pass over the grid; block results are merged in a
    max-shifted form so large log-densities cannot overflow.
    """
    grid = TorusGrid(base.dim, grid_N)
    blocks = []
    for block in grid.iter_blocks():
        g = base._log_unnorm(block)
        m = float(np.max(g))
        blocks.append((m, float(np.sum(np.exp(g - m)))))
    top = max(m for m, _ in blocks)
    total = math.fsum(s * math.exp(m - top) for m, s in blocks)
    return top + math.log(total) + math.log(grid.weight)


def log_norm_constant(base, grid_N=DEFAULT_GRID_N):
    """Normalizing constant of a base density as a :class:`NormalizationCache`.

    Analytic for :class:`ProductVonMises`; quadrature otherwise, in which
    case the constant is recomputed on the doubled grid and the change is
    reported.  A change above 1e-6 means the quadrature has not converged
    and raises :class:`AccuracyError`.
    """
    if grid_N < MIN_NORMALIZATION_GRID_N:
        raise DomainError(f"grid_N must be >= {MIN_NORMALIZATION_GRID_N}")
    if isinstance(base, ProductVonMises):
        log_c = -sum(math.log(TWO_PI) + log_bessel_i0(k) for k in base.kappa)
        return NormalizationCache(log_c, "analytic", None, 0.0)
    log_c = -log_integral_unnormalized(base, grid_N)
    log_c2 = -log_integral_unnormalized(base, 2 * grid_N)
    change = abs(log_c2 - log_c)
    if change > DOUBLING_FAIL_TOL:
        raise AccuracyError(
            f"normalizing constant for {base!r} changed by {change:.3e} when "
            f"doubling grid_N={grid_N}; increase the grid"
        )
    return NormalizationCache(log_c, "quadrature", int(grid_N), change)
