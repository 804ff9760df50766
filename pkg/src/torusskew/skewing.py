"""Skewing mechanisms for symmetric torus densities.

A symmetric base density f0 is made asymmetric by multiplying with a skew
factor built from sin(theta - mu):

* sine skew: ``1 + sum_j lambda_j sin(theta_j - mu_j)``, valid when
  ``sum_j |lambda_j| <= 1``; the perturbation is odd, so the result is
  already normalized whenever f0 is.
* product skew: ``prod_j (1 + lambda_j sin(theta_j - mu_j))``, valid when
  every ``|lambda_j| <= 1``.
* power skew (two dimensions): ``((1 + lambda_1 s_1 + lambda_2 s_2)/2)^m``
  for integer m >= 1, with ``|lambda_1| + |lambda_2| <= 1``; its
  normalizer has no closed form and is computed by quadrature.

All three share the same score in the skew directions at lambda = 0 up to
the constant factor m (1 for sine and product), which is why singularity
verdicts transfer across mechanisms.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .densities import DEFAULT_GRID_N, BaseDensity
from .errors import ConstraintError, DomainError, EnvelopeError
from .torus import TWO_PI, TorusGrid, rng_stream, wrap

__all__ = [
    "SineSkew",
    "ProductSkew",
    "PowerSkew",
    "SkewModel",
    "Violation",
    "sample",
    "expected_sin_cos",
    "write_samples_csv",
]

# Rejection sampling setup (see `sample`).
ENVELOPE_SAFETY = 1.2
ENVELOPE_GRID_N = 64
PROPOSAL_WINDOW = 100_000
MIN_ACCEPT_RATE = 1e-4
_BATCH = 16_384


@dataclass(frozen=True)
class Violation:
    """One violated validity constraint, with the margin of violation."""

    constraint: str
    value: float
    bound: float

    @property
    def excess(self):
        return self.value - self.bound

    def __str__(self):
        return (
            f"{self.constraint}: got {self.value:.6g}, bound {self.bound:.6g} "
            f"(exceeded by {self.excess:.6g})"
        )


class SkewMechanism:
    """Interface for the three skewing mechanisms."""

    # Multiplier on sin(theta - mu) in the score at the symmetric model.
    score_scale = 1.0

    def violations(self, lam):
        """List of :class:`Violation` for a candidate skewness vector."""
        raise NotImplementedError

    def log_factor(self, sin_delta, lam):
        """log of the skew factor given sin(theta - mu), rows -> scalars.

        Returns -inf where the factor is exactly zero (attainable only on
        the constraint boundary).
        """
        raise NotImplementedError

    def log_factor_bound(self, dim):
        """log of an upper bound B on the skew factor, used by rejection."""
        raise NotImplementedError

    def descriptor(self):
        """JSON-serializable mechanism tag."""
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))


def _log1p_clipped(x):
    # Constraint-valid models keep 1 + x >= 0; roundoff may undershoot by an
    # ulp, which would turn log1p into NaN instead of the intended -inf.
    with np.errstate(divide="ignore"):
        return np.log1p(np.maximum(x, -1.0))


class SineSkew(SkewMechanism):
    """Additive sine perturbation, factor 1 + sum_j lambda_j sin(delta_j)."""

    def violations(self, lam):
        total = float(np.sum(np.abs(lam)))
        if total > 1.0:
            return [Violation("sum of |lambda_j| must be <= 1", total, 1.0)]
        return []

    def log_factor(self, sin_delta, lam):
        return _log1p_clipped(sin_delta @ lam)

    def log_factor_bound(self, dim):
        return math.log(2.0)

    def descriptor(self):
        return "sine"

    def __repr__(self):
        return "SineSkew()"


class ProductSkew(SkewMechanism):
    """Multiplicative perturbation, factor prod_j (1 + lambda_j sin(delta_j))."""

    def violations(self, lam):
        out = []
        for j, lj in enumerate(np.asarray(lam, dtype=float)):
            if abs(lj) > 1.0:
                out.append(Violation(f"|lambda_{j + 1}| must be <= 1", abs(lj), 1.0))
        return out

    def log_factor(self, sin_delta, lam):
        return np.sum(_log1p_clipped(sin_delta * lam), axis=-1)

    def log_factor_bound(self, dim):
        return dim * math.log(2.0)

    def descriptor(self):
        return "product"

    def __repr__(self):
        return "ProductSkew()"


class PowerSkew(SkewMechanism):
    """Power perturbation, factor ((1 + lambda . sin(delta)) / 2)^m, d = 2."""

    def __init__(self, m):
        if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
            raise DomainError("power mechanism requires integer exponent m >= 1")
        self.m = int(m)

    @property
    def score_scale(self):
        return float(self.m)

    def violations(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = []
        if lam.size != 2:
            out.append(
                Violation("power mechanism requires dimension 2", float(lam.size), 2.0)
            )
        total = float(np.sum(np.abs(lam)))
        if total > 1.0:
            out.append(Violation("sum of |lambda_j| must be <= 1", total, 1.0))
        return out

    def log_factor(self, sin_delta, lam):
        return self.m * (_log1p_clipped(sin_delta @ lam) - math.log(2.0))

    def log_factor_bound(self, dim):
        return 0.0  # factor <= 1 since (1 + lambda . s)/2 <= 1

    def descriptor(self):
        return {"power": self.m}

    def __repr__(self):
        return f"PowerSkew(m={self.m})"


class SkewModel:
    """A base density, a location, a skewness vector, and a mechanism.

    Density: f0(theta - mu) * factor(theta - mu) * normalizer, where the
    normalizer is the base constant for the sine and product mechanisms and
    additionally a quadrature constant for the power mechanism.
    """

    def __init__(self, base, mu, lam, mechanism=None):
        if not isinstance(base, BaseDensity):
            raise DomainError("base must be a BaseDensity")
        mu = np.asarray(mu, dtype=float).reshape(-1)
        lam = np.asarray(lam, dtype=float).reshape(-1)
        if mu.size != base.dim or lam.size != base.dim:
            raise DomainError(
                f"mu and lambda must have length {base.dim}; got {mu.size}, {lam.size}"
            )
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(lam))):
            raise DomainError("mu and lambda must be finite")
        mechanism = SineSkew() if mechanism is None else mechanism
        violations = mechanism.violations(lam)
        if violations:
            raise ConstraintError(violations)
        self.base = base
        self.mu = wrap(mu)
        self.lam = lam
        self.mechanism = mechanism
        self._mech_norm_cache = {}

    @property
    def dim(self):
        return self.base.dim

    # -- evaluation ------------------------------------------------------

    def _delta(self, theta):
        arr = np.asarray(theta, dtype=float)
        single = arr.ndim == 1
        arr = np.atleast_2d(arr)
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise DomainError(
                f"expected angles of dimension {self.dim}, got shape {arr.shape}"
            )
        return wrap(arr - self.mu), single

    def log_skew_factor(self, theta):
        """log of the mechanism's skew factor at theta (-inf at exact zeros)."""
        delta, single = self._delta(theta)
        out = self.mechanism.log_factor(np.sin(delta), self.lam)
        return float(out[0]) if single else out

    def log_density(self, theta, grid_N=DEFAULT_GRID_N):
        """Normalized log-density of the skewed model."""
        delta, single = self._delta(theta)
        out = (
            self.base._log_unnorm(delta)
            + self.base.normalization(grid_N).log_constant
            + self.mechanism.log_factor(np.sin(delta), self.lam)
            + self.mechanism_log_normalizer(grid_N)
        )
        return float(out[0]) if single else out

    def density(self, theta, grid_N=DEFAULT_GRID_N):
        return np.exp(self.log_density(theta, grid_N))

    def mechanism_log_normalizer(self, grid_N=DEFAULT_GRID_N):
        """Extra log-normalizer beyond the base constant.

        Zero for the sine and product mechanisms; the quadrature constant
        log C for the power mechanism, where C * int f0 * factor = 1.
        """
        if not isinstance(self.mechanism, PowerSkew):
            return 0.0
        key = int(grid_N)
        if key not in self._mech_norm_cache:
            base_log_c = self.base.normalization(key).log_constant
            grid = TorusGrid(self.dim, key)
            blocks = []
            for block in grid.iter_blocks():
                g = self.base._log_unnorm(block) + self.mechanism.log_factor(
                    np.sin(block), self.lam
                )
                m = float(np.max(g))
                blocks.append((m, float(np.sum(np.exp(g - m)))))
            top = max(m for m, _ in blocks)
            total = math.fsum(s * math.exp(m - top) for m, s in blocks)
            log_integral = base_log_c + top + math.log(total) + math.log(grid.weight)
            self._mech_norm_cache[key] = -log_integral
        return self._mech_norm_cache[key]

    def __repr__(self):
        return (
            f"SkewModel(base={self.base!r}, mu={self.mu.tolist()}, "
            f"lambda={self.lam.tolist()}, mechanism={self.mechanism!r})"
        )


def _envelope_log_bound(base):
    """log of the uniform-proposal envelope: 1.2 x grid max of f0."""
    grid = TorusGrid(base.dim, ENVELOPE_GRID_N)
    peak = max(float(np.max(base._log_unnorm(b))) for b in grid.iter_blocks())
    return math.log(ENVELOPE_SAFETY) + peak


def _sample_worker(model, count, rng, log_m, log_b):
    """Draw `count` points via two-stage rejection from one RNG stream."""
    out = np.empty((count, model.dim))
    got = 0
    window_proposals = 0
    window_accepts = 0
    while got < count:
        theta = rng.uniform(-math.pi, math.pi, size=(_BATCH, model.dim))
        u1 = rng.random(_BATCH)
        log_f0 = model.base._log_unnorm(theta)
        keep = np.log(u1) < log_f0 - log_m
        survivors = theta[keep]
        if survivors.size:
            u2 = rng.random(survivors.shape[0])
            log_fac = model.mechanism.log_factor(np.sin(survivors), model.lam)
            accept = np.log(u2) < log_fac - log_b
            accepted = survivors[accept]
            take = min(count - got, accepted.shape[0])
            out[got : got + take] = accepted[:take]
            got += take
            window_accepts += int(accept.sum())
        window_proposals += _BATCH
        if window_proposals >= PROPOSAL_WINDOW:
            if window_accepts < MIN_ACCEPT_RATE * window_proposals:
                try:
                    peak = math.exp(log_m)
                except OverflowError:
                    peak = math.inf
                raise EnvelopeError(
                    f"acceptance rate {window_accepts / window_proposals:.2e} below "
                    f"{MIN_ACCEPT_RATE:.0e} over a {PROPOSAL_WINDOW}-proposal window",
                    max_density_estimate=peak,
                )
            window_proposals = 0
            window_accepts = 0
    return out


def sample(model, n, seed, workers=1):
    """n independent draws from a skewed model, shape (n, d), canonical angles.

    Two-stage rejection: (i) proposals from the base density via a uniform
    envelope at 1.2 x its grid-estimated maximum, (ii) thinning by the skew
    factor against its mechanism bound.  Deterministic given (seed,
    workers): the sample is partitioned across `workers` derived RNG
    streams and concatenated in stream order, so any parallel schedule
    reproduces the serial result.
    """
    n = int(n)
    if n <= 0:
        raise DomainError("n must be positive")
    workers = int(workers)
    if workers < 1:
        raise DomainError("workers must be >= 1")
    log_m = _envelope_log_bound(model.base)
    log_b = model.mechanism.log_factor_bound(model.dim)
    counts = [n // workers + (1 if w < n % workers else 0) for w in range(workers)]
    parts = [
        _sample_worker(model, c, rng_stream(seed, w), log_m, log_b)
        for w, c in enumerate(counts)
        if c > 0
    ]
    delta = np.concatenate(parts, axis=0)
    return wrap(delta + model.mu)


def expected_sin_cos(model, grid_N=DEFAULT_GRID_N):
    """Quadrature moments (E[sin(theta_j - mu_j)], E[cos(theta_j - mu_j)]).

    Used as the oracle for sampling checks.
    """
    grid = TorusGrid(model.dim, grid_N)
    sin_acc = [[] for _ in range(model.dim)]
    cos_acc = [[] for _ in range(model.dim)]
    mass_acc = []
    for block in grid.iter_blocks():
        s = np.sin(block)
        # Unnormalized integrand; dividing by its own mass below makes the
        # moments those of the distribution the sampler targets even when a
        # mechanism's nominal normalizer is only approximate (the product
        # mechanism on a dependent base retains even cross-moment terms).
        f = np.exp(
            model.base._log_unnorm(block) + model.mechanism.log_factor(s, model.lam)
        )
        c = np.cos(block)
        mass_acc.append(float(np.sum(f)))
        for j in range(model.dim):
            sin_acc[j].append(float(np.sum(s[:, j] * f)))
            cos_acc[j].append(float(np.sum(c[:, j] * f)))
    mass = math.fsum(mass_acc)
    e_sin = np.array([math.fsum(a) / mass for a in sin_acc])
    e_cos = np.array([math.fsum(a) / mass for a in cos_acc])
    return e_sin, e_cos


def write_samples_csv(path, samples):
    """Write samples to CSV with a theta_1..theta_d header, full precision."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"theta_{j + 1}" for j in range(samples.shape[1])])
        for row in samples:
            writer.writerow([repr(float(x)) for x in row])
