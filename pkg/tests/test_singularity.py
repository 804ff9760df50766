"""The singularity decision procedure: verdicts, certificates, invariance
scans, and the inconsistent-evidence escape hatches."""

import numpy as np
import pytest

from torusskew import (
    TWO_PI,
    Cosine,
    MultivariateCosine,
    MultivariateSine,
    NonSingular,
    ProductVonMises,
    Sine,
    Singular,
    characterize,
    check_line_invariance,
    kronecker_lattice,
    tilted_log_density,
    verdict_to_json,
)
from torusskew.densities import BaseDensity
from torusskew.errors import DomainError, InconsistentEvidenceError

from conftest import interaction_matrix

# Frozen minimum eigenvalues from the quadrature oracle runs (regression
# bounds for the regular verdicts).
SINE_MIN_EIG = 0.034848248059710235
MV_SINE_MIN_EIG = 0.023286106745488987


# ------------------------------------------------------------ verdict table


class TestVerdictTable:
    def test_product_von_mises_d2_singular(self):
        verdict = characterize(ProductVonMises([1.0, 2.0]))
        assert isinstance(verdict, Singular)
        # gamma recovers minus the concentrations: the tilt cancels the
        # density exactly, leaving a globally constant function
        assert np.allclose(verdict.certificate.gamma, [-1.0, -2.0], atol=1e-9)
        assert verdict.certificate.max_invariance_deviation < 1e-12

    def test_product_von_mises_d3_singular(self):
        verdict = characterize(ProductVonMises([1.0, 2.0, 0.5]))
        assert isinstance(verdict, Singular)
        assert verdict.certificate.max_invariance_deviation < 1e-12

    def test_sine_nonsingular(self):
        verdict = characterize(Sine(1.0, 1.0, 0.9))
        assert isinstance(verdict, NonSingular)
        assert verdict.min_eigenvalue == pytest.approx(SINE_MIN_EIG, rel=1e-9)

    def test_cosine_singular_with_known_direction(self):
        verdict = characterize(Cosine(1.0, 1.0, 0.5))
        assert isinstance(verdict, Singular)
        alpha = verdict.certificate.alpha
        assert abs(abs(alpha[0]) - abs(alpha[1])) < 1e-9  # proportional to (1,1)
        assert np.allclose(verdict.certificate.gamma, [-1.0, -1.0], atol=1e-9)

    def test_multivariate_sine_nonsingular(self):
        base = MultivariateSine([1.0, 1.0, 1.0], interaction_matrix(3, 0.4))
        verdict = characterize(base)
        assert isinstance(verdict, NonSingular)
        assert verdict.min_eigenvalue == pytest.approx(MV_SINE_MIN_EIG, rel=1e-9)

    def test_multivariate_cosine_singular_along_diagonal(self):
        base = MultivariateCosine([1.0, 1.0, 1.0], interaction_matrix(3, 0.3))
        verdict = characterize(base)
        assert isinstance(verdict, Singular)
        alpha = verdict.certificate.alpha
        assert np.ptp(np.abs(alpha)) < 1e-9  # proportional to (1, 1, 1)

    def test_wrapped_cauchy_nonsingular(self):
        from torusskew import BivariateWrappedCauchy

        verdict = characterize(BivariateWrappedCauchy(2.0, 0.3, 0.3, 0.1, 0.2))
        assert isinstance(verdict, NonSingular)
        # weakly concentrated set: positive but small margin
        assert verdict.min_eigenvalue == pytest.approx(2.519276965722357e-4, rel=1e-9)


# ------------------------------------------------------------- tilted density


def test_tilt_with_minus_kappa_is_constant_everywhere():
    base = ProductVonMises([1.0, 2.0])
    gamma = np.array([-1.0, -2.0])
    pts = np.random.default_rng(3).uniform(-np.pi, np.pi, size=(100, 2))
    values = tilted_log_density(base, gamma, pts)
    assert np.ptp(values) < 1e-12


def test_cosine_invariance_witness_along_diagonal():
    deviation = check_line_invariance(
        Cosine(1.0, 1.0, 0.5), np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    )
    assert deviation < 1e-12


def test_sine_deviation_witness_along_diagonal():
    # The same tilt fails for the Sine family: the scan must report a
    # deviation at least a tenth of the coupling strength.
    beta = 0.9
    deviation = check_line_invariance(
        Sine(1.0, 1.0, beta), np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    )
    assert deviation >= 0.1 * beta


def test_invariance_scan_is_scale_invariant_in_alpha():
    base = Cosine(1.0, 1.0, 0.5)
    gamma = np.array([-1.0, -1.0])
    d1 = check_line_invariance(base, gamma, np.array([1.0, 1.0]))
    d2 = check_line_invariance(base, gamma, np.array([2.0, 2.0]))
    assert d1 == d2  # offsets scale with 1/min|alpha_i|, bitwise


def test_invariance_rejects_zero_direction_component():
    with pytest.raises(DomainError):
        check_line_invariance(
            Cosine(1.0, 1.0, 0.5), np.array([-1.0, -1.0]), np.array([1.0, 0.0])
        )


def test_scan_resolution_minimums_enforced():
    base = Cosine(1.0, 1.0, 0.5)
    gamma = np.array([-1.0, -1.0])
    alpha = np.array([1.0, 1.0])
    with pytest.raises(DomainError):
        check_line_invariance(base, gamma, alpha, t_samples=8)
    with pytest.raises(DomainError):
        check_line_invariance(base, gamma, alpha, theta_samples=100)
    with pytest.raises(DomainError):
        characterize(base, grid_N=32)


def test_kronecker_lattice_shape_and_range():
    pts = kronecker_lattice(3, 128)
    assert pts.shape == (128, 3)
    assert np.all(pts >= -np.pi) and np.all(pts < np.pi)
    again = kronecker_lattice(3, 128)
    assert np.array_equal(pts, again)
    # equidistribution sanity: each coordinate's mean near zero
    assert np.max(np.abs(pts.mean(axis=0))) < 0.15


# -------------------------------------------------------------- mechanisms


def test_power_mechanism_null_vector_rescaled_but_same_gamma():
    base = Cosine(1.0, 1.0, 0.5)
    sine_verdict = characterize(base, skew_scale=1.0)
    power_verdict = characterize(base, skew_scale=3.0)
    assert isinstance(power_verdict, Singular)
    # the tilt gamma is mechanism-independent ...
    assert np.allclose(
        power_verdict.certificate.gamma, sine_verdict.certificate.gamma, atol=1e-9
    )
    # ... while the null vector's skew block shrinks by the power
    sine_null = sine_verdict.null_vector
    power_null = power_verdict.null_vector
    sine_ratio = sine_null[2:] / sine_null[:2]
    power_ratio = power_null[2:] / power_null[:2]
    assert np.allclose(power_ratio, sine_ratio / 3.0, atol=1e-9)


# ---------------------------------------------------- inconsistent evidence


class _UnrepairableNullBase(BaseDensity):
    """Uniform density whose reported score duplicates sin(theta_1) in the
    location slot, creating a null vector with a structurally zero direction
    component.  The gradient deliberately contradicts the flat density."""

    family_name = "crafted_unrepairable"

    def __init__(self):
        super().__init__(2)

    def _log_unnorm_sc(self, s, c):
        return np.zeros(s.shape[0])

    def _grad(self, delta):
        out = np.zeros_like(delta)
        out[:, 0] = -np.sin(delta[:, 0])
        out[:, 1] = -0.5 * np.sin(2.0 * delta[:, 1])
        return out


class _FalseInvarianceBase(BaseDensity):
    """Uniform density whose reported score duplicates the full sine block,
    so the information matrix is singular and the pointwise certificate
    holds, yet the implied tilt is not line-invariant."""

    family_name = "crafted_false_invariance"

    def __init__(self):
        super().__init__(2)

    def _log_unnorm_sc(self, s, c):
        return np.zeros(s.shape[0])

    def _grad(self, delta):
        return -np.sin(delta)


def test_inconsistent_when_no_direction_representative_exists():
    with pytest.raises(InconsistentEvidenceError) as err:
        characterize(_UnrepairableNullBase())
    assert err.value.null_space_dim >= 1
    payload = verdict_to_json(err.value)
    assert payload["verdict"] == "inconsistent"


def test_inconsistent_when_tilt_is_not_line_invariant():
    with pytest.raises(InconsistentEvidenceError) as err:
        characterize(_FalseInvarianceBase())
    assert err.value.deviation is not None and err.value.deviation > 1e-6
    assert err.value.best_alpha is not None


def test_inconsistent_when_pointwise_certificate_fails(monkeypatch):
    import torusskew.singularity as singularity_module

    monkeypatch.setattr(singularity_module, "POINTWISE_CERT_TOL", 0.0)
    with pytest.raises(InconsistentEvidenceError):
        characterize(Cosine(1.0, 1.0, 0.5))


# ------------------------------------------------------------------- JSON


def test_verdict_json_shapes():
    singular = verdict_to_json(characterize(Cosine(1.0, 1.0, 0.5)))
    assert singular["verdict"] == "singular"
    assert singular["min_eigenvalue"] is None
    assert len(singular["alpha"]) == 2 and len(singular["gamma"]) == 2

    regular = verdict_to_json(characterize(Sine(1.0, 1.0, 0.9)))
    assert regular["verdict"] == "nonsingular"
    assert regular["alpha"] is None and regular["gamma"] is None
    assert regular["min_eigenvalue"] > 0

    with pytest.raises(DomainError):
        verdict_to_json("not a verdict")
