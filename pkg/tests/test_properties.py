"""Property-based invariants, checked over generated inputs."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from torusskew import (
    ProductVonMises,
    SineSkew,
    TWO_PI,
    base_from_dict,
    base_to_dict,
    bessel_i0,
    free_from_lambda,
    lambda_from_free,
    log_bessel_i0,
    wrap,
    wrapped_distance,
)

angles = st.floats(min_value=-1e9, max_value=1e9, allow_nan=False)
moderate_angles = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
free_vectors = st.lists(
    st.floats(min_value=-1e8, max_value=1e8, allow_nan=False),
    min_size=1,
    max_size=6,
).map(lambda xs: np.array(xs, dtype=float))


@settings(max_examples=300, deadline=None)
@given(angles)
def test_wrap_always_lands_in_canonical_interval(x):
    w = float(wrap(x))
    assert -math.pi <= w < math.pi


@settings(max_examples=300, deadline=None)
@given(angles)
def test_wrap_is_idempotent_bitwise(x):
    w = float(wrap(x))
    assert float(wrap(w)) == w


@settings(max_examples=300, deadline=None)
@given(moderate_angles, st.integers(min_value=-1000, max_value=1000))
def test_wrap_respects_the_period(x, k):
    direct = float(wrap(x))
    shifted = float(wrap(x + TWO_PI * k))
    assert float(wrapped_distance(direct, shifted)) < 1e-9


@settings(max_examples=300, deadline=None)
@given(moderate_angles, moderate_angles)
def test_wrapped_distance_is_a_bounded_symmetric_gap(a, b):
    d_ab = float(wrapped_distance(a, b))
    d_ba = float(wrapped_distance(b, a))
    assert 0.0 <= d_ab <= math.pi
    assert abs(d_ab - d_ba) < 1e-9
    assert float(wrapped_distance(a, a)) == 0.0


@settings(max_examples=300, deadline=None)
@given(moderate_angles, moderate_angles, moderate_angles)
def test_wrapped_distance_triangle_inequality(a, b, c):
    assert float(wrapped_distance(a, c)) <= (
        float(wrapped_distance(a, b)) + float(wrapped_distance(b, c)) + 1e-9
    )


@settings(max_examples=500, deadline=None)
@given(free_vectors)
def test_lambda_from_free_output_is_always_admitted(u):
    lam = lambda_from_free(u)
    # the actual admissibility checker, not a reimplementation of it
    assert SineSkew().violations(lam) == []


@settings(max_examples=300, deadline=None)
@given(
    st.lists(
        st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
        min_size=1,
        max_size=6,
    ),
    st.floats(min_value=0.0, max_value=0.95),
)
def test_free_lambda_roundtrip_on_the_interior(raw, total):
    raw = np.array(raw, dtype=float)
    l1 = float(np.sum(np.abs(raw)))
    if l1 == 0.0:
        lam = raw
    else:
        lam = raw * (total / l1)
    back = lambda_from_free(free_from_lambda(lam))
    assert np.max(np.abs(back - lam)) < 1e-9


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=0.0, max_value=700.0, allow_nan=False))
def test_bessel_log_form_matches_direct_form(x):
    direct = bessel_i0(x)
    assert direct >= 1.0
    assert abs(log_bessel_i0(x) - math.log(direct)) <= 1e-12 * max(
        1.0, abs(math.log(direct))
    )


@settings(max_examples=300, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=5000.0, allow_nan=False),
    st.floats(min_value=0.0, max_value=5000.0, allow_nan=False),
)
def test_bessel_log_form_is_monotone(x, y):
    lo, hi = sorted((x, y))
    assert log_bessel_i0(lo) <= log_bessel_i0(hi)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.floats(min_value=1e-2, max_value=100.0, allow_nan=False),
        min_size=1,
        max_size=4,
    )
)
def test_descriptor_roundtrip_preserves_parameters_bitwise(kappa):
    base = ProductVonMises(kappa)
    again = base_from_dict(base_to_dict(base))
    assert np.array_equal(again.kappa, base.kappa)
