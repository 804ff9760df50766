"""Shared fixtures: one representative of every density family."""

import numpy as np
import pytest

from torusskew import (
    BivariateWrappedCauchy,
    Cosine,
    MultivariateCosine,
    MultivariateSine,
    ProductVonMises,
    Sine,
)


def interaction_matrix(dim, off_diagonal):
    """Symmetric zero-diagonal matrix with one constant off-diagonal value."""
    matrix = np.full((dim, dim), float(off_diagonal))
    np.fill_diagonal(matrix, 0.0)
    return matrix


def family_zoo():
    """(id, instance) for one member of each family, at the parameters used
    throughout the verdict table tests."""
    return [
        ("product_von_mises_d2", ProductVonMises([1.0, 2.0])),
        ("product_von_mises_d3", ProductVonMises([1.0, 2.0, 0.5])),
        ("sine", Sine(1.0, 1.0, 0.9)),
        ("cosine", Cosine(1.0, 1.0, 0.5)),
        ("multivariate_sine_d3", MultivariateSine([1.0, 1.0, 1.0], interaction_matrix(3, 0.4))),
        ("multivariate_cosine_d3", MultivariateCosine([1.0, 1.0, 1.0], interaction_matrix(3, 0.3))),
        ("bivariate_wrapped_cauchy", BivariateWrappedCauchy(2.0, 0.3, 0.3, 0.1, 0.2)),
    ]


ZOO_IDS = [name for name, _ in family_zoo()]
ZOO_BASES = [base for _, base in family_zoo()]


@pytest.fixture(params=ZOO_BASES, ids=ZOO_IDS)
def any_base(request):
    return request.param
