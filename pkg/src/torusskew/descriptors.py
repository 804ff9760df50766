"""Flat JSON descriptors for base densities and skewed models.

A descriptor is a single JSON object with a ``family`` tag and the family's
parameters as top-level keys, for example::

    {"family": "cosine", "kappa1": 1.0, "kappa2": 1.0, "beta": 0.5}

Matrix-valued parameters are row-major nested arrays.  A skewed model adds
``mu`` (location, array of length d), ``lambda`` (skewness weights, array of
length d) and ``mechanism`` (``"sine"``, ``"product"`` or ``{"power": m}``).
A bare base-density descriptor is accepted everywhere a model is: the skew
fields default to ``mu = 0``, ``lambda = 0`` and the sine mechanism.
"""

import json

import numpy as np

from .densities import (
    BivariateWrappedCauchy,
    Cosine,
    MultivariateCosine,
    MultivariateSine,
    ProductVonMises,
    Sine,
)
from .errors import DomainError
from .skewing import PowerSkew, ProductSkew, SineSkew, SkewModel

SKEW_KEYS = ("mu", "lambda", "mechanism")


def _fail(field, problem):
    raise DomainError(f"descriptor field '{field}': {problem}")


def _number(payload, field):
    value = payload[field]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(field, f"expected a number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value):
        _fail(field, f"expected a finite number, got {value}")
    return value


def _vector(payload, field, length=None):
    value = payload[field]
    if not isinstance(value, (list, tuple)):
        _fail(field, f"expected an array of numbers, got {type(value).__name__}")
    out = []
    for i, entry in enumerate(value):
        if isinstance(entry, bool) or not isinstance(entry, (int, float)):
            _fail(f"{field}[{i}]", f"expected a number, got {type(entry).__name__}")
        entry = float(entry)
        if not np.isfinite(entry):
            _fail(f"{field}[{i}]", f"expected a finite number, got {entry}")
        out.append(entry)
    if not out:
        _fail(field, "must be non-empty")
    if length is not None and len(out) != length:
        _fail(field, f"expected length {length}, got {len(out)}")
    return np.asarray(out, dtype=float)


def _matrix(payload, field, size):
    value = payload[field]
    if not isinstance(value, (list, tuple)):
        _fail(field, f"expected a {size}x{size} nested array, got {type(value).__name__}")
    if len(value) != size:
        _fail(field, f"expected {size} rows, got {len(value)}")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, (list, tuple)):
            _fail(f"{field}[{i}]", f"expected an array of numbers, got {type(row).__name__}")
        if len(row) != size:
            _fail(f"{field}[{i}]", f"expected length {size}, got {len(row)}")
        parsed = []
        for j, entry in enumerate(row):
            if isinstance(entry, bool) or not isinstance(entry, (int, float)):
                _fail(
                    f"{field}[{i}][{j}]",
                    f"expected a number, got {type(entry).__name__}",
                )
            entry = float(entry)
            if not np.isfinite(entry):
                _fail(f"{field}[{i}][{j}]", f"expected a finite number, got {entry}")
            parsed.append(entry)
        rows.append(parsed)
    return np.asarray(rows, dtype=float)


def _check_keys(payload, required, optional=()):
    allowed = set(required) | set(optional) | {"family"} | set(SKEW_KEYS)
    for key in payload:
        if key not in allowed:
            _fail(key, "unknown field for this family")
    for key in required:
        if key not in payload:
            _fail(key, "required field is missing")


def base_from_dict(payload):
    """Build a base density from a flat descriptor dict."""
    if not isinstance(payload, dict):
        raise DomainError(
            f"descriptor must be a JSON object, got {type(payload).__name__}"
        )
    if "family" not in payload:
        _fail("family", "required field is missing")
    family = payload["family"]
    if not isinstance(family, str):
        _fail("family", f"expected a string, got {type(family).__name__}")

    if family == "product_von_mises":
        _check_keys(payload, required=("kappa",))
        return ProductVonMises(_vector(payload, "kappa"))
    if family in ("sine", "cosine"):
        _check_keys(payload, required=("kappa1", "kappa2", "beta"))
        cls = Sine if family == "sine" else Cosine
        return cls(
            _number(payload, "kappa1"),
            _number(payload, "kappa2"),
            _number(payload, "beta"),
        )
    if family in ("multivariate_sine", "multivariate_cosine"):
        field = "Lambda" if family == "multivariate_sine" else "Delta"
        _check_keys(payload, required=("kappa", field))
        kappa = _vector(payload, "kappa")
        interaction = _matrix(payload, field, kappa.size)
        cls = MultivariateSine if family == "multivariate_sine" else MultivariateCosine
        return cls(kappa, interaction)
    if family == "bivariate_wrapped_cauchy":
        _check_keys(payload, required=("c0", "c1", "c2", "c3", "c4"))
        return BivariateWrappedCauchy(*(_number(payload, f"c{i}") for i in range(5)))
    _fail("family", f"unknown family {family!r}")


def base_to_dict(base):
    """Flat descriptor dict for a base density."""
    key = base.param_key()
    family = key[0]
    if family == "product_von_mises":
        return {"family": family, "kappa": list(key[1])}
    if family in ("sine", "cosine"):
        return {"family": family, "kappa1": key[1], "kappa2": key[2], "beta": key[3]}
    if family == "multivariate_sine":
        return {
            "family": family,
            "kappa": list(key[1]),
            "Lambda": [list(row) for row in key[2]],
        }
    if family == "multivariate_cosine":
        return {
            "family": family,
            "kappa": list(key[1]),
            "Delta": [list(row) for row in key[2]],
        }
    if family == "bivariate_wrapped_cauchy":
        return {
            "family": family,
            "c0": key[1],
            "c1": key[2],
            "c2": key[3],
            "c3": key[4],
            "c4": key[5],
        }
    raise DomainError(f"unknown family {family!r}")


def mechanism_from_value(value):
    """Parse the ``mechanism`` descriptor field."""
    if value == "sine":
        return SineSkew()
    if value == "product":
        return ProductSkew()
    if isinstance(value, dict):
        if set(value) != {"power"}:
            _fail("mechanism", f"expected {{'power': m}}, got keys {sorted(value)}")
        m = value["power"]
        if isinstance(m, bool) or not isinstance(m, int):
            _fail("mechanism.power", f"expected an integer, got {type(m).__name__}")
        return PowerSkew(m)
    _fail(
        "mechanism",
        f"expected 'sine', 'product' or {{'power': m}}, got {value!r}",
    )


def model_from_dict(payload):
    """Build a :class:`~torusskew.skewing.SkewModel` from a descriptor dict.

    Skew fields are optional; a bare base descriptor yields the symmetric
    model (``lambda = 0``) under the sine mechanism.
    """
    base = base_from_dict(payload)
    mu = (
        _vector(payload, "mu", length=base.dim)
        if "mu" in payload
        else np.zeros(base.dim)
    )
    lam = (
        _vector(payload, "lambda", length=base.dim)
        if "lambda" in payload
        else np.zeros(base.dim)
    )
    mechanism = (
        mechanism_from_value(payload["mechanism"])
        if "mechanism" in payload
        else SineSkew()
    )
    return SkewModel(base, mu, lam, mechanism)


def model_to_dict(model):
    """Flat descriptor dict for a skewed model."""
    payload = base_to_dict(model.base)
    payload["mu"] = model.mu.tolist()
    payload["lambda"] = model.lam.tolist()
    payload["mechanism"] = model.mechanism.descriptor()
    return payload


def read_model_file(path):
    """Load a model descriptor from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read model file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(
            f"malformed JSON in {path!r} at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    return model_from_dict(payload)
