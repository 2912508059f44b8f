"""Python access to the fail-safe system library.

Systems, generators and reports are plain dicts with the same layout as the
CLI's JSON files (see docs/schemas).
"""
import json

from . import _core
from ._core import InconsistencyError, NumericError, UnsupportedError, ValidationError

__all__ = [
    "classify", "psi", "survival", "verify", "simulate_second_smallest", "mle_fit",
    "kendall_tau", "ValidationError", "UnsupportedError", "NumericError", "InconsistencyError",
]


def classify(a, b, tol=1e-12):
    return json.loads(_core.classify(list(a), list(b), tol))


def psi(generator, t):
    return _core.psi(json.dumps(generator), t)


def survival(system, xs):
    return _core.survival(json.dumps(system), list(xs))


def verify(theorem, x, y):
    return json.loads(_core.verify(theorem, json.dumps(x), json.dumps(y)))


def simulate_second_smallest(system, count, seed=20240601):
    return _core.simulate_second_smallest(json.dumps(system), count, seed)


def mle_fit(family, data):
    return json.loads(_core.mle_fit(family, list(data)))


kendall_tau = _core.kendall_tau
