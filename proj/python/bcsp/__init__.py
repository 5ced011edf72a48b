"""Biased CSP and densest subhypergraph toolkit."""

import json as _json

from . import _bcsp
from ._bcsp import DomainError, StructuralError

__all__ = [
    "DomainError",
    "StructuralError",
    "analyze_predicate",
    "brute_force",
    "reduce",
    "solve",
    "gadget",
    "gamma",
    "verify",
    "suite_names",
]


def _dump(obj):
    if obj is None:
        return ""
    if isinstance(obj, str):
        return obj
    return _json.dumps(obj)


def analyze_predicate(spec):
    """Profile a predicate given by name (e.g. "NEQ") or as a dict."""
    return _json.loads(_bcsp.analyze_predicate(_dump(spec)))


def brute_force(instance, mu, mode="at-most", problem="dksh", threads=1):
    return _json.loads(_bcsp.brute_force(_dump(instance), mu, mode, problem, threads))


def reduce(kind, instance, params=None, seed=0):
    return _json.loads(_bcsp.reduce(kind, _dump(instance), _dump(params), seed))


def solve(problem, instance, bias=None, config=None, algorithm="auto"):
    return _json.loads(_bcsp.solve(problem, _dump(instance), bias, _dump(config), algorithm))


def gadget(test, assignment="dictator", params=None):
    return _json.loads(_bcsp.gadget(test, assignment, _dump(params)))


def gamma(rho, mus):
    return _bcsp.gamma(rho, list(mus))


def verify(claim, n_max=0, seed=0, threads=1, trials=0, samples=0):
    return _json.loads(_bcsp.verify(claim, n_max, seed, threads, trials, samples))


def suite_names():
    return list(_bcsp.suite_names())
