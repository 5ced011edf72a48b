import math

import pytest

import bcsp

TRIANGLE = {"n": 3, "arity": 2, "edges": [[0, 1], [1, 2], [0, 2]]}


def test_analyze_neq():
    r = bcsp.analyze_predicate("NEQ")
    assert r["bias_independent"] is True
    assert r["exponent"] == 1
    assert sorted(r["minimal_elements"]) == ["01", "10"]


def test_brute_force_triangle():
    r = bcsp.brute_force(TRIANGLE, 2 / 3)
    assert math.isclose(r["value"], 1 / 3, abs_tol=1e-12)
    assert r["labeling"].count("1") == 2


def test_solve_matches_brute_force():
    r = bcsp.solve("dks", TRIANGLE, bias=2 / 3)
    assert math.isclose(r["value"], 1 / 3, abs_tol=1e-12)
    assert r["relative_weight"] <= r["weight_limit"] + 1e-9


def test_reduce_dksh_to_pred():
    psi = {"arity": 3, "accepting": ["110", "111"]}
    r = bcsp.reduce("dksh-to-pred", TRIANGLE, {"predicate": psi, "beta": "110", "bias": 2 / 3})
    assert r["instance"]["n"] == 4
    assert math.isclose(r["target_bias"], 1 / 3, abs_tol=1e-12)


def test_gamma_and_gadget():
    assert math.isclose(bcsp.gamma(0.5, [0.5, 0.5]), 1 / 3, abs_tol=1e-9)
    g = bcsp.gadget("hypercube", params={"r": 2, "mu": 0.1, "rho": 0.5, "R": 3, "samples": 1000})
    assert math.isclose(g["exact"], 0.0325, abs_tol=1e-12)


def test_errors_map_to_exceptions():
    with pytest.raises(bcsp.StructuralError, match="'edges'"):
        bcsp.brute_force({"n": 2, "arity": 2, "edges": [[0, 7]]}, 0.5)
    with pytest.raises(bcsp.DomainError):
        bcsp.gamma(1.0, [0.5, 0.5])


def test_verify_suite():
    assert "cl-red" in bcsp.suite_names()
    r = bcsp.verify("cl-red", n_max=6)
    assert r["failed"] == 0 and r["passed"] > 0
