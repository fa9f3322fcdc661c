import json
import math
import subprocess

import numpy as np
import pytest

import sublin


@pytest.fixture(scope="module")
def interval():
    return sublin.Domain.interval(1.0)


def test_certificate_reference_values(interval):
    cert = sublin.certificate(interval, q=0.5, p=3.0, C=1.0)
    assert cert["C1"] == 16.0 and cert["C2"] == 8.0
    assert abs(cert["r"] - 2.22144) < 1e-5
    assert abs(cert["lambda_star"] - 2.07483) < 1e-5
    half = sublin.certificate(interval, lam=0.5 * cert["lambda_star"])
    assert abs(half["rho"] - 1.85055) < 1e-5
    assert half["n_star"] == 3


def test_strauss_approximation():
    f = sublin.Nonlinearity("pure_power")
    fk = sublin.StraussApprox(f, 4)
    assert fk.breakpoint_gap() <= 1e-12
    assert fk.check_growth_bounds(2000).passed()
    s = np.linspace(-2, 2, 11)
    assert np.all(np.isfinite(fk(s)))
    errors = [sublin.StraussApprox(f, k).uniform_error() for k in (4, 16, 64)]
    assert errors[0] > errors[1] > errors[2] > 0


def test_solve_and_sphere(interval):
    cert = sublin.certificate(interval)
    lam = 0.5 * cert["lambda_star"]
    space = sublin.SpectralSpace(interval, 32)
    f = sublin.Nonlinearity("pure_power")
    prob = sublin.approx_problem(space, f, 0.5, lam, 16)
    assert prob.certified
    sol = sublin.solve(prob)
    assert sol["converged"]
    xi = np.asarray(sol["xi"])
    assert np.linalg.norm(xi) < prob.radius
    assert np.max(np.abs(prob.F(xi))) <= 1e-9
    assert sublin.sphere_check(prob, trials=100)["passed"]


def test_linear_closed_form(interval):
    space = sublin.SpectralSpace(interval, 5)
    prob = sublin.approx_problem(space, sublin.Nonlinearity("zero"), 0.5, 0.0, 2, certify=False)
    xi = np.asarray(sublin.solve(prob)["xi"])
    v = space.evaluate(xi, [0.5])
    assert abs(v[0] - 0.5 * 0.125) < 2e-3  # x(1-x)/(2n) at the midpoint


def test_reference_positive(interval):
    ref = sublin.reference(interval, m=32)
    assert ref["converged"]
    assert ref["min_interior"] > 0


def test_bad_config_raises(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"q": 0.5, "bogus": 1}))
    code, _, err = sublin.run_command("constants", str(path))
    assert code == 1 and err


def test_constants_command(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"domain": {"kind": "interval", "L": 1.0}, "q": 0.5}))
    code, out, _ = sublin.run_command("constants", str(path), str(tmp_path / "out"))
    assert code == 0
    assert math.isclose(json.loads(out)["lambda_star"], 2.074828740212081, rel_tol=1e-12)
