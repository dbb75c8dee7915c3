import math

import numpy as np
import pytest

import radonbl


def test_det_and_triangularize():
    t = np.array([[2.0, 1.0], [3.0, 4.0]])
    assert radonbl.det(t) == pytest.approx(5.0)
    e, u = radonbl.upper_triangularize(t)
    assert np.linalg.det(e) == pytest.approx(1.0)
    assert np.allclose(t @ e, u)
    assert abs(u[1, 0]) == 0.0


def test_loomis_whitney_constant_is_one():
    n, k, maps = radonbl.loomis_whitney(3)
    out = radonbl.bl_constant(n, k, maps)
    assert out["converged"]
    assert out["value"] == pytest.approx(1.0, rel=1e-6)


def test_vandermonde_value():
    spec = radonbl.moment_curve_spec(3)
    maps = radonbl.moment_curve_maps([0.0, 1.0, 2.0], 3)
    assert abs(radonbl.eval_phi(spec, maps)) == pytest.approx(12.0)


def test_input_error_is_value_error():
    with pytest.raises(ValueError):
        radonbl.bl_constant(3, 2, [np.ones((2, 3))])


def test_separated_points():
    pts = radonbl.separated_points([(0.0, 1.0), (2.0, 3.0)], 3)
    assert len(pts) == 3
    gaps = [abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]]
    assert min(gaps) >= 2.0 / 5.0 - 1e-12


def test_knapp_sweep_ratios_are_bounded():
    rows = radonbl.knapp_sweep("quadratic", deltas=[0.5, 0.25, 0.125], samples_x=20000, samples_t=32, seed=7)
    ratios = [r["ratio"] for r in rows]
    assert all(math.isfinite(r) and r > 0 for r in ratios)
    assert max(ratios) / min(ratios) < 1.5


def test_newton_on_circle():
    phi = lambda y: np.array([y[0] ** 2 + y[1] ** 2 - 1.0])
    jac = lambda y: np.array([[2.0 * y[0], 2.0 * y[1]]])
    x0 = np.array([1.02, 0.0])
    j = jac(x0)
    r_mat = j.T @ np.linalg.inv(j @ j.T)
    out = radonbl.newton_solve(phi, jac, x0, 0.1, r_mat, 0.5)
    assert abs(phi(out["root"])[0]) < 1e-12
    assert out["distance"] <= out["distance_bound"]


def test_normalized_defining_function():
    out = radonbl.normalize_defining_function("moment", 3, 1, np.ones((1, 1)), np.zeros(3), np.array([0.3]))
    assert out["gram_residual"] < 1e-8
