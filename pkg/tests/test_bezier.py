import json

import numpy as np
import pytest

from bezier_mopt.bezier import (BezierSimplex, SingularFitError, design_matrix,
                                fit_least_squares, fit_normal_equations,
                                load_model, save_model)
from bezier_mopt.simplex import enumerate_multi_indices, sample_uniform_simplex


def random_model(rng, m=3, d=3, ambient=3):
    basis = enumerate_multi_indices(m, d)
    control = rng.uniform(-1.0, 1.0, size=(basis.size, ambient))
    return BezierSimplex(basis=basis, control_points=control)


def test_constant_control_points_evaluate_to_that_point():
    basis = enumerate_multi_indices(3, 3)
    point = np.array([1.5, -2.0, 0.25])
    model = BezierSimplex(basis=basis, control_points=np.tile(point, (basis.size, 1)))
    for t in sample_uniform_simplex(3, 20, 3):
        assert np.allclose(model.evaluate(t), point, atol=1e-14)


def test_vertex_evaluation_returns_vertex_control_point():
    rng = np.random.default_rng(0)
    model = random_model(rng)
    for m in range(3):
        t = np.zeros(3)
        t[m] = 1.0
        row = model.basis.vertex_position(m)
        assert np.array_equal(model.evaluate(t), model.control_points[row])


def test_degree_one_is_affine():
    rng = np.random.default_rng(1)
    basis = enumerate_multi_indices(3, 1)
    control = rng.normal(size=(3, 4))
    model = BezierSimplex(basis=basis, control_points=control)
    for t in sample_uniform_simplex(3, 10, 4):
        # degree-1 exponent rows are unit vectors: descending lex order puts
        # e_1 first, so the map is t |-> sum_m t_m p_(e_m)
        expected = t @ control[[basis.vertex_position(m) for m in range(3)]]
        assert np.allclose(model.evaluate(t), expected, atol=1e-14)


def test_design_matrix_rows_and_errors():
    basis = enumerate_multi_indices(2, 2)
    z = design_matrix([[0.5, 0.5]], basis)
    assert np.allclose(z, [[0.25, 0.5, 0.25]], atol=1e-15)
    vertex = design_matrix([[1.0, 0.0]], basis)
    assert np.array_equal(vertex, [[1.0, 0.0, 0.0]])

    batch = sample_uniform_simplex(2, 40, 9)
    rows = design_matrix(batch, basis)
    assert np.abs(rows.sum(axis=1) - 1.0).max() < 1e-12

    with pytest.raises(ValueError):
        design_matrix(np.empty((0, 2)), basis)
    with pytest.raises(ValueError):
        design_matrix([[0.3, 0.3, 0.4]], basis)


def test_planted_model_exact_recovery():
    rng = np.random.default_rng(42)
    basis = enumerate_multi_indices(3, 3)
    for trial in range(5):
        planted = rng.uniform(-1.0, 1.0, size=(basis.size, 3))
        model = BezierSimplex(basis=basis, control_points=planted)
        weights = sample_uniform_simplex(3, 20, 100 + trial)
        points = model.evaluate_batch(weights)
        fitted = fit_least_squares(weights, points, basis)
        assert np.linalg.norm(fitted.control_points - planted) < 1e-8


def test_residual_orthogonality():
    rng = np.random.default_rng(3)
    basis = enumerate_multi_indices(3, 3)
    weights = sample_uniform_simplex(3, 40, 17)
    points = rng.normal(size=(40, 3))
    fitted = fit_least_squares(weights, points, basis)
    z = design_matrix(weights, basis)
    residual = points - z @ fitted.control_points
    assert np.linalg.norm(z.T @ residual) < 1e-8 * np.linalg.norm(z.T @ points)


def test_underdetermined_fit_raises():
    basis = enumerate_multi_indices(3, 3)
    weights = sample_uniform_simplex(3, 5, 0)
    points = np.zeros((5, 3))
    with pytest.raises(SingularFitError) as err:
        fit_least_squares(weights, points, basis)
    assert err.value.smallest_singular_value == 0.0


def test_duplicate_rows_raise_singular():
    basis = enumerate_multi_indices(3, 3)
    weights = np.tile(sample_uniform_simplex(3, 1, 0), (12, 1))
    with pytest.raises(SingularFitError):
        fit_least_squares(weights, np.zeros((12, 3)), basis)


def test_fit_idempotence():
    rng = np.random.default_rng(5)
    basis = enumerate_multi_indices(3, 3)
    weights = sample_uniform_simplex(3, 30, 21)
    points = rng.normal(size=(30, 3))
    first = fit_least_squares(weights, points, basis)
    fresh = sample_uniform_simplex(3, 30, 22)
    refit = fit_least_squares(fresh, first.evaluate_batch(fresh), basis)
    assert np.linalg.norm(refit.control_points - first.control_points) < 1e-8


def test_qr_and_normal_equations_agree():
    rng = np.random.default_rng(6)
    basis = enumerate_multi_indices(3, 3)
    for trial in range(10):
        weights = sample_uniform_simplex(3, 50, 300 + trial)
        z = design_matrix(weights, basis)
        sv = np.linalg.svd(z, compute_uv=False)
        assert sv[0] / sv[-1] < 1e6  # well-conditioned instance
        points = rng.normal(size=(50, 3))
        a = fit_least_squares(weights, points, basis)
        b = fit_normal_equations(weights, points, basis)
        assert np.linalg.norm(a.control_points - b.control_points) < 1e-6


def test_convex_hull_property():
    rng = np.random.default_rng(8)
    model = random_model(rng)
    weights = sample_uniform_simplex(3, 1000, 33)
    values = model.evaluate_batch(weights)
    lo = model.control_points.min(axis=0)
    hi = model.control_points.max(axis=0)
    assert np.all(values >= lo - 1e-12)
    assert np.all(values <= hi + 1e-12)


def test_serialize_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(9)
    model = random_model(rng)
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert np.array_equal(loaded.control_points, model.control_points)
    assert np.array_equal(loaded.basis.exponents, model.basis.exponents)


def test_deserialize_rejects_bad_documents(tmp_path):
    rng = np.random.default_rng(10)
    model = random_model(rng)
    doc = model.to_dict()

    short = dict(doc, control_points=doc["control_points"][:9])
    with pytest.raises(ValueError):
        BezierSimplex.from_dict(short)

    shuffled = dict(doc, index_order=list(reversed(doc["index_order"])))
    with pytest.raises(ValueError):
        BezierSimplex.from_dict(shuffled)

    for key in ("M", "D", "L", "index_order", "control_points"):
        broken = dict(doc)
        del broken[key]
        with pytest.raises(ValueError):
            BezierSimplex.from_dict(broken)


def test_zero_model_round_trip_evaluates_to_zero(tmp_path):
    basis = enumerate_multi_indices(3, 3)
    model = BezierSimplex(basis=basis, control_points=np.zeros((basis.size, 3)))
    path = tmp_path / "zero.json"
    save_model(model, path)
    loaded = load_model(path)
    for t in sample_uniform_simplex(3, 5, 0):
        assert np.array_equal(loaded.evaluate(t), np.zeros(3))


def test_model_json_schema_fields(tmp_path):
    basis = enumerate_multi_indices(2, 2)
    model = BezierSimplex(basis=basis, control_points=np.ones((3, 2)))
    path = tmp_path / "m.json"
    save_model(model, path)
    doc = json.loads(path.read_text())
    assert set(doc) == {"M", "D", "L", "index_order", "control_points"}
    assert doc["M"] == 2 and doc["D"] == 2 and doc["L"] == 2


def test_rejects_nonfinite_control_points():
    basis = enumerate_multi_indices(2, 2)
    bad = np.ones((3, 2))
    bad[1, 1] = np.inf
    with pytest.raises(ValueError):
        BezierSimplex(basis=basis, control_points=bad)
