import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.interpolate import BSpline

from pbgrid.bspline import (
    PBGrid,
    PersistenceVector,
    basis_functions,
    basis_matrix,
    basis_value,
    curve_basis_matrix,
    eval_curve,
    eval_surface,
    from_vector,
    knot_vector,
    reconstruct_surface,
    to_vector,
    vector_from_json,
    vector_to_json,
    write_height_field,
)

from strategies import sites, unit


def scipy_basis(t, h):
    """Independent oracle: scipy's de Boor evaluation on the same knots."""
    U = knot_vector(h).knots
    return BSpline.design_matrix(np.atleast_1d(t), U, 3).toarray()


def test_knot_vector_examples():
    np.testing.assert_allclose(knot_vector(6).knots, [0, 0, 0, 0, 1 / 3, 2 / 3, 1, 1, 1, 1])
    np.testing.assert_allclose(knot_vector(5).knots, [0, 0, 0, 0, 0.5, 1, 1, 1, 1])
    with pytest.raises(ValueError):
        knot_vector(4)


@pytest.mark.parametrize("h", [5, 6, 9, 20, 37])
def test_knot_count_gives_h_functions(h):
    kv = knot_vector(h)
    assert len(kv.knots) == h + 4
    assert kv.h == h


def test_endpoint_values():
    kv = knot_vector(7)
    assert basis_value(0, 0.0, kv) == 1.0
    assert all(basis_value(i, 0.0, kv) == 0.0 for i in range(1, 7))
    assert basis_value(6, 1.0, kv) == 1.0
    assert all(basis_value(i, 1.0, kv) == 0.0 for i in range(6))


def test_recursion_partition_at_037():
    kv = knot_vector(8)
    assert sum(basis_value(i, 0.37, kv) for i in range(8)) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("h", [9, 12, 20])
def test_interior_knot_values(h):
    kv = knot_vector(h)
    j = (h - 3) // 2
    t = j / (h - 3)
    vals = np.array([basis_value(i, t, kv) for i in range(h)])
    nz = vals[vals > 0]
    np.testing.assert_allclose(nz, [1 / 6, 4 / 6, 1 / 6], atol=1e-12)
    np.testing.assert_allclose(basis_functions(t, h)[0][vals > 0], nz, atol=1e-15)


@given(st.integers(5, 14), st.lists(unit, min_size=1, max_size=20))
def test_span_evaluator_matches_recursion(h, ts):
    kv = knot_vector(h)
    fast = basis_functions(ts, h)
    ref = np.array([[basis_value(i, t, kv) for i in range(h)] for t in ts])
    np.testing.assert_allclose(fast, ref, atol=1e-14)


@given(st.integers(5, 40), st.lists(unit, min_size=1, max_size=30))
def test_matches_scipy(h, ts):
    np.testing.assert_allclose(basis_functions(ts, h), scipy_basis(ts, h), atol=1e-14)


@given(st.integers(5, 60), st.lists(unit, min_size=1, max_size=30))
def test_local_support_and_nonnegativity(h, ts):
    B = basis_functions(ts, h)
    assert np.all(B >= 0)
    assert np.all((B > 0).sum(axis=1) <= 4)
    np.testing.assert_allclose(B.sum(axis=1), 1.0, atol=1e-12)


def test_parameters_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        basis_functions([1.2], 6)
    with pytest.raises(ValueError):
        basis_matrix([(0.5, -0.1)], 6)


def test_basis_matrix_corner_sites():
    B = basis_matrix([(0, 0)], 5).toarray()
    assert B[0, 0] == 1 and B.sum() == 1
    B = basis_matrix([(1, 1)], 5).toarray()
    assert B[0, 24] == 1 and B.sum() == 1


@given(sites, st.integers(5, 12))
def test_basis_matrix_is_tensor_product(S, h):
    B = basis_matrix(S, h)
    assert B.shape == (len(S), h * h)
    Bs, Bt = scipy_basis(S[:, 0], h), scipy_basis(S[:, 1], h)
    ref = np.einsum("li,lj->lij", Bs, Bt).reshape(len(S), h * h)
    np.testing.assert_allclose(B.toarray(), ref, atol=1e-14)
    assert np.all(np.diff(B.entries.indptr) <= 16)
    np.testing.assert_allclose(np.asarray(B.entries.sum(axis=1)).ravel(), 1.0, atol=1e-12)


def test_curve_basis_matrix_matches_dense():
    t = np.linspace(0, 1, 11)
    np.testing.assert_array_equal(curve_basis_matrix(t, 7).toarray(), basis_functions(t, 7))


def test_eval_surface_examples(rng):
    s, t = rng.uniform(0, 1, 50), rng.uniform(0, 1, 50)
    np.testing.assert_allclose(eval_surface(PBGrid(np.full((6, 6), 2.5)), s, t), 2.5, atol=1e-13)
    assert np.all(eval_surface(PBGrid(np.zeros((6, 6))), s, t) == 0)
    P = np.zeros((6, 6))
    P[0, 0] = 1
    assert eval_surface(PBGrid(P), 0.0, 0.0) == 1.0


@given(st.integers(5, 10), st.integers(0, 2**32 - 1), sites)
def test_eval_surface_is_linear_and_matches_oracle(h, seed, S):
    r = np.random.default_rng(seed)
    A, B = r.normal(size=(h, h)), r.normal(size=(h, h))
    s, t = S[:, 0], S[:, 1]
    lhs = eval_surface(PBGrid(A + B), s, t)
    np.testing.assert_allclose(lhs, eval_surface(PBGrid(A), s, t) + eval_surface(PBGrid(B), s, t), atol=1e-13)
    ref = np.einsum("li,ij,lj->l", scipy_basis(s, h), A, scipy_basis(t, h))
    np.testing.assert_allclose(eval_surface(PBGrid(A), s, t), ref, atol=1e-13)


def test_eval_surface_batch_independent(rng):
    grid = PBGrid(rng.normal(size=(9, 9)))
    s, t = rng.uniform(0, 1, 40), rng.uniform(0, 1, 40)
    full = eval_surface(grid, s, t)
    assert all(eval_surface(grid, s[i], t[i]) == full[i] for i in range(40))


def test_eval_curve_examples():
    assert eval_curve(np.full(7, 3.0), 0.42) == pytest.approx(3.0, abs=1e-14)
    assert eval_curve([1, 0, 0, 0, 0], 0.0) == 1.0
    assert eval_curve([0, 0, 0, 0, 1], 1.0) == 1.0


def test_vector_ordering_and_round_trip(rng):
    v = to_vector(PBGrid([[1, 2], [3, 4]]))
    np.testing.assert_array_equal(v.values, [1, 2, 3, 4])
    G = rng.normal(size=(20, 20))
    np.testing.assert_array_equal(from_vector(to_vector(PBGrid(G))).heights, G)
    with pytest.raises(ValueError):
        from_vector(np.ones(5))


def test_grid_validation():
    with pytest.raises(ValueError):
        PBGrid(np.ones((3, 4)))
    with pytest.raises(ValueError):
        PBGrid([[np.nan]])


def test_reconstruct_examples(rng):
    assert np.all(reconstruct_surface(np.zeros(36), 7) == 0)
    np.testing.assert_allclose(reconstruct_surface(np.full(36, 1.5), 7), 1.5, atol=1e-14)
    v = PersistenceVector(rng.normal(size=64))
    F = reconstruct_surface(v, 9)
    u = np.arange(9) / 8
    for a in (0, 3, 8):
        for b in (0, 5, 8):
            assert F[a, b] == eval_surface(from_vector(v), u[a], u[b])
    with pytest.raises(ValueError):
        reconstruct_surface(v, 1)


def test_vector_json_round_trip(rng):
    v = PersistenceVector(rng.normal(size=25))
    text = vector_to_json(v, id="a")
    obj = json.loads(text)
    assert obj["id"] == "a" and obj["h"] == 5 and len(obj["values"]) == 25
    assert np.array_equal(vector_from_json(text).values, v.values)
    with pytest.raises(ValueError):
        vector_from_json('{"h": 4, "values": [0, 0, 0, 0]}')


def test_height_field_csv(tmp_path):
    F = np.arange(6.0).reshape(2, 3) / 7
    write_height_field(F, tmp_path / "f.csv")
    back = np.loadtxt(tmp_path / "f.csv", delimiter=",")
    np.testing.assert_array_equal(back, F)
