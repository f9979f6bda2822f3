import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdfclass.dataset import Dataset
from sdfclass.linear_sdf import (DegenerateModelError, LinearModel, fit_linear, iterate_linear, normalize,
                                 predict_linear)
from sdfclass.sdf_estimate import initial_estimates, midpoint_refine


def test_exact_fits():
    m = fit_linear([[-1.0], [1.0]], [-1.0, 1.0])
    assert m.w == pytest.approx([1.0]) and m.c == pytest.approx(0.0, abs=1e-15)
    m = fit_linear([[0, 0], [0, 2], [2, 0], [2, 2]], [-1, 1, -1, 1])
    assert m.w == pytest.approx([0.0, 1.0], abs=1e-14)
    assert m.c == pytest.approx(-1.0)


def test_minimum_norm_single_point():
    # min w^2 + c^2 subject to 2w + c = 1: gradient (w, c) parallel to (2, 1)
    m = fit_linear([[2.0]], [1.0])
    assert m.w[0] == pytest.approx(2 / 5)
    assert m.c == pytest.approx(1 / 5)


def test_fit_rejects_empty_dimension():
    with pytest.raises(ValueError):
        fit_linear(np.zeros((3, 0)), [1, 2, 3])


def test_exact_recovery(rng):
    for n in (1, 2, 5):
        X = rng.normal(size=(n + 6, n))
        w = rng.normal(size=n)
        m = fit_linear(X, X @ w + 0.7)
        assert np.allclose(m.w, w, rtol=1e-10, atol=1e-12)
        assert m.c == pytest.approx(0.7, rel=1e-10)


def test_fit_is_least_squares_optimal(rng):
    X = rng.normal(size=(30, 3))
    b = rng.normal(size=30)
    m = fit_linear(X, b)
    rss = np.sum((X @ m.w + m.c - b) ** 2)
    for _ in range(200):
        dw = rng.normal(scale=1e-3, size=3)
        dc = rng.normal(scale=1e-3)
        assert np.sum((X @ (m.w + dw) + m.c + dc - b) ** 2) >= rss


def test_normalize_examples():
    m = normalize(LinearModel(np.array([3.0, 4.0]), 5.0))
    assert m.w.tolist() == pytest.approx([0.6, 0.8]) and m.c == pytest.approx(1.0)
    assert m.normalized
    again = normalize(m)
    assert np.allclose(again.w, m.w) and again.c == pytest.approx(m.c)
    with pytest.raises(DegenerateModelError):
        normalize(LinearModel(np.zeros(2), 1.0))


@settings(max_examples=300)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v[:2]) > 1e-6),
       st.integers(0, 2**32 - 1))
def test_normalize_preserves_classification(wc, seed):
    model = LinearModel(np.array(wc[:2]), wc[2])
    X = np.random.default_rng(seed).uniform(-20, 20, size=(50, 2))
    assert np.array_equal(model.predict(X), normalize(model).predict(X))
    assert abs(np.linalg.norm(normalize(model).w) - 1) <= 1e-12


def test_predict_examples():
    m = LinearModel(np.array([0.0, 1.0]), -1.0)
    assert predict_linear(m, (5, 3)) == 2.0
    assert m.predict([5, 3]).tolist() == [1]
    assert predict_linear(m, (5, 1)) == 0.0
    assert m.predict([5, 1]).tolist() == [1]
    with pytest.raises(ValueError, match="dimension"):
        predict_linear(m, (1, 2, 3))


def test_normalized_value_is_plane_distance():
    m = normalize(LinearModel(np.array([1.0, 1.0]), -1.0))
    # distance from (2, 2) to x + y = 1 is 3 / sqrt(2)
    assert predict_linear(m, (2, 2)) == pytest.approx(3 / np.sqrt(2))


def test_iterations_zero_equals_plain_fit(rng):
    X = rng.uniform(-1, 1, size=(60, 2))
    d = Dataset(X, np.where(X[:, 1] > 0, 1, -1))
    ref = midpoint_refine(initial_estimates(d))
    a, b = iterate_linear(d, None, 0), fit_linear(X, ref.b)
    assert np.array_equal(a.w, b.w) and a.c == b.c


def test_iteration_fixed_point_when_partners_parallel():
    # every partner gap is vertical, and the fitted normal is vertical too
    X = np.array([[0, 1.0], [0, -1.0], [3, 2.0], [3, -2.0], [6, 1.0], [6, -1.0]])
    d = Dataset(X, np.where(X[:, 1] > 0, 1, -1))
    m0 = iterate_linear(d, None, 0)
    m3 = iterate_linear(d, None, 3)
    assert np.allclose(m0.w, m3.w, atol=1e-14) and m0.c == pytest.approx(m3.c, abs=1e-14)


def test_projection_never_exceeds_distance(rng):
    X = rng.uniform(-1, 1, size=(200, 2))
    d = Dataset(X, np.where(X[:, 1] > 0, 1, -1))
    est = initial_estimates(d)
    m = iterate_linear(d, None, 1)
    w = m.w / np.linalg.norm(m.w)
    proj = np.abs((X[est.opposite_index] - X) @ w)
    assert np.all(proj <= np.abs(est.b) * (1 + 1e-12))


def test_json_round_trip():
    m = LinearModel(np.array([0.25, -1.5]), 0.125, True)
    d = json.loads(m.to_json())
    assert d == {"type": "linear", "w": [0.25, -1.5], "c": 0.125, "normalized": True, "dim": 2}
    back = LinearModel.from_dict(d)
    assert np.array_equal(back.w, m.w) and back.c == m.c and back.normalized
