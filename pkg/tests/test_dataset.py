import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import naive_distance, pearson
from sdfclass.dataset import (DataError, Dataset, Metric, correlation_weights, distance, interdistance_stat,
                              load_csv, write_csv)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_dataset_rejects_bad_labels():
    with pytest.raises(DataError):
        Dataset([[0.0], [1.0]], [1, 0])
    with pytest.raises(DataError):
        Dataset([[np.nan], [1.0]], [1, -1])
    with pytest.raises(DataError):
        Dataset(np.zeros((0, 2)), [])


def test_metric_validation():
    with pytest.raises(ValueError):
        Metric.weighted([0.0, 0.0])
    with pytest.raises(ValueError):
        Metric.weighted([1.0, -1.0])
    with pytest.raises(ValueError):
        Metric.weighted([1.0, np.inf])


def test_distance_examples():
    assert distance(Metric.euclidean(), (3, 4), (0, 0)) == 5.0
    assert distance(Metric.weighted([1, 0]), (3, 4), (0, 0)) == 3.0
    assert distance(Metric.weighted([2, 0.5]), (1, 1), (1, 1)) == 0.0


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        distance(Metric.euclidean(), (1, 2), (1, 2, 3))
    with pytest.raises(ValueError, match="weights"):
        distance(Metric.weighted([1, 1, 1]), (1, 2), (1, 2))


@settings(max_examples=200)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    arrays(float, n, elements=finite), arrays(float, n, elements=finite),
    arrays(float, n, elements=st.floats(0.01, 10)))))
def test_distance_properties(xyw):
    x, y, w = xyw
    for metric in (Metric.euclidean(), Metric.weighted(w)):
        assert distance(metric, x, y) == distance(metric, y, x)
        assert distance(metric, x, x) == 0.0
    assert distance(Metric.weighted(np.ones_like(x)), x, y) == pytest.approx(distance(Metric.euclidean(), x, y),
                                                                             rel=1e-12, abs=1e-12)
    assert distance(Metric.weighted(w), x, y) == pytest.approx(naive_distance(x, y, w), rel=1e-12, abs=1e-9)


def test_correlation_weights_examples():
    labels = np.array([1, -1, 1, -1])
    X = np.column_stack([labels, np.full(4, 3.0), [1, 1, -1, -1]])
    w = correlation_weights(Dataset(X, labels))
    assert w[0] == pytest.approx(1.0)
    assert w[1] == 0.0
    # hand computation: feature and labels are orthogonal after centring
    assert pearson([1, 1, -1, -1], [1, -1, 1, -1]) == 0.0
    assert w[2] == pytest.approx(0.0, abs=1e-15)


def test_correlation_weights_match_pearson(rng):
    X = rng.normal(size=(30, 5))
    y = np.where(rng.random(30) < 0.5, 1, -1)
    y[:2] = (1, -1)
    w = correlation_weights(Dataset(X, y))
    for k in range(5):
        assert w[k] == pytest.approx(abs(pearson(list(X[:, k]), list(y))), rel=1e-12)
    assert np.all((w >= 0) & (w <= 1))


@settings(max_examples=100)
@given(st.floats(0.01, 100), st.floats(-100, 100), st.integers(0, 3))
def test_correlation_weights_affine_invariant(scale, shift, col):
    rng = np.random.default_rng(7)
    X = rng.normal(size=(20, 4))
    y = np.array([1, -1] * 10)
    w0 = correlation_weights(Dataset(X, y))
    X2 = X.copy()
    X2[:, col] = scale * X2[:, col] + shift
    assert np.allclose(correlation_weights(Dataset(X2, y)), w0, rtol=1e-9, atol=1e-12)


def test_interdistance_examples():
    two = Dataset([[0.0], [2.0]], [1, -1])
    assert interdistance_stat(two, Metric.euclidean(), "mean") == 2.0
    assert interdistance_stat(two, Metric.euclidean(), "rmsd") == 2.0
    three = Dataset([[0.0], [1.0], [2.0]], [1, -1, 1])
    # pairs: 1, 2, 1
    assert interdistance_stat(three, Metric.euclidean(), "mean") == pytest.approx(4 / 3)
    assert interdistance_stat(three, Metric.euclidean(), "rmsd") == pytest.approx(math.sqrt(2))
    with pytest.raises(DataError):
        interdistance_stat(Dataset([[0.0]], [1]), Metric.euclidean())


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_load_csv_maps_labels(tmp_path):
    p = _write(tmp_path / "d.csv", "f1,cls,f2\n1.0,A,2\n3,B,4e-1\n-5,A,6\n")
    d = load_csv(p, "cls", "A")
    assert d.labels.tolist() == [1, -1, 1]
    assert d.points.tolist() == [[1.0, 2.0], [3.0, 0.4], [-5.0, 6.0]]
    assert d.feature_names == ("f1", "f2")
    assert load_csv(p, 1, "B").labels.tolist() == [-1, 1, -1]


def test_load_csv_errors(tmp_path):
    with pytest.raises(DataError, match="no such file"):
        load_csv(str(tmp_path / "missing.csv"), "y", "a")
    with pytest.raises(DataError, match="empty"):
        load_csv(_write(tmp_path / "e.csv", ""), "y", "a")
    with pytest.raises(DataError, match="not binary"):
        load_csv(_write(tmp_path / "t.csv", "x,y\n1,a\n2,b\n3,c\n"), "y", "a")
    with pytest.raises(DataError, match="not binary"):
        load_csv(_write(tmp_path / "o.csv", "x,y\n1,a\n2,a\n"), "y", "a")
    with pytest.raises(DataError, match=r"row 3, column 'x'"):
        load_csv(_write(tmp_path / "n.csv", "x,y\n1,a\nabc,b\n"), "y", "a")


def test_csv_round_trip(tmp_path, rng):
    X = rng.normal(size=(25, 3)) * 10.0 ** rng.integers(-8, 8, size=(25, 3))
    y = np.where(rng.random(25) < 0.5, 1, -1)
    y[:2] = (1, -1)
    d = Dataset(X, y)
    p = str(tmp_path / "rt.csv")
    write_csv(p, d)
    back = load_csv(p, "label", "1")
    assert np.array_equal(back.points, d.points)
    assert np.array_equal(back.labels, d.labels)
