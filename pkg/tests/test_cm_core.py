import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.cm_core import (
    SquaredDistanceMatrix,
    cm_batch,
    cm_cross_batch,
    cm_determinant,
    cm_quadratic,
    embed_six_points,
    gram_volume_sq,
    menger_conditions,
    simplex_volume_sq,
)
from core.errors import EmbeddingError, NonEmbeddableError
from core.octa_model import axis_octahedron
from tests.conftest import seeds


def with_entry(m, i, j, value):
    s = m.s.copy()
    s[i, j] = s[j, i] = value
    return SquaredDistanceMatrix(s)


def random_semimetric(seed, n):
    rng = np.random.default_rng(seed)
    s = np.triu(rng.uniform(0.5, 2.0, size=(n, n)), 1)
    return SquaredDistanceMatrix(s + s.T)


def ones(n):
    s = np.ones((n, n))
    np.fill_diagonal(s, 0.0)
    return SquaredDistanceMatrix(s)


def test_two_points_at_distance_two():
    m = SquaredDistanceMatrix(np.array([[0.0, 4.0], [4.0, 0.0]]))
    assert cm_determinant([0, 1], m).value == pytest.approx(8.0, rel=1e-12)


@pytest.mark.parametrize("n, expected", [(3, -3.0), (4, 4.0), (5, -5.0), (6, 6.0)])
def test_unit_simplices(n, expected):
    m = ones(n)
    assert cm_determinant(range(n), m).value == pytest.approx(expected, rel=1e-12)


def test_volume_normalization():
    assert simplex_volume_sq([0, 1, 2], ones(3)) == pytest.approx(3.0 / 16.0, rel=1e-12)
    assert simplex_volume_sq([0, 1, 2, 3], ones(4)) == pytest.approx(1.0 / 72.0, rel=1e-12)


def test_impossible_sign_raises():
    # стороны 1, 1, 3: треугольника не существует
    s = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 9.0], [1.0, 9.0, 0.0]])
    with pytest.raises(NonEmbeddableError):
        simplex_volume_sq([0, 1, 2], SquaredDistanceMatrix(s))


def test_subset_validation():
    m = ones(4)
    with pytest.raises(IndexError):
        cm_determinant([0, 7], m)
    with pytest.raises(ValueError):
        cm_determinant([0, 0, 1], m)


def test_matrix_validation():
    with pytest.raises(ValueError):
        SquaredDistanceMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        SquaredDistanceMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(ValueError):
        SquaredDistanceMatrix(np.zeros((8, 8)))


def test_batch_matches_single(axis_oct):
    m = SquaredDistanceMatrix.from_points(axis_oct.vertices)
    blocks = np.stack([m.block([0, 1, 2, 3]), m.block([1, 2, 3, 5])])
    expected = [cm_determinant([0, 1, 2, 3], m).value, cm_determinant([1, 2, 3, 5], m).value]
    np.testing.assert_allclose(cm_batch(blocks), expected, rtol=1e-12)


points6 = st.lists(
    st.lists(st.floats(min_value=-5.0, max_value=5.0, allow_nan=False), min_size=3, max_size=3),
    min_size=6, max_size=6,
)


@given(points6)
@settings(max_examples=60, deadline=None)
def test_volume_matches_gram(points):
    p = np.array(points)
    sq = np.sum((p[:, None] - p[None]) ** 2, axis=-1)
    if np.min(sq[~np.eye(6, dtype=bool)]) < 1e-2:
        return
    m = SquaredDistanceMatrix.from_points(p)
    expected = gram_volume_sq(p[:4])
    got = simplex_volume_sq([0, 1, 2, 3], m)
    assert got == pytest.approx(expected, rel=1e-6, abs=1e-9 * m.scale ** 3)


def test_quadratic_coefficients(axis_oct):
    m = SquaredDistanceMatrix.from_points(axis_oct.vertices)
    subset = [0, 1, 2, 3, 4]
    a, b, c = cm_quadratic(subset, m, (1, 4))
    assert a == pytest.approx(-cm_determinant([0, 2, 3], m).value, rel=1e-12)

    t = m.s[1, 4]
    assert a * t * t + b * t + c == pytest.approx(cm_determinant(subset, m).value, abs=1e-10)

    t2 = 3.7
    shifted = with_entry(m, 1, 4, t2)
    assert a * t2 * t2 + b * t2 + c == pytest.approx(cm_determinant(subset, shifted).value, rel=1e-10)


def test_menger_on_axis_octahedron(axis_oct, tol):
    m = SquaredDistanceMatrix.from_points(axis_oct.vertices)
    report = menger_conditions(m, tol)
    assert report.satisfied
    assert all(v > 0 for v in report.strict_inequalities)
    assert max(abs(r) for r in report.equalities) <= 1e-12


def test_menger_scale_invariant(axis_oct, tol):
    m = SquaredDistanceMatrix.from_points(axis_oct.vertices)
    a = menger_conditions(m, tol)
    b = menger_conditions(m.scaled(49.0), tol)
    np.testing.assert_allclose(a.strict_inequalities, b.strict_inequalities, rtol=1e-10)


def test_embedding_reproduces_distances(axis_oct, tol):
    m = SquaredDistanceMatrix.from_points(axis_oct.vertices)
    emb = embed_six_points(m, tol)
    got = SquaredDistanceMatrix.from_points(emb.points)
    np.testing.assert_allclose(got.s, m.s, atol=1e-12)
    assert emb.points[1, 1:] == pytest.approx([0.0, 0.0])
    assert emb.points[3, 2] > 0.0


def test_embedding_degenerate_base(tol):
    pts = np.array([
        [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0],
        [1.0, 1.0, 0.0], [0.3, 0.2, 1.0], [0.5, 0.5, -1.0],
    ])
    with pytest.raises(EmbeddingError) as info:
        embed_six_points(SquaredDistanceMatrix.from_points(pts), tol)
    assert info.value.reason == "degenerate base simplex"


def test_embedding_inconsistent(axis_oct, tol):
    m = with_entry(SquaredDistanceMatrix.from_points(axis_oct.vertices), 4, 5, 3.0)
    with pytest.raises(EmbeddingError) as info:
        embed_six_points(m, tol)
    assert info.value.reason == "inconsistent input"
    assert not menger_conditions(m, tol).satisfied
    assert math.isfinite(m.scale)


@given(seeds, st.integers(min_value=2, max_value=7), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_permutation_invariance(seed, n, rnd):
    m = random_semimetric(seed, n)
    order = list(range(n))
    rnd.shuffle(order)
    base = cm_determinant(range(n), m).value
    assert cm_determinant(order, m).value == pytest.approx(base, rel=1e-9, abs=1e-12)


@given(seeds, st.integers(min_value=1, max_value=5), st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=80, deadline=None)
def test_homogeneity(seed, k, lam):
    m = random_semimetric(seed, 6)
    subset = list(range(k + 1))
    base = cm_determinant(subset, m).value
    scaled = cm_determinant(subset, m.scaled(lam)).value
    assert scaled == pytest.approx(lam ** k * base, rel=1e-9, abs=1e-12 * lam ** k)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_cross_minor_identity(seed):
    m = random_semimetric(seed, 6)
    cm6 = cm_determinant(range(6), m).value
    cm4 = cm_determinant([0, 1, 2, 3], m).value
    cm5a = cm_determinant([0, 1, 2, 3, 4], m).value
    cm5b = cm_determinant([0, 1, 2, 3, 5], m).value
    x = float(cm_cross_batch(m.s, 5, 4))
    lhs, rhs = cm6 * cm4, cm5a * cm5b - x * x
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-10 * (abs(cm5a * cm5b) + x * x))


def test_cross_minor_vanishes_on_octahedron(axis_oct):
    m = SquaredDistanceMatrix.from_points(axis_oct.vertices)
    assert abs(float(cm_cross_batch(m.s, 5, 4))) <= 1e-12
    # неверное расстояние x4 x5 дает простой, а не двойной ноль
    lo = float(cm_cross_batch(with_entry(m, 4, 5, 1.9).s, 5, 4))
    hi = float(cm_cross_batch(with_entry(m, 4, 5, 2.1).s, 5, 4))
    assert lo * hi < 0.0
