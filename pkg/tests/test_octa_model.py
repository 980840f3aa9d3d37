import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings

from config.settings import GenConfig
from core.errors import DevelopmentError, GeometryError
from core.octa_model import (
    ANTIPODAL_PAIRS,
    EDGE_KEYS,
    EDGES,
    FACES,
    IDENTITY,
    SYMMETRIES,
    ConvexityStatus,
    Octahedron3,
    antipode,
    apexes_of_face,
    assemble_sdm,
    develop,
    diagonals_of,
    faces_of_edge,
    is_convex,
    is_hull_facet_set,
    regular_development,
    relabel_development,
    same_side_products,
    signed_face_distances,
    validate_development,
    validate_octahedron,
)
from genkit.generator import random_octahedron
from tests.conftest import seeds


def test_combinatorics():
    assert len(EDGES) == 12
    assert len(FACES) == 8
    assert EDGE_KEYS == ("01", "02", "03", "04", "12", "13", "15", "24", "25", "34", "35", "45")
    for edge in EDGES:
        assert len(faces_of_edge(edge)) == 2
    for face in FACES:
        assert set(apexes_of_face(face)).isdisjoint(face)
    with pytest.raises(ValueError):
        faces_of_edge((0, 5))


def test_symmetries_preserve_antipodes():
    assert len(set(SYMMETRIES)) == 48
    assert IDENTITY in SYMMETRIES
    for perm in SYMMETRIES:
        for a, b in ANTIPODAL_PAIRS:
            assert perm[b] == antipode(perm[a])


def test_validate_development_ok(regular_dev):
    raw = {key: 1.0 for key in EDGE_KEYS}
    assert validate_development(raw) == regular_dev


def test_validate_development_names_missing_key():
    raw = {key: 1.0 for key in EDGE_KEYS if key != "24"}
    with pytest.raises(DevelopmentError) as info:
        validate_development(raw)
    assert any("'24'" in v for v in info.value.violations)


def test_validate_development_collects_all_errors():
    raw = {key: 1.0 for key in EDGE_KEYS}
    raw["05"] = 1.0
    raw["12"] = -1.0
    raw["77"] = 1.0
    with pytest.raises(DevelopmentError) as info:
        validate_development(raw)
    assert len(info.value.violations) >= 3


def test_validate_development_triangle_inequality():
    raw = {key: 1.0 for key in EDGE_KEYS}
    raw["01"] = 2.0
    with pytest.raises(DevelopmentError) as info:
        validate_development(raw)
    assert any("{0,1,2}" in v for v in info.value.violations)


def test_reversed_keys_accepted():
    raw = {key[::-1]: 1.0 for key in EDGE_KEYS}
    assert validate_development(raw).as_dict() == {key: 1.0 for key in EDGE_KEYS}


def test_axis_octahedron(axis_oct):
    dev = develop(axis_oct)
    for key in EDGE_KEYS:
        assert dev[key] == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert diagonals_of(axis_oct).as_tuple() == pytest.approx((2.0, 2.0, 2.0))
    assert is_convex(axis_oct).status == ConvexityStatus.CONVEX
    assert is_hull_facet_set(axis_oct)
    assert validate_octahedron(axis_oct) == []


def test_dented_vertex_is_nonconvex(axis_oct):
    v = np.array(axis_oct.vertices)
    v[2] = (0.2, 0.2, 0.2)
    result = is_convex(Octahedron3(v))
    assert result.status == ConvexityStatus.NONCONVEX
    assert result.face == (0, 1, 2)
    assert result.offending_vertex == 3
    assert not is_hull_facet_set(Octahedron3(v))


def test_flattened_vertex_is_marginal(axis_oct):
    v = np.array(axis_oct.vertices)
    v[2] = (0.6, 0.6, -0.2)
    result = is_convex(Octahedron3(v))
    assert result.status == ConvexityStatus.MARGINAL
    assert result.min_margin <= 1e-9


def test_coplanar_adjacent_faces_reported(axis_oct):
    v = np.array(axis_oct.vertices)
    v[2] = (0.5, 0.5, 0.0)
    assert any("одной плоскости" in e for e in validate_octahedron(Octahedron3(v)))


def test_degenerate_octahedron():
    with pytest.raises(GeometryError):
        Octahedron3(np.zeros((5, 3)))
    with pytest.raises(GeometryError):
        develop(Octahedron3(np.zeros((6, 3))))


def test_relabel_development_roundtrip(axis_oct):
    v = np.array(axis_oct.vertices) * (1.0, 1.3, 0.7)
    dev = develop(Octahedron3(v))
    for perm in SYMMETRIES[:10]:
        inverse = tuple(perm.index(i) for i in range(6))
        assert relabel_development(relabel_development(dev, perm), inverse) == dev
    with pytest.raises(ValueError):
        relabel_development(dev, (0, 0, 1, 2, 3, 4))


def test_assemble_sdm(axis_oct):
    m = assemble_sdm(develop(axis_oct), diagonals_of(axis_oct))
    assert m.s[0, 5] == pytest.approx(4.0)
    assert m.s[0, 1] == pytest.approx(2.0)
    assert m.scale == pytest.approx(2.0)


def test_regular_development_scaling():
    dev = regular_development(2.0)
    assert dev.scale == pytest.approx(4.0)
    assert dev.scaled(0.5) == regular_development(1.0)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_convexity_agrees_with_hull(seed):
    oct = random_octahedron(GenConfig(seed=seed, noise=0.6))
    if validate_octahedron(oct):
        return
    result = is_convex(oct)
    if result.status == ConvexityStatus.MARGINAL:
        return
    assert result.is_convex == is_hull_facet_set(oct)


def test_signed_distances_shape(axis_oct):
    dist = signed_face_distances(axis_oct)
    assert dist.shape == (8, 3)
    products = same_side_products(axis_oct)
    assert products.shape == (24,)
    assert np.all(products > 0)


def test_face_pairs_cover_all():
    pairs = [(f, pq) for f in FACES for pq in itertools.combinations(apexes_of_face(f), 2)]
    assert len(pairs) == 24
