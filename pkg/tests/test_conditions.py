import math

import numpy as np
import pytest
from hypothesis import given, settings

from config.settings import GenConfig
from core.conditions import (
    Check,
    classify_margin,
    evaluate,
    evaluate_pair,
    group1,
    group2,
    group2_displayed,
    group5,
)
from core.errors import SolverError
from core.octa_model import (
    DiagonalSet,
    NaturalDevelopment,
    Octahedron3,
    develop,
    diagonals_of,
    iter_face_pairs,
    regular_development,
    same_side_products,
    validate_octahedron,
)
from genkit.generator import dent_vertex, random_octahedron
from solver.reconstruct import DiagonalSearch
from tests.conftest import generated, seeds


def test_group1_regular(regular_dev, regular_diag, tol):
    report = group1(regular_dev, regular_diag, tol)
    assert report.satisfied
    assert min(report.eq6_margins) > 0
    assert report.eq7_margin > 0
    assert max(abs(r) for r in report.residuals) <= 1e-12


def test_group1_flat_base_tetrahedron(regular_dev, tol):
    # при δ23 = √3 треугольники 012 и 013 лежат в одной плоскости
    r = math.sqrt(2.0)
    report = group1(regular_dev, DiagonalSet(d05=r, d14=r, d23=math.sqrt(3.0)), tol)
    assert report.eq7_margin == pytest.approx(0.0, abs=1e-12)
    assert not report.satisfied


@pytest.mark.parametrize("index", [0, 1, 2])
def test_group1_base_vanishes_at_interval_end(gen_cfg, tol, index):
    oct = generated(gen_cfg.seed, index)
    dev, diag = develop(oct), diagonals_of(oct)
    _, hi = DiagonalSearch(dev, tol).feasibility_interval()
    flat = DiagonalSet(d05=diag.d05, d14=diag.d14, d23=math.sqrt(hi * dev.scale))
    report = group1(dev, flat, tol)
    assert report.eq7_margin == pytest.approx(0.0, abs=1e-10)
    assert not report.satisfied


def test_group1_wrong_diagonals(regular_dev, tol):
    report = group1(regular_dev, DiagonalSet(1.5, 1.5, 1.5), tol)
    assert not report.satisfied


def test_group2_regular(regular_dev, regular_diag, tol):
    report = group2(regular_dev, regular_diag, tol)
    assert len(report.entries) == 24
    assert report.satisfied
    assert all(e.check == Check.PASS for e in report.entries)
    assert all(e.discriminant > 0 for e in report.entries)
    assert all(e.b_margin > 0 for e in report.entries)


def test_group2_dented(axis_oct, tol):
    v = np.array(axis_oct.vertices)
    v[2] = (0.2, 0.2, 0.2)
    oct = Octahedron3(v)
    report = group2(develop(oct), diagonals_of(oct), tol)
    assert not report.satisfied
    assert report.failed


def test_group2_scale_invariant(axis_oct, tol):
    dev, diag = develop(axis_oct), diagonals_of(axis_oct)
    a = group2(dev, diag, tol).margins
    b = group2(dev.scaled(7.0), diag.scaled(7.0), tol).margins
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_group2_degenerate_face_raises(tol):
    # грань {0,1,2} почти вырождена: A / scale^2 ниже порога
    edges = {key: 1.0 for key in regular_development().as_dict()}
    edges["01"] = 2.0 - 1e-12
    with pytest.raises(SolverError):
        group2(NaturalDevelopment(edges), DiagonalSet(1.0, 1.0, 1.0), tol)


@pytest.mark.parametrize("margin, expected", [
    (1e-3, Check.PASS),
    (-1e-3, Check.FAIL),
    (5e-10, Check.MARGINAL),
    (0.0, Check.MARGINAL),
])
def test_classify_margin(margin, expected):
    assert classify_margin(margin, 1e-9) == expected


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_group2_matches_halfspace_oracle(seed):
    oct = random_octahedron(GenConfig(seed=seed, noise=0.6))
    if validate_octahedron(oct):
        return
    report = group2(develop(oct), diagonals_of(oct))
    products = same_side_products(oct)
    for entry, product in zip(report.entries, products):
        if entry.check == Check.MARGINAL or abs(product) <= 1e-9:
            continue
        assert (entry.margin > 0) == (product > 0)


def test_group2_oracle_on_dented(gen_cfg):
    for index in range(5):
        oct = dent_vertex(generated(gen_cfg.seed, index), vertex=index % 6, depth=0.8)
        if validate_octahedron(oct):
            continue
        report = group2(develop(oct), diagonals_of(oct))
        products = same_side_products(oct)
        signs = [e.margin > 0 for e in report.entries if abs(e.margin) > 1e-9]
        expected = [p > 0 for e, p in zip(report.entries, products) if abs(e.margin) > 1e-9]
        assert signs == expected


def test_group2_displayed_variant(regular_dev, regular_diag, tol):
    report = group2_displayed(regular_dev, regular_diag, tol)
    assert report.variant == "displayed"
    assert len(report.entries) == 24
    assert [(e.face, e.pair) for e in report.entries] == list(iter_face_pairs())


def test_group5_identity_and_scaling(axis_oct, tol):
    dev, diag = develop(axis_oct), diagonals_of(axis_oct)
    same = group5(dev, diag, dev, diag, tol)
    assert same.alpha_hat == pytest.approx(1.0, rel=1e-12)
    assert same.spread <= 1e-12
    assert same.satisfied

    double = group5(dev, diag, dev.scaled(2.0), diag.scaled(2.0), tol)
    assert double.alpha_hat == pytest.approx(64.0, rel=1e-12)
    np.testing.assert_allclose(double.ratios, 64.0, rtol=1e-12)


def test_group5_regular_pair(regular_dev, regular_diag, tol):
    report = group5(regular_dev, regular_diag, regular_dev.scaled(2.0), regular_diag.scaled(2.0), tol)
    assert report.alpha_hat == pytest.approx(64.0, rel=1e-12)
    assert report.spread == pytest.approx(0.0, abs=1e-12)


def test_group5_reciprocal(gen_cfg, tol):
    p, q = generated(gen_cfg.seed, 0), generated(gen_cfg.seed, 1)
    ab = group5(develop(p), diagonals_of(p), develop(q), diagonals_of(q), tol)
    ba = group5(develop(q), diagonals_of(q), develop(p), diagonals_of(p), tol)
    assert ab.alpha_hat * ba.alpha_hat == pytest.approx(1.0, rel=1e-12)
    assert ab.spread > tol.alpha_no
    assert not ab.satisfied


def test_evaluate_pair_serializes(axis_oct, tol):
    dev, diag = develop(axis_oct), diagonals_of(axis_oct)
    report = evaluate_pair(dev, diag, dev.scaled(3.0), diag.scaled(3.0), tol)
    data = report.to_dict()
    assert set(data) >= {"group1", "group2", "group3", "group4", "group5", "satisfied"}
    assert data["satisfied"] is True
    assert data["group5"]["alpha_hat"] == pytest.approx(729.0, rel=1e-12)
    assert len(data["group2"]["margins"]) == 24


def test_evaluate_single(regular_dev, regular_diag, tol):
    report = evaluate(regular_dev, regular_diag, tol)
    assert report.group5 is None
    assert report.satisfied
    assert math.isfinite(report.to_dict()["group1"]["eq10_res"])
