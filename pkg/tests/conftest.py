"""Общие фикстуры тестов"""

import json
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from config.settings import GenConfig, Tolerances, reset_settings
from core.octa_model import (
    DiagonalSet,
    EDGE_KEYS,
    Octahedron3,
    axis_octahedron,
    regular_development,
)
from genkit.generator import random_convex_octahedron


@pytest.fixture(autouse=True)
def fresh_settings():
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def tol() -> Tolerances:
    return Tolerances()


@pytest.fixture
def regular_dev():
    return regular_development(1.0)


@pytest.fixture
def regular_diag():
    r = math.sqrt(2.0)
    return DiagonalSet(r, r, r)


@pytest.fixture
def axis_oct() -> Octahedron3:
    return axis_octahedron()


@pytest.fixture
def gen_cfg() -> GenConfig:
    return GenConfig(seed=20240611)


@pytest.fixture
def write_json(tmp_path):
    def _write(name, payload):
        path = tmp_path / name
        text = payload if isinstance(payload, str) else json.dumps(payload)
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def infeasible_edges() -> dict:
    """
    Развертка без реализации в R³: |x1 x2| больше длины ломаной x1 x3 x4 x2
    (все треугольники граней при этом невырождены)
    """
    edges = {key: 1.0 for key in EDGE_KEYS}
    edges.update({"12": 1.99, "13": 0.1, "34": 0.1, "24": 0.1})
    return edges


def generated(seed: int, index: int = 0, noise: float = 0.25) -> Octahedron3:
    return random_convex_octahedron(GenConfig(seed=seed, noise=noise), index)


seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def rel_err(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
