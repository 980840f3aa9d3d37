"""
Генерация тестовых экземпляров
Случайные выпуклые октаэдры (возмущение осевого октаэдра + поворот),
случайные аффинные отображения, порча развертки, вдавливание вершины
Все генераторы детерминированы парой (seed, index)
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.spatial.transform import Rotation

from analyzer.affine_decision import AffineMap
from config.settings import GenConfig, Tolerances
from core.errors import GenerationError
from core.octa_model import (
    EDGE_KEYS,
    NaturalDevelopment,
    Octahedron3,
    antipode,
    axis_octahedron,
    is_convex,
    is_hull_facet_set,
    validate_development,
    validate_octahedron,
)


logger = logging.getLogger(__name__)

# независимые потоки случайных чисел для одного (seed, index)
_STREAM_OCTAHEDRON = 0
_STREAM_AFFINE = 1
_STREAM_MOTION = 2


def _rng(cfg: GenConfig, index: int, stream: int, attempt: int = 0) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, index, stream, attempt])


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    # нормированный гауссов кватернион равномерно распределен на SO(3)
    return Rotation.from_quat(rng.normal(size=4)).as_matrix()


def random_octahedron(cfg: GenConfig, index: int = 0, attempt: int = 0) -> Octahedron3:
    """Осевой октаэдр ±e1, ±e2, ±e3 с равномерным шумом и случайным поворотом; без фильтра"""
    rng = _rng(cfg, index, _STREAM_OCTAHEDRON, attempt)
    base = axis_octahedron().vertices
    noise = rng.uniform(-cfg.noise, cfg.noise, size=base.shape)
    rotation = _random_rotation(rng)
    return Octahedron3((base + noise) @ rotation.T)


def random_convex_octahedron(cfg: GenConfig, index: int = 0,
                             tol: Optional[Tolerances] = None) -> Octahedron3:
    """Выборка с отбраковкой: выпуклый, грани совпадают с гранями оболочки, соседние грани не компланарны"""
    tol = tol or Tolerances()

    for attempt in range(cfg.max_rejections):
        oct = random_octahedron(cfg, index, attempt)
        if validate_octahedron(oct, tol):
            continue
        if not is_convex(oct, tol).is_convex:
            continue
        if not is_hull_facet_set(oct):
            continue
        if attempt:
            logger.debug(f"🎲 Экземпляр {index}: принят после {attempt} отказов")
        return oct

    raise GenerationError(
        f"Не удалось получить выпуклый октаэдр за {cfg.max_rejections} попыток (noise={cfg.noise})"
    )


def random_affine(cfg: GenConfig, index: int = 0) -> AffineMap:
    """
    Линейная часть R1 diag(s) R2^T (не симметричная): |det| равномерен по логарифму в affine_det_range,
    число обусловленности не превосходит affine_cond_max; плюс случайный сдвиг
    """
    rng = _rng(cfg, index, _STREAM_AFFINE)
    lo, hi = cfg.affine_det_range

    log_det = rng.uniform(math.log(lo), math.log(hi)) if hi > lo else math.log(lo)
    half = 0.5 * math.log(cfg.affine_cond_max)
    logs = rng.uniform(-half, half, size=3)
    # сдвиг не меняет отношения сингулярных чисел
    logs += (log_det - logs.sum()) / 3.0
    singular = np.exp(logs)

    left, right = _random_rotation(rng), _random_rotation(rng)
    linear = left @ np.diag(singular) @ right.T
    translation = rng.uniform(-1.0, 1.0, size=3) * cfg.translation_scale
    return AffineMap(linear=linear, translation=translation)


def rigid_motion(cfg: GenConfig, index: int = 0) -> AffineMap:
    """Случайное собственное движение"""
    rng = _rng(cfg, index, _STREAM_MOTION)
    rotation = _random_rotation(rng)
    translation = rng.uniform(-1.0, 1.0, size=3) * cfg.translation_scale
    return AffineMap(linear=rotation, translation=translation)


def apply_affine(mapping: AffineMap, oct: Octahedron3) -> Octahedron3:
    return oct.transformed(mapping.linear, mapping.translation)


def dent_vertex(oct: Octahedron3, vertex: int, depth: float = 1.0) -> Octahedron3:
    """
    Отражение вершины через центр масс четырех ее соседей (depth = 1);
    depth задает, насколько далеко за центр уходит вершина
    """
    if not 0 <= vertex < 6:
        raise IndexError(f"Вершина {vertex} вне диапазона 0..5")
    v = np.array(oct.vertices)
    neighbours = [i for i in range(6) if i not in (vertex, antipode(vertex))]
    centre = v[neighbours].mean(axis=0)
    v[vertex] = centre + depth * (centre - v[vertex])
    return Octahedron3(v)


def perturb_development(dev: NaturalDevelopment, edge_key: str, factor: float) -> NaturalDevelopment:
    """Одно ребро умножается на factor; результат заново проверяется"""
    if edge_key not in EDGE_KEYS:
        raise KeyError(f"Неизвестное ребро '{edge_key}'")
    if not (factor > 0.0 and math.isfinite(factor)):
        raise ValueError(f"Множитель должен быть положительным, получено {factor}")

    raw = dev.as_dict()
    raw[edge_key] *= factor
    return validate_development(raw)
