"""
Решение об аффинной эквивалентности двух выпуклых октаэдров по их разверткам
Обе развертки восстанавливаются независимо, затем проверяется пятая группа
условий и строится явное аффинное отображение как сертификат
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import Tolerances
from core.cm_core import EmbeddingResult, gram_volume_sq
from core.conditions import Group5Report, group5_from_sdm
from core.errors import SolverError
from core.octa_model import (
    EDGES,
    IDENTITY,
    SYMMETRIES,
    NaturalDevelopment,
    assemble_sdm,
    relabel_development,
)
from solver.reconstruct import ReconstructionResult, ReconstructionStatus, reconstruct


logger = logging.getLogger(__name__)


class Verdict:
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not_equivalent"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class AffineMap:
    """x -> linear @ x + translation"""
    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        lin = np.array(self.linear, dtype=float).reshape(3, 3)
        t = np.array(self.translation, dtype=float).reshape(3)
        lin.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", t)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.linear.T + self.translation

    def to_dict(self) -> Dict:
        return {
            "linear": [[float(c) for c in row] for row in self.linear],
            "translation": [float(c) for c in self.translation],
            "det": self.det,
        }


@dataclass
class Decision:
    """Вердикт и все данные, на которых он основан"""
    verdict: str
    alpha_hat: Optional[float]
    ratios: List[float]
    spread: Optional[float]
    map_residual: Optional[float]
    affine_map: Optional[AffineMap]
    reconstructions: Tuple[ReconstructionResult, ReconstructionResult]
    details: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        a, b = self.reconstructions
        details = {
            "spread": self.spread,
            "status_a": a.status,
            "status_b": b.status,
            "diagonals_a": a.diagonals.as_dict() if a.diagonals else None,
            "diagonals_b": b.diagonals.as_dict() if b.diagonals else None,
            "map": self.affine_map.to_dict() if self.affine_map is not None else None,
        }
        details.update(self.details)
        return {
            "format": "decision/1",
            "verdict": self.verdict,
            "alpha": self.alpha_hat,
            "ratios": list(self.ratios),
            "map_residual": self.map_residual,
            "details": details,
        }


def _length_scale(points: np.ndarray) -> float:
    """Корень из среднего квадрата длины ребра"""
    return math.sqrt(float(np.mean([np.sum((points[i] - points[j]) ** 2) for i, j in EDGES])))


def recover_affine_map(emb_a: EmbeddingResult, emb_b: EmbeddingResult,
                       tol: Optional[Tolerances] = None) -> Tuple[AffineMap, float]:
    """
    Аффинное отображение, переводящее точки 0-3 первого вложения в точки 0-3 второго;
    невязка на точках 4 и 5 в единицах длины второго октаэдра
    """
    tol = tol or Tolerances()
    p = np.asarray(emb_a.points, dtype=float)
    q = np.asarray(emb_b.points, dtype=float)

    length = _length_scale(p)
    vol6 = abs(np.linalg.det(p[1:4] - p[0]))
    if vol6 / length ** 3 <= tol.eps_geom:
        raise SolverError("Опорный тетраэдр x0..x3 вырожден: отображение не определено")

    # [p_i, 1] @ M = q_i, i = 0..3
    hom = np.hstack([p[:4], np.ones((4, 1))])
    m = np.linalg.solve(hom, q[:4])
    mapping = AffineMap(linear=m[:3].T, translation=m[3])

    mismatch = np.linalg.norm(mapping.apply(p[4:6]) - q[4:6], axis=1)
    residual = float(np.max(mismatch)) / _length_scale(q)
    return mapping, residual


def height_certificate(emb_a: EmbeddingResult, emb_b: EmbeddingResult, alpha: float) -> float:
    """
    Высоты вершин x4, x5 над плоскостями (x0, x1, x_k), k = 2, 3:
    h' * area' = sqrt(alpha) * h * area для всех четырех пар (k, j).
    Возвращает максимальное относительное расхождение.
    """
    p = np.asarray(emb_a.points, dtype=float)
    q = np.asarray(emb_b.points, dtype=float)
    root = math.sqrt(alpha)
    worst = 0.0

    for k in (2, 3):
        for j in (4, 5):
            # h * area = 3 vol, поэтому сравниваются объемы тетраэдров (0, 1, k, j)
            vol_a = math.sqrt(max(gram_volume_sq(p[[0, 1, k, j]]), 0.0))
            vol_b = math.sqrt(max(gram_volume_sq(q[[0, 1, k, j]]), 0.0))
            if vol_a == 0.0:
                return float("inf")
            worst = max(worst, abs(vol_b / (root * vol_a) - 1.0))

    return worst


def _verdict_from_group5(g5: Group5Report, map_residual: float, tol: Tolerances) -> str:
    if not g5.signs_ok or g5.spread >= tol.alpha_no:
        return Verdict.NOT_EQUIVALENT
    if g5.spread <= tol.alpha_yes and map_residual <= tol.map_tol:
        return Verdict.EQUIVALENT
    return Verdict.INDETERMINATE


def decide_reconstructed(ra: ReconstructionResult, rb: ReconstructionResult,
                         tol: Optional[Tolerances] = None) -> Decision:
    """Решение по уже восстановленным октаэдрам"""
    tol = tol or Tolerances()

    if not (ra.is_unique and rb.is_unique):
        statuses = {ra.status, rb.status}
        details = {}
        if statuses == {ReconstructionStatus.NONE, ReconstructionStatus.UNIQUE}:
            verdict = Verdict.NOT_EQUIVALENT
            details["diagnostic"] = "no realization"
        else:
            verdict = Verdict.INDETERMINATE
            details["diagnostic"] = "reconstruction not unique"
        logger.info(f"⚠️ Восстановление: {ra.status} / {rb.status} -> {verdict}")
        return Decision(verdict, None, [], None, None, None, (ra, rb), details)

    m_a = assemble_sdm(ra.development, ra.diagonals)
    m_b = assemble_sdm(rb.development, rb.diagonals)
    try:
        g5 = group5_from_sdm(m_a, m_b, tol)
    except SolverError as e:
        logger.warning(f"⚠️ Пятая группа не вычислена: {e}")
        return Decision(Verdict.INDETERMINATE, None, [], None, None, None, (ra, rb),
                        {"diagnostic": str(e)})

    mapping, residual = recover_affine_map(ra.embedding, rb.embedding, tol)
    verdict = _verdict_from_group5(g5, residual, tol)

    details = {"signs_ok": g5.signs_ok}
    if g5.alpha_hat is not None:
        details["height_mismatch"] = height_certificate(ra.embedding, rb.embedding, g5.alpha_hat)
    if g5.spread <= tol.alpha_yes and residual > tol.map_tol:
        details["diagnostic"] = "group 5 satisfied but affine map residual too large"
        logger.warning(f"⚠️ Разброс отношений {g5.spread:.2e}, но невязка отображения {residual:.2e}")

    logger.debug(f"📐 alpha={g5.alpha_hat}, spread={g5.spread:.3e}, невязка={residual:.3e} -> {verdict}")
    return Decision(
        verdict=verdict,
        alpha_hat=g5.alpha_hat,
        ratios=g5.ratios,
        spread=g5.spread,
        map_residual=residual,
        affine_map=mapping,
        reconstructions=(ra, rb),
        details=details,
    )


def decide(dev_a: NaturalDevelopment, dev_b: NaturalDevelopment,
           tol: Optional[Tolerances] = None) -> Decision:
    """Аффинная эквивалентность при заданном соответствии вершин"""
    tol = tol or Tolerances()
    return decide_reconstructed(reconstruct(dev_a, tol), reconstruct(dev_b, tol), tol)


def align_labelings(dev_a: NaturalDevelopment, dev_b: NaturalDevelopment,
                    tol: Optional[Tolerances] = None) -> List[Tuple[int, ...]]:
    """
    Перестановки из 48 симметрий октаэдра, после которых вторая развертка
    не отвергается пятой группой (разброс меньше alpha_no)
    """
    tol = tol or Tolerances()
    ra, rb = reconstruct(dev_a, tol), reconstruct(dev_b, tol)
    if not (ra.is_unique and rb.is_unique):
        logger.info("⚠️ Подбор нумерации невозможен: восстановление не однозначно")
        return []

    m_a = assemble_sdm(dev_a, ra.diagonals)
    m_b = assemble_sdm(dev_b, rb.diagonals)

    found = []
    for perm in SYMMETRIES:
        try:
            g5 = group5_from_sdm(m_a, m_b.permuted(perm), tol)
        except SolverError:
            continue
        if g5.signs_ok and g5.spread < tol.alpha_no:
            found.append(perm)

    logger.debug(f"🔍 Подходящих нумераций: {len(found)} из {len(SYMMETRIES)}")
    return found


def decide_with_labelings(dev_a: NaturalDevelopment, dev_b: NaturalDevelopment,
                          tol: Optional[Tolerances] = None) -> Decision:
    """decide с перебором нумераций второй развертки; тождественная проверяется первой"""
    tol = tol or Tolerances()
    perms = align_labelings(dev_a, dev_b, tol)
    ordered: List[Sequence[int]] = sorted(perms, key=lambda p: p != IDENTITY)

    ra = reconstruct(dev_a, tol)
    first: Optional[Decision] = None
    for perm in ordered:
        rb = reconstruct(relabel_development(dev_b, perm), tol)
        decision = decide_reconstructed(ra, rb, tol)
        decision.details["relabeling"] = list(perm)
        if decision.verdict == Verdict.EQUIVALENT:
            decision.details["labelings_tried"] = len(perms)
            return decision
        first = first or decision

    if first is None:
        first = decide_reconstructed(ra, reconstruct(dev_b, tol), tol)
        first.details["relabeling"] = list(IDENTITY)
    first.details["labelings_tried"] = len(perms)
    return first
