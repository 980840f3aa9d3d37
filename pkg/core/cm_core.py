"""
Определители Кэли-Менгера
Объемы симплексов по расстояниям, условия вложимости Менгера
и восстановление координат шести точек трилатерацией
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import Tolerances
from core.errors import EmbeddingError, NonEmbeddableError


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SquaredDistanceMatrix:
    """Матрица квадратов расстояний n точек (2 <= n <= 7)"""

    s: np.ndarray
    scale: float = field(default=0.0)

    def __post_init__(self):
        s = np.array(self.s, dtype=float)
        errors = []

        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError(f"Ожидалась квадратная матрица, получено {s.shape}")

        n = s.shape[0]
        if not (2 <= n <= 7):
            errors.append(f"число точек {n} вне диапазона 2..7")
        if not np.all(np.isfinite(s)):
            errors.append("есть нечисловые элементы")
        if not np.array_equal(s, s.T):
            errors.append("матрица несимметрична")
        if np.any(np.diag(s) != 0.0):
            errors.append("диагональ не нулевая")
        off = s[~np.eye(n, dtype=bool)]
        if np.any(off <= 0.0):
            errors.append("расстояния между различными точками должны быть положительны")

        if errors:
            raise ValueError("; ".join(errors))

        s.setflags(write=False)
        object.__setattr__(self, "s", s)

        if self.scale <= 0.0:
            object.__setattr__(self, "scale", float(off.mean()))

    @property
    def n(self) -> int:
        return self.s.shape[0]

    @classmethod
    def from_points(cls, points, scale: float = 0.0) -> "SquaredDistanceMatrix":
        """Матрица по координатам точек"""
        p = np.asarray(points, dtype=float)
        diff = p[:, None, :] - p[None, :, :]
        sq = np.sum(diff ** 2, axis=-1)
        # симметрия точно, а не с точностью до округления
        sq = 0.5 * (sq + sq.T)
        np.fill_diagonal(sq, 0.0)
        return cls(sq, scale)

    def distance(self, i: int, j: int) -> float:
        return math.sqrt(self.s[i, j])

    def block(self, indices: Sequence[int]) -> np.ndarray:
        idx = list(indices)
        return self.s[np.ix_(idx, idx)]

    def scaled(self, lam: float) -> "SquaredDistanceMatrix":
        """Все квадраты расстояний умножены на lam"""
        return SquaredDistanceMatrix(self.s * lam, self.scale * lam)

    def permuted(self, perm: Sequence[int]) -> "SquaredDistanceMatrix":
        """Точка i новой матрицы есть точка perm[i] исходной"""
        return SquaredDistanceMatrix(self.block(perm), self.scale)


@dataclass(frozen=True)
class CmValue:
    """Значение определителя Кэли-Менгера k+1 точек"""
    value: float
    k: int
    normalized: float


@dataclass
class EmbeddingResult:
    """Координаты шести точек и максимальная относительная ошибка расстояний"""
    points: np.ndarray
    max_distance_error: float

    def to_list(self) -> List[List[float]]:
        return [[float(c) for c in p] for p in self.points]


@dataclass
class MengerReport:
    """Строгие неравенства (k = 1, 2, 3) и равенства для точек x4, x5"""
    strict_inequalities: List[float]
    equalities: List[float]
    satisfied: bool

    def to_dict(self) -> Dict:
        return {
            "strict_inequalities": list(self.strict_inequalities),
            "equalities": list(self.equalities),
            "satisfied": self.satisfied,
        }


def bordered(sq: np.ndarray) -> np.ndarray:
    """Окаймленная матрица для блока (или стопки блоков) квадратов расстояний"""
    sq = np.asarray(sq, dtype=float)
    n = sq.shape[-1]
    out = np.ones(sq.shape[:-2] + (n + 1, n + 1), dtype=float)
    out[..., 0, 0] = 0.0
    out[..., 1:, 1:] = sq
    return out


def cm_batch(sq_stack: np.ndarray) -> np.ndarray:
    """Определители Кэли-Менгера для стопки блоков формы (..., n, n)"""
    return np.linalg.det(bordered(sq_stack))


def cm_cross_batch(sq_stack: np.ndarray, drop_row: int, drop_col: int) -> np.ndarray:
    """
    Смешанный минор окаймленной матрицы: без строки точки drop_row и столбца точки drop_col.
    Для шести точек и пары (5, 4):
    cm(0..5) cm(0..3) = cm(0..4) cm(0..3, 5) - X^2
    """
    b = bordered(sq_stack)
    size = b.shape[-1]
    rows = [k for k in range(size) if k != drop_row + 1]
    cols = [k for k in range(size) if k != drop_col + 1]
    return np.linalg.det(b[..., rows, :][..., :, cols])


def _check_subset(subset: Sequence[int], n: int) -> List[int]:
    idx = [int(i) for i in subset]
    if not (2 <= len(idx) <= 7):
        raise ValueError(f"Размер подмножества {len(idx)} вне диапазона 2..7")
    for i in idx:
        if not (0 <= i < n):
            raise IndexError(f"Индекс {i} вне диапазона 0..{n - 1}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"Повторяющиеся индексы в {idx}")
    return idx


def cm_determinant(points_subset: Sequence[int], m: SquaredDistanceMatrix) -> CmValue:
    """cm(x_i0, ..., x_ik) по квадратам расстояний"""
    idx = _check_subset(points_subset, m.n)
    k = len(idx) - 1
    value = float(np.linalg.det(bordered(m.block(idx))))
    return CmValue(value=value, k=k, normalized=value / m.scale ** k)


def cm_quadratic(points_subset: Sequence[int], m: SquaredDistanceMatrix,
                 pair: Tuple[int, int]) -> Tuple[float, float, float]:
    """
    Коэффициенты (A, B, C) определителя подмножества как многочлена
    от квадрата расстояния t внутри пары: cm = A t^2 + B t + C.
    A = -cm(подмножество без пары), C = значение при t = 0.
    """
    idx = _check_subset(points_subset, m.n)
    p, q = pair
    if p not in idx or q not in idx or p == q:
        raise ValueError(f"Пара {pair} не лежит в подмножестве {idx}")

    rest = [i for i in idx if i not in (p, q)]
    a = -float(np.linalg.det(bordered(m.block(rest)))) if rest else 0.0

    # значения при t = 0 и t = scale
    sigma = m.scale
    block = m.block(idx).copy()
    ip, iq = idx.index(p), idx.index(q)
    stack = np.stack([block, block])
    stack[0, ip, iq] = stack[0, iq, ip] = 0.0
    stack[1, ip, iq] = stack[1, iq, ip] = sigma
    c, f1 = cm_batch(stack)
    b = (f1 - c - a * sigma ** 2) / sigma
    return a, float(b), float(c)


def simplex_volume_sq(points_subset: Sequence[int], m: SquaredDistanceMatrix,
                      tol: Optional[Tolerances] = None) -> float:
    """
    Квадрат n-мерного объема симплекса по расстояниям:
    vol^2 = (-1)^(n+1) / (2^n (n!)^2) * cm
    """
    tol = tol or Tolerances()
    idx = _check_subset(points_subset, m.n)
    n = len(idx) - 1
    if n > 4:
        raise ValueError("Объем определен для подмножеств из 2..5 точек")

    cm = cm_determinant(idx, m)
    signed = (-1) ** (n + 1) * cm.normalized
    if signed < 0.0:
        if -signed > tol.eps_rel:
            raise NonEmbeddableError(
                f"cm{tuple(idx)} имеет невозможный знак: нормированное значение {cm.normalized:.3e}"
            )
        logger.debug(f"📐 vol^2{tuple(idx)} обнулен: {signed:.3e} в пределах допуска")
        return 0.0

    return (-1) ** (n + 1) * cm.value / (2 ** n * math.factorial(n) ** 2)


def gram_volume_sq(points) -> float:
    """Квадрат объема симплекса по координатам (определитель Грама)"""
    p = np.asarray(points, dtype=float)
    n = p.shape[0] - 1
    v = p[1:] - p[0]
    return float(np.linalg.det(v @ v.T)) / math.factorial(n) ** 2


def menger_conditions(m: SquaredDistanceMatrix, tol: Optional[Tolerances] = None) -> MengerReport:
    """Условия Менгера вложимости шести точек в R³ с опорными точками x0..x3"""
    tol = tol or Tolerances()
    if m.n != 6:
        raise ValueError("Условия Менгера проверяются для шести точек")

    margins = [
        cm_determinant([0, 1], m).normalized,
        -cm_determinant([0, 1, 2], m).normalized,
        cm_determinant([0, 1, 2, 3], m).normalized,
    ]
    residuals = [
        cm_determinant([0, 1, 2, 3, 4], m).normalized,
        cm_determinant([0, 1, 2, 3, 5], m).normalized,
        cm_determinant([0, 1, 2, 3, 4, 5], m).normalized,
    ]
    satisfied = all(v > tol.eps_rel for v in margins) and all(abs(r) <= tol.eps_rel for r in residuals)
    return MengerReport(strict_inequalities=margins, equalities=residuals, satisfied=satisfied)


def embed_six_points(m: SquaredDistanceMatrix, tol: Optional[Tolerances] = None) -> EmbeddingResult:
    """
    Трилатерация: x0 в начале координат, x1 на положительной оси x,
    x2 в верхней полуплоскости (x, y), x3 с положительной z;
    x4 и x5 из линейной системы разностей квадратов расстояний.
    """
    tol = tol or Tolerances()
    if m.n != 6:
        raise ValueError("Вложение строится для шести точек")

    s = m.s
    base_margin = cm_determinant([0, 1, 2, 3], m).normalized
    if base_margin <= tol.eps_geom:
        raise EmbeddingError(
            f"Вырожденный опорный тетраэдр x0..x3 (запас {base_margin:.3e})",
            reason="degenerate base simplex",
        )

    pts = np.zeros((6, 3), dtype=float)
    d01 = math.sqrt(s[0, 1])
    pts[1, 0] = d01

    x2 = (s[0, 2] + s[0, 1] - s[1, 2]) / (2.0 * d01)
    y2_sq = s[0, 2] - x2 ** 2
    if y2_sq <= 0.0:
        raise EmbeddingError("Грань x0 x1 x2 вырождена", reason="degenerate base simplex")
    pts[2, :2] = (x2, math.sqrt(y2_sq))

    x3 = (s[0, 3] + s[0, 1] - s[1, 3]) / (2.0 * d01)
    y3 = ((s[0, 3] + s[0, 2] - s[2, 3]) / 2.0 - x3 * pts[2, 0]) / pts[2, 1]
    z3_sq = s[0, 3] - x3 ** 2 - y3 ** 2
    pts[3] = (x3, y3, math.sqrt(max(z3_sq, 0.0)))

    base = pts[1:4]
    norms = np.sum(base ** 2, axis=1)
    for j in (4, 5):
        rhs = 0.5 * (norms + s[0, j] - s[1:4, j])
        pts[j] = np.linalg.solve(base, rhs)

    got = SquaredDistanceMatrix.from_points(pts).s
    length = math.sqrt(m.scale)
    err = float(np.max(np.abs(np.sqrt(got) - np.sqrt(s)))) / length

    if err > tol.embed_tol:
        raise EmbeddingError(
            f"Расстояния не воспроизводятся: относительная ошибка {err:.3e}",
            reason="inconsistent input",
        )

    logger.debug(f"✅ Шесть точек вложены в R³, ошибка {err:.2e}")
    return EmbeddingResult(points=pts, max_distance_error=err)
