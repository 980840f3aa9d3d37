"""
Восстановление выпуклого октаэдра по естественной развертке
Неизвестные: u = δ23², v = δ14², w = δ05²
cm(x0..x4) и cm(x0..x3, x5) квадратичны по v и w соответственно, поэтому при
фиксированном u ветви v±(u), w±(u) явные; остается одномерный поиск
нулей G(u) на каждой из четырех ветвей.
G есть смешанный минор X (без строки x5 и столбца x4): при выполненных
уравнениях для x4 и x5 cm(x0..x5) = -X^2 / cm(x0..x3), т.е. у cm(x0..x5)
только двойные нули, а X меняет знак в каждом простом решении
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from config.settings import Tolerances
from core.cm_core import EmbeddingResult, cm_batch, cm_cross_batch, embed_six_points
from core.conditions import ConditionReport, evaluate
from core.errors import EmbeddingError, GeometryError, SolverError
from core.octa_model import (
    EDGES,
    DiagonalSet,
    NaturalDevelopment,
    Octahedron3,
    assemble_sdm,
    is_convex,
    is_hull_facet_set,
)


logger = logging.getLogger(__name__)

BRANCHES: Tuple[Tuple[int, int], ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))

_BASE = [0, 1, 2, 3]
_BASE_X4 = [0, 1, 2, 3, 4]
_BASE_X5 = [0, 1, 2, 3, 5]

# шаг центральной разности в нормированных переменных
_FD_STEP = 1e-7
# невязка, ниже которой Ньютон останавливается (уровень округления)
_RES_FLOOR = 1e-14
# порог |G| для затравок Ньютона в локальных минимумах (доля от max|G| на ветви)
_TANGENT_SEED_RATIO = 1e-3


class ReconstructionStatus:
    UNIQUE = "unique"
    NONE = "none"
    AMBIGUOUS = "ambiguous"


@dataclass
class SearchOutcome:
    """Диагностика поиска: допустимый интервал u, смены знака, запуски Ньютона, отбраковка"""
    interval: Optional[Tuple[float, float]] = None
    sign_changes: Dict[str, int] = field(default_factory=dict)
    boundary_seeds: int = 0
    tangent_seeds: int = 0
    newton_runs: int = 0
    newton_converged: int = 0
    candidates: List[DiagonalSet] = field(default_factory=list)
    rejected: List[Dict] = field(default_factory=list)
    marginal: bool = False

    def to_dict(self) -> Dict:
        return {
            "interval": list(self.interval) if self.interval else None,
            "sign_changes": dict(self.sign_changes),
            "boundary_seeds": self.boundary_seeds,
            "tangent_seeds": self.tangent_seeds,
            "newton_runs": self.newton_runs,
            "newton_converged": self.newton_converged,
            "candidates": [c.as_dict() for c in self.candidates],
            "rejected": list(self.rejected),
            "marginal": self.marginal,
        }


@dataclass
class ReconstructionResult:
    """Результат восстановления; при status != unique поля решения могут отсутствовать"""
    status: str
    diagonals: Optional[DiagonalSet]
    embedding: Optional[EmbeddingResult]
    report: Optional[ConditionReport]
    candidates_found: int
    outcome: SearchOutcome
    alternatives: List[DiagonalSet] = field(default_factory=list)
    development: Optional[NaturalDevelopment] = None

    @property
    def is_unique(self) -> bool:
        return self.status == ReconstructionStatus.UNIQUE

    @property
    def octahedron(self) -> Optional[Octahedron3]:
        return Octahedron3(self.embedding.points) if self.embedding is not None else None

    def residuals(self) -> Dict:
        if self.report is None:
            return {}
        g1 = self.report.group1
        out = {
            "eq6": list(g1.eq6_margins),
            "eq7": g1.eq7_margin,
            "eq8": g1.eq8_res,
            "eq9": g1.eq9_res,
            "eq10": g1.eq10_res,
            "group2_min_margin": min(self.report.group2.margins),
        }
        if self.embedding is not None:
            out["max_distance_error"] = self.embedding.max_distance_error
        return out

    def to_dict(self) -> Dict:
        return {
            "status": self.status,
            "diagonals": self.diagonals.as_dict() if self.diagonals else None,
            "vertices": self.embedding.to_list() if self.embedding is not None else None,
            "residuals": self.residuals(),
            "candidates_found": self.candidates_found,
            "alternatives": [d.as_dict() for d in self.alternatives],
            "diagnostics": self.outcome.to_dict(),
        }


class DiagonalSearch:
    """Поиск всех положительных (u, v, w), при которых шесть точек вкладываются в R³"""

    def __init__(self, dev: NaturalDevelopment, tol: Optional[Tolerances] = None):
        self.dev = dev
        self.tol = tol or Tolerances()
        self.sigma = dev.scale
        self.logger = logging.getLogger(__name__)

        base = np.zeros((6, 6), dtype=float)
        for i, j in EDGES:
            base[i, j] = base[j, i] = dev.length(i, j) ** 2 / self.sigma
        # все величины ниже в единицах sigma
        self.base = base

    # ---------- сборка матриц ----------

    def _fill(self, u, v=None, w=None) -> np.ndarray:
        """Стопка матриц квадратов расстояний с подставленными диагоналями"""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        mats = np.broadcast_to(self.base, u.shape + (6, 6)).copy()
        mats[..., 2, 3] = mats[..., 3, 2] = u
        if v is not None:
            mats[..., 1, 4] = mats[..., 4, 1] = v
        if w is not None:
            mats[..., 0, 5] = mats[..., 5, 0] = w
        return mats

    @staticmethod
    def _block(mats: np.ndarray, subset: List[int]) -> np.ndarray:
        return mats[..., subset, :][..., :, subset]

    @classmethod
    def _slot_quadratic(cls, mats: np.ndarray, subset: List[int],
                        pair: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Коэффициенты cm(subset) как квадратного трехчлена от элемента pair (в единицах sigma)"""
        blocks = cls._block(mats, subset)
        ip, iq = subset.index(pair[0]), subset.index(pair[1])
        rest = [k for k in range(len(subset)) if k not in (ip, iq)]

        pair_stack = np.stack([blocks, blocks])
        pair_stack[0, ..., ip, iq] = pair_stack[0, ..., iq, ip] = 0.0
        pair_stack[1, ..., ip, iq] = pair_stack[1, ..., iq, ip] = 1.0
        c, f1 = cm_batch(pair_stack)
        a = -cm_batch(blocks[..., rest, :][..., :, rest])
        return a, f1 - c - a, c

    @staticmethod
    def _roots(a, b, c, sign: int) -> np.ndarray:
        """Ветвь корня квадратного трехчлена; NaN там, где дискриминант отрицателен"""
        disc = b * b - 4.0 * a * c
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(disc >= 0.0, (-b + sign * np.sqrt(np.abs(disc))) / (2.0 * a), np.nan)

    # ---------- опорный тетраэдр ----------

    def feasibility_interval(self) -> Optional[Tuple[float, float]]:
        """Интервал u, на котором cm(x0, x1, x2, x3) > 0"""
        mats = self._fill(1.0)
        a, b, c = (float(x[0]) for x in self._slot_quadratic(mats, _BASE, (2, 3)))
        disc = b * b - 4.0 * a * c
        if a >= 0.0 or disc <= 0.0:
            return None
        r = math.sqrt(disc)
        lo, hi = sorted(((-b + r) / (2.0 * a), (-b - r) / (2.0 * a)))
        lo = max(lo, 0.0)
        if hi <= lo:
            return None
        return lo, hi

    # ---------- ветви и G(u) ----------

    def branch_values(self, u, branch: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """v(u), w(u) на ветви и G(u) = X(u, v(u), w(u)) в единицах sigma"""
        mats = self._fill(u)
        v = self._roots(*self._slot_quadratic(mats, _BASE_X4, (1, 4)), branch[0])
        w = self._roots(*self._slot_quadratic(mats, _BASE_X5, (0, 5)), branch[1])
        full = self._fill(u, v, w)
        g = np.full(v.shape, np.nan)
        ok = np.isfinite(v) & np.isfinite(w)
        if np.any(ok):
            g[ok] = cm_cross_batch(full[ok], 5, 4)
        return v, w, g

    def _g_scalar(self, u: float, branch: Tuple[int, int]) -> float:
        return float(self.branch_values(u, branch)[2][0])

    # ---------- Ньютон ----------

    def residuals(self, x: np.ndarray) -> np.ndarray:
        """Невязки cm(x0..x4), cm(x0..x3, x5) и X для стопки точек x формы (k, 3)"""
        x = np.atleast_2d(x)
        mats = self._fill(x[:, 0], x[:, 1], x[:, 2])
        return np.stack([
            cm_batch(self._block(mats, _BASE_X4)),
            cm_batch(self._block(mats, _BASE_X5)),
            cm_cross_batch(mats, 5, 4),
        ], axis=-1)

    def polish(self, seed: np.ndarray) -> Tuple[Optional[np.ndarray], int]:
        """Демпфированный метод Ньютона; якобиан центральными разностями"""
        x = np.asarray(seed, dtype=float)
        f = self.residuals(x)[0]
        it = 0

        for it in range(1, self.tol.newton_max_iter + 1):
            if np.max(np.abs(f)) <= _RES_FLOOR:
                break

            h = _FD_STEP * max(1.0, float(np.max(np.abs(x))))
            shifted = np.concatenate([x + h * np.eye(3), x - h * np.eye(3)])
            fp = self.residuals(shifted)
            jac = ((fp[:3] - fp[3:]) / (2.0 * h)).T

            try:
                dx = np.linalg.solve(jac, -f)
            except np.linalg.LinAlgError:
                break

            lam = 1.0
            improved = False
            while lam > 1e-4:
                xn = x + lam * dx
                fn = self.residuals(xn)[0]
                if np.max(np.abs(fn)) < np.max(np.abs(f)):
                    improved = True
                    break
                lam *= 0.5

            if not improved:
                break

            step = float(np.max(np.abs(lam * dx)))
            x, f = xn, fn
            if step <= 1e-14 * max(1.0, float(np.max(np.abs(x)))):
                break

        if not np.all(np.isfinite(x)) or np.max(np.abs(f)) > self.tol.eps_rel:
            return None, it
        return x, it

    # ---------- поиск ----------

    def _seeds_for_branch(self, grid: np.ndarray, branch: Tuple[int, int],
                          outcome: SearchOutcome) -> List[np.ndarray]:
        v, w, g = self.branch_values(grid, branch)
        valid = np.isfinite(g)
        seeds = []
        label = "".join("+" if s > 0 else "-" for s in branch)
        changes = 0

        # точные нули на сетке
        for k in np.flatnonzero(valid & (g == 0.0)):
            seeds.append(np.array([grid[k], v[k], w[k]]))

        for k in range(len(grid) - 1):
            if not (valid[k] and valid[k + 1]):
                continue
            if g[k] * g[k + 1] >= 0.0:
                continue
            changes += 1
            lo, hi = grid[k], grid[k + 1]
            try:
                u_star = brentq(self._g_scalar, lo, hi, args=(branch,),
                                xtol=self.tol.bisect_rtol * hi, rtol=4 * np.finfo(float).eps)
            except (ValueError, RuntimeError):
                u_star = 0.5 * (lo + hi)
            vs, ws, _ = self.branch_values(u_star, branch)
            if np.isfinite(vs[0]) and np.isfinite(ws[0]):
                seeds.append(np.array([u_star, vs[0], ws[0]]))
        outcome.sign_changes[label] = changes

        # границы области определения ветви: там ветви склеиваются
        edges = np.flatnonzero(valid[:-1] != valid[1:])
        for k in edges:
            j = k if valid[k] else k + 1
            seeds.append(np.array([grid[j], v[j], w[j]]))
            outcome.boundary_seeds += 1

        # касательные нули: локальные минимумы |G| без смены знака
        if np.count_nonzero(valid) >= 3:
            ag = np.where(valid, np.abs(g), np.inf)
            top = float(np.max(np.abs(g[valid])))
            inner = np.arange(1, len(grid) - 1)
            mins = inner[(ag[inner] < ag[inner - 1]) & (ag[inner] < ag[inner + 1])
                         & (ag[inner] <= _TANGENT_SEED_RATIO * top)
                         & (g[inner - 1] * g[inner + 1] > 0.0)]
            for k in mins:
                seeds.append(np.array([grid[k], v[k], w[k]]))
                outcome.tangent_seeds += 1

        return seeds

    def _dedupe(self, points: List[np.ndarray]) -> List[np.ndarray]:
        points = sorted(points, key=lambda p: tuple(p))
        unique: List[np.ndarray] = []
        for p in points:
            if any(np.max(np.abs(p - q)) <= self.tol.dedup_rtol * max(np.max(np.abs(q)), 1.0) for q in unique):
                continue
            unique.append(p)
        return unique

    def run(self) -> SearchOutcome:
        outcome = SearchOutcome()
        interval = self.feasibility_interval()
        if interval is None:
            self.logger.info("⚠️ cm(x0, x1, x2, x3) не положителен ни при каком δ23")
            return outcome
        outcome.interval = (interval[0] * self.sigma, interval[1] * self.sigma)

        lo, hi = interval
        grid = np.linspace(lo, hi, self.tol.grid + 2)[1:-1]

        seeds: List[np.ndarray] = []
        for branch in BRANCHES:
            seeds.extend(self._seeds_for_branch(grid, branch, outcome))

        solutions = []
        for seed in seeds:
            outcome.newton_runs += 1
            x, _ = self.polish(seed)
            if x is None:
                continue
            outcome.newton_converged += 1
            if np.all(x > 0.0):
                solutions.append(x)

        for x in self._dedupe(solutions):
            d = np.sqrt(x * self.sigma)
            outcome.candidates.append(DiagonalSet(d05=float(d[2]), d14=float(d[1]), d23=float(d[0])))

        if not any(outcome.sign_changes.values()) and not outcome.candidates:
            self.logger.info("⚠️ G(u) не меняет знак ни на одной ветви: развертка не реализуется в R³")

        self.logger.debug(
            f"🔍 Поиск диагоналей: {len(seeds)} затравок, {outcome.newton_converged} сошлись, "
            f"{len(outcome.candidates)} кандидатов"
        )
        return outcome


def search_diagonals(dev: NaturalDevelopment, tol: Optional[Tolerances] = None) -> SearchOutcome:
    """Поиск с полной диагностикой"""
    return DiagonalSearch(dev, tol).run()


def solve_diagonals(dev: NaturalDevelopment, tol: Optional[Tolerances] = None) -> List[DiagonalSet]:
    """Все положительные решения уравнений вложимости, отсортированные по δ23"""
    return search_diagonals(dev, tol).candidates


def reconstruct(dev: NaturalDevelopment, tol: Optional[Tolerances] = None) -> ReconstructionResult:
    """
    Кандидаты решателя фильтруются группами 1-2, вкладываются в R³
    и проверяются геометрически (выпуклость, грани оболочки)
    """
    tol = tol or Tolerances()
    outcome = search_diagonals(dev, tol)

    survivors = []
    for diag in outcome.candidates:
        try:
            report = evaluate(dev, diag, tol)
        except SolverError as e:
            outcome.rejected.append({"diagonals": diag.as_dict(), "reason": str(e)})
            continue

        if not report.group1.satisfied:
            outcome.rejected.append({"diagonals": diag.as_dict(), "reason": "group1"})
            continue
        if not report.group2.satisfied:
            if report.group2.marginal and not report.group2.failed:
                outcome.marginal = True
                reason = "group2 marginal"
            else:
                reason = "group2"
            outcome.rejected.append({"diagonals": diag.as_dict(), "reason": reason})
            continue

        try:
            embedding = embed_six_points(assemble_sdm(dev, diag), tol)
            oct = Octahedron3(embedding.points)
            convexity = is_convex(oct, tol)
        except (EmbeddingError, GeometryError) as e:
            outcome.rejected.append({"diagonals": diag.as_dict(), "reason": f"embedding: {e}"})
            continue

        if not convexity.is_convex:
            outcome.rejected.append({"diagonals": diag.as_dict(), "reason": f"convexity {convexity.status.value}"})
            continue
        if not is_hull_facet_set(oct):
            outcome.rejected.append({"diagonals": diag.as_dict(), "reason": "hull facets"})
            continue

        survivors.append((diag, embedding, report))

    if not survivors:
        if outcome.marginal:
            logger.info("⚠️ Развертка лежит на границе выпуклости: решение не принимается")
        return ReconstructionResult(
            status=ReconstructionStatus.NONE,
            diagonals=None,
            embedding=None,
            report=None,
            candidates_found=0,
            outcome=outcome,
            development=dev,
        )

    diag, embedding, report = survivors[0]
    status = ReconstructionStatus.UNIQUE
    if len(survivors) > 1:
        status = ReconstructionStatus.AMBIGUOUS
        logger.warning(
            f"⚠️ Найдено {len(survivors)} выпуклых реализаций одной развертки: "
            f"проверьте допуски или близость к вырождению"
        )

    return ReconstructionResult(
        status=status,
        diagonals=diag,
        embedding=embedding,
        report=report,
        candidates_found=len(survivors),
        outcome=outcome,
        alternatives=[s[0] for s in survivors[1:]],
        development=dev,
    )
