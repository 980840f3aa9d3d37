"""
Пять групп необходимых условий аффинной эквивалентности
Группа 1: вложимость в R³ (неравенства и равенства Кэли-Менгера)
Группа 2: выпуклость (24 неравенства "две вершины по одну сторону грани")
Группы 3-4: те же проверки для второй развертки
Группа 5: постоянство отношения объемов 12 тетраэдров
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.settings import Tolerances
from core.cm_core import SquaredDistanceMatrix, cm_determinant, cm_quadratic, menger_conditions
from core.errors import SolverError
from core.octa_model import (
    EDGES,
    DiagonalSet,
    NaturalDevelopment,
    antipode,
    assemble_sdm,
    faces_of_edge,
    iter_face_pairs,
)


logger = logging.getLogger(__name__)


class Check(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    MARGINAL = "marginal"


def classify_margin(margin: float, band: float) -> Check:
    """Строгое неравенство margin > 0 с полосой неопределенности"""
    if margin > band:
        return Check.PASS
    if margin < -band:
        return Check.FAIL
    return Check.MARGINAL


@dataclass
class Group1Report:
    """Строгие неравенства для x0..x3 и равенства для x4, x5 и всех шести точек"""
    eq6_margins: Tuple[float, float]
    eq7_margin: float
    eq8_res: float
    eq9_res: float
    eq10_res: float
    satisfied: bool

    @property
    def residuals(self) -> Tuple[float, float, float]:
        return (self.eq8_res, self.eq9_res, self.eq10_res)

    def to_dict(self) -> Dict:
        return {
            "eq6_margins": list(self.eq6_margins),
            "eq7_margin": self.eq7_margin,
            "eq8_res": self.eq8_res,
            "eq9_res": self.eq9_res,
            "eq10_res": self.eq10_res,
            "satisfied": self.satisfied,
        }


@dataclass
class Group2Entry:
    """Одно неравенство второй группы"""
    face: Tuple[int, int, int]
    pair: Tuple[int, int]
    margin: float           # (C - A t^2) / scale^4
    a: float                # A / scale^2
    b: float                # B / scale^3
    c: float                # C / scale^4
    discriminant: float     # (B^2 - 4AC) / scale^6
    b_margin: float         # (-B - 2 A t) / scale^3
    check: Check

    def to_dict(self) -> Dict:
        return {
            "face": list(self.face),
            "pair": list(self.pair),
            "margin": self.margin,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "discriminant": self.discriminant,
            "b_margin": self.b_margin,
            "check": self.check.value,
        }


@dataclass
class Group2Report:
    """24 неравенства выпуклости"""
    entries: List[Group2Entry]
    variant: str = "prose"

    @property
    def margins(self) -> List[float]:
        return [e.margin for e in self.entries]

    @property
    def satisfied(self) -> bool:
        return all(e.check == Check.PASS for e in self.entries)

    @property
    def marginal(self) -> bool:
        return any(e.check == Check.MARGINAL for e in self.entries)

    @property
    def failed(self) -> List[Group2Entry]:
        return [e for e in self.entries if e.check == Check.FAIL]

    def to_dict(self) -> Dict:
        return {
            "variant": self.variant,
            "margins": self.margins,
            "satisfied": self.satisfied,
            "marginal": self.marginal,
            "entries": [e.to_dict() for e in self.entries],
        }


@dataclass
class Group5Report:
    """Отношения cm'/cm для 12 тетраэдров вокруг ребер"""
    ratios: List[float]
    alpha_hat: Optional[float]
    spread: float
    signs_ok: bool
    satisfied: bool

    def to_dict(self) -> Dict:
        return {
            "ratios": list(self.ratios),
            "alpha_hat": self.alpha_hat,
            "spread": self.spread,
            "signs_ok": self.signs_ok,
            "satisfied": self.satisfied,
        }


@dataclass
class ConditionReport:
    """Значения всех групп условий; безразмерные"""
    group1: Group1Report
    group2: Group2Report
    group3: Optional[Group1Report] = None
    group4: Optional[Group2Report] = None
    group5: Optional[Group5Report] = None
    extra: Dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        groups = [self.group1, self.group2, self.group3, self.group4, self.group5]
        return all(g.satisfied for g in groups if g is not None)

    def to_dict(self) -> Dict:
        out = {
            "group1": self.group1.to_dict(),
            "group2": self.group2.to_dict(),
        }
        if self.group3 is not None:
            out["group3"] = self.group3.to_dict()
        if self.group4 is not None:
            out["group4"] = self.group4.to_dict()
        if self.group5 is not None:
            out["group5"] = self.group5.to_dict()
        out.update(self.extra)
        out["satisfied"] = self.satisfied
        return out


def group1(dev: NaturalDevelopment, diag: DiagonalSet, tol: Optional[Tolerances] = None) -> Group1Report:
    """Первая группа: условия Менгера с опорными точками x0..x3"""
    tol = tol or Tolerances()
    report = menger_conditions(assemble_sdm(dev, diag), tol)
    m6, m7 = report.strict_inequalities[:2], report.strict_inequalities[2]
    return Group1Report(
        eq6_margins=(m6[0], m6[1]),
        eq7_margin=m7,
        eq8_res=report.equalities[0],
        eq9_res=report.equalities[1],
        eq10_res=report.equalities[2],
        satisfied=report.satisfied,
    )


def _group2_entry(m: SquaredDistanceMatrix, face: Tuple[int, int, int], pair: Tuple[int, int],
                  zero_pair: Tuple[int, int], tol: Tolerances) -> Group2Entry:
    """
    cm(грань ∪ {p, q}) как квадратный трехчлен от квадрата расстояния в слоте zero_pair;
    сравнение C > A d_pq^4
    """
    subset = list(face) + list(pair)
    scale = m.scale
    a, b, c = cm_quadratic(subset, m, zero_pair)

    if a / scale ** 2 <= tol.eps_geom:
        raise SolverError(f"Вырожденная грань {face}: A = {a / scale ** 2:.3e}")

    t = m.s[pair[0], pair[1]]
    margin = (c - a * t * t) / scale ** 4
    return Group2Entry(
        face=face,
        pair=pair,
        margin=margin,
        a=a / scale ** 2,
        b=b / scale ** 3,
        c=c / scale ** 4,
        discriminant=(b * b - 4.0 * a * c) / scale ** 6,
        b_margin=(-b - 2.0 * a * t) / scale ** 3,
        check=classify_margin(margin, tol.eps_geom),
    )


def group2(dev: NaturalDevelopment, diag: DiagonalSet, tol: Optional[Tolerances] = None) -> Group2Report:
    """
    Вторая группа: для каждой грани и каждой пары p, q из трех неинцидентных
    вершин t = |p - q|^2 должен быть меньшим корнем, т.е. C > A t^2.
    """
    tol = tol or Tolerances()
    m = assemble_sdm(dev, diag)
    entries = [_group2_entry(m, face, pair, pair, tol) for face, pair in iter_face_pairs()]
    report = Group2Report(entries)
    if report.failed:
        logger.debug(f"📐 Группа 2: нарушено {len(report.failed)} из 24 неравенств")
    return report


def group2_displayed(dev: NaturalDevelopment, diag: DiagonalSet,
                     tol: Optional[Tolerances] = None) -> Group2Report:
    """
    Вариант с переменной в слоте диагонали (c, p), где c противоположна p:
    обнуляется этот слот, A берется по оставшимся трем точкам, сравнение с d_pq^4.
    Только для отладки и сравнения с основным вариантом.
    """
    tol = tol or Tolerances()
    m = assemble_sdm(dev, diag)
    entries = []
    for face, pair in iter_face_pairs():
        p = min(pair)
        entries.append(_group2_entry(m, face, pair, (antipode(p), p), tol))

    report = Group2Report(entries, variant="displayed")
    prose = group2(dev, diag, tol)
    disagreements = sum(
        1 for x, y in zip(prose.entries, report.entries) if x.check != y.check
    )
    logger.info(f"🔍 Вариант с диагональным слотом расходится с основным в {disagreements} из 24 неравенств")
    return report


def _tetrahedra_of_edges() -> List[Tuple[int, int, int, int]]:
    """Для каждого ребра: две его вершины и вершины двух смежных граней"""
    out = []
    for a, b in EDGES:
        f1, f2 = faces_of_edge((a, b))
        c1 = next(v for v in f1 if v not in (a, b))
        c2 = next(v for v in f2 if v not in (a, b))
        out.append((a, b, c1, c2))
    return out


EDGE_TETRAHEDRA = _tetrahedra_of_edges()


def group5_from_sdm(m_a: SquaredDistanceMatrix, m_b: SquaredDistanceMatrix,
                    tol: Optional[Tolerances] = None) -> Group5Report:
    """Пятая группа по двум полным матрицам квадратов расстояний"""
    tol = tol or Tolerances()
    cm_a = np.array([cm_determinant(t, m_a).value for t in EDGE_TETRAHEDRA])
    cm_b = np.array([cm_determinant(t, m_b).value for t in EDGE_TETRAHEDRA])

    for tet, va, vb in zip(EDGE_TETRAHEDRA, cm_a / m_a.scale ** 3, cm_b / m_b.scale ** 3):
        if abs(va) <= tol.eps_geom or abs(vb) <= tol.eps_geom:
            raise SolverError(f"Вырожденный тетраэдр {tet}: cm = {va:.3e} / {vb:.3e}")

    ratios = cm_b / cm_a
    signs_ok = bool(np.all(cm_a > 0.0) and np.all(cm_b > 0.0))

    # медиана логарифмов: при перестановке аргументов alpha ровно обращается
    alpha_hat = float(math.exp(np.median(np.log(np.abs(ratios)))))
    spread = float(np.max(np.abs(ratios / alpha_hat - 1.0))) if signs_ok else float("inf")

    return Group5Report(
        ratios=[float(r) for r in ratios],
        alpha_hat=alpha_hat if signs_ok else None,
        spread=spread,
        signs_ok=signs_ok,
        satisfied=signs_ok and spread <= tol.alpha_yes,
    )


def group5(dev_a: NaturalDevelopment, diag_a: DiagonalSet,
           dev_b: NaturalDevelopment, diag_b: DiagonalSet,
           tol: Optional[Tolerances] = None) -> Group5Report:
    """Пятая группа: cm'(тетраэдр) = alpha cm(тетраэдр) для всех 12 ребер"""
    return group5_from_sdm(assemble_sdm(dev_a, diag_a), assemble_sdm(dev_b, diag_b), tol)


def evaluate(dev: NaturalDevelopment, diag: DiagonalSet, tol: Optional[Tolerances] = None,
             variant: str = "prose") -> ConditionReport:
    """Группы 1-2 для одной развертки"""
    tol = tol or Tolerances()
    g2 = group2_displayed(dev, diag, tol) if variant == "displayed" else group2(dev, diag, tol)
    return ConditionReport(group1=group1(dev, diag, tol), group2=g2)


def evaluate_pair(dev_a: NaturalDevelopment, diag_a: DiagonalSet,
                  dev_b: NaturalDevelopment, diag_b: DiagonalSet,
                  tol: Optional[Tolerances] = None) -> ConditionReport:
    """Все пять групп: 3 и 4 суть группы 1 и 2 второй развертки"""
    tol = tol or Tolerances()
    return ConditionReport(
        group1=group1(dev_a, diag_a, tol),
        group2=group2(dev_a, diag_a, tol),
        group3=group1(dev_b, diag_b, tol),
        group4=group2(dev_b, diag_b, tol),
        group5=group5(dev_a, diag_a, dev_b, diag_b, tol),
    )
