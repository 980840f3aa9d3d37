"""
Модель октаэдра
Комбинаторика специальной нумерации, естественная развертка (12 длин ребер),
октаэдр в координатах, извлечение развертки и проверка выпуклости
"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from config.settings import Tolerances
from core.cm_core import SquaredDistanceMatrix
from core.errors import DevelopmentError, GeometryError


logger = logging.getLogger(__name__)


# Специальная нумерация: противоположные вершины (0,5), (1,4), (2,3)
ANTIPODAL_PAIRS: Tuple[Tuple[int, int], ...] = ((0, 5), (1, 4), (2, 3))
DIAGONALS = ANTIPODAL_PAIRS

_ANTIPODE = {a: b for a, b in ANTIPODAL_PAIRS}
_ANTIPODE.update({b: a for a, b in ANTIPODAL_PAIRS})

EDGES: Tuple[Tuple[int, int], ...] = tuple(
    (i, j) for i, j in itertools.combinations(range(6), 2) if _ANTIPODE[i] != j
)

FACES: Tuple[Tuple[int, int, int], ...] = tuple(
    tuple(sorted(face)) for face in itertools.product((0, 5), (1, 4), (2, 3))
)

EDGE_KEYS: Tuple[str, ...] = tuple(f"{i}{j}" for i, j in EDGES)
DIAGONAL_KEYS: Tuple[str, ...] = tuple(f"{i}{j}" for i, j in DIAGONALS)


def antipode(i: int) -> int:
    """Вершина, соединенная с i диагональю"""
    return _ANTIPODE[i]


def edge_key(i: int, j: int) -> str:
    a, b = sorted((i, j))
    return f"{a}{b}"


def faces_of_edge(edge: Tuple[int, int]) -> Tuple[Tuple[int, int, int], Tuple[int, int, int]]:
    """Две грани, содержащие ребро"""
    a, b = edge
    found = tuple(f for f in FACES if a in f and b in f)
    if len(found) != 2:
        raise ValueError(f"{edge} не является ребром")
    return found


def apexes_of_face(face: Sequence[int]) -> Tuple[int, int, int]:
    """Три вершины, не инцидентные грани: противоположные ее вершинам"""
    return tuple(antipode(v) for v in face)


def _build_symmetries() -> Tuple[Tuple[int, ...], ...]:
    """48 перестановок вершин, сохраняющих пары противоположных вершин"""
    perms = []
    for pair_order in itertools.permutations(range(3)):
        for flips in itertools.product((False, True), repeat=3):
            perm = [0] * 6
            for slot, src in enumerate(pair_order):
                a, b = ANTIPODAL_PAIRS[slot]
                c, d = ANTIPODAL_PAIRS[src]
                if flips[slot]:
                    c, d = d, c
                perm[a], perm[b] = c, d
            perms.append(tuple(perm))
    return tuple(perms)


SYMMETRIES = _build_symmetries()
IDENTITY: Tuple[int, ...] = tuple(range(6))


@dataclass(frozen=True)
class NaturalDevelopment:
    """12 длин ребер октаэдра в специальной нумерации"""
    edge_length: Mapping[str, float]

    def __getitem__(self, key: str) -> float:
        return self.edge_length[key]

    def length(self, i: int, j: int) -> float:
        return self.edge_length[edge_key(i, j)]

    @property
    def scale(self) -> float:
        """Средний квадрат длины ребра"""
        return sum(v * v for v in self.edge_length.values()) / len(self.edge_length)

    def scaled(self, k: float) -> "NaturalDevelopment":
        return NaturalDevelopment({key: v * k for key, v in self.edge_length.items()})

    def as_dict(self) -> Dict[str, float]:
        return {key: float(self.edge_length[key]) for key in EDGE_KEYS}


@dataclass(frozen=True)
class DiagonalSet:
    """Длины диагоналей δ05, δ14, δ23"""
    d05: float
    d14: float
    d23: float

    def __post_init__(self):
        for name in ("d05", "d14", "d23"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"Диагональ {name} должна быть положительной, получено {value}")

    def as_dict(self) -> Dict[str, float]:
        return {"05": float(self.d05), "14": float(self.d14), "23": float(self.d23)}

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.d05, self.d14, self.d23)

    def scaled(self, k: float) -> "DiagonalSet":
        return DiagonalSet(self.d05 * k, self.d14 * k, self.d23 * k)


@dataclass(frozen=True)
class Octahedron3:
    """Шесть помеченных точек в R³"""
    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.shape != (6, 3):
            raise GeometryError(f"Ожидалось 6 точек в R³, получено {v.shape}")
        if not np.all(np.isfinite(v)):
            raise GeometryError("Координаты содержат нечисловые значения")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def scale(self) -> float:
        """Средний квадрат длины ребра"""
        return float(np.mean([np.sum((self.vertices[i] - self.vertices[j]) ** 2) for i, j in EDGES]))

    def transformed(self, linear, translation=(0.0, 0.0, 0.0)) -> "Octahedron3":
        lin = np.asarray(linear, dtype=float)
        return Octahedron3(self.vertices @ lin.T + np.asarray(translation, dtype=float))


class ConvexityStatus(str, Enum):
    CONVEX = "convex"
    NONCONVEX = "nonconvex"
    MARGINAL = "marginal"


@dataclass
class ConvexityResult:
    """Результат проверки выпуклости"""
    status: ConvexityStatus
    face: Optional[Tuple[int, int, int]] = None
    offending_vertex: Optional[int] = None
    min_margin: float = 0.0

    @property
    def is_convex(self) -> bool:
        return self.status == ConvexityStatus.CONVEX

    def to_dict(self) -> Dict:
        return {
            "status": self.status.value,
            "face": list(self.face) if self.face else None,
            "offending_vertex": self.offending_vertex,
            "min_margin": self.min_margin,
        }


def validate_development(raw: Mapping[str, float]) -> NaturalDevelopment:
    """Проверка 12 длин: набор ключей, положительность, неравенства треугольника граней"""
    errors = []

    keys = [str(k) for k in raw.keys()]
    normalized: Dict[str, float] = {}
    for key in keys:
        if len(key) != 2 or not key.isdigit():
            errors.append(f"некорректный ключ ребра '{key}'")
            continue
        i, j = int(key[0]), int(key[1])
        canon = edge_key(i, j)
        if i == j or i > 5 or j > 5:
            errors.append(f"некорректный ключ ребра '{key}'")
        elif canon in DIAGONAL_KEYS:
            errors.append(f"ключ '{key}' задает диагональ, а не ребро")
        elif canon in normalized:
            errors.append(f"ребро '{canon}' задано повторно")
        else:
            normalized[canon] = raw[key]

    for key in EDGE_KEYS:
        if key not in normalized:
            errors.append(f"отсутствует ребро '{key}'")

    lengths: Dict[str, float] = {}
    for key, value in normalized.items():
        try:
            length = float(value)
        except (TypeError, ValueError):
            errors.append(f"длина ребра '{key}' не число: {value!r}")
            continue
        if not math.isfinite(length) or length <= 0.0:
            errors.append(f"длина ребра '{key}' должна быть положительной, получено {value}")
            continue
        lengths[key] = length

    if len(lengths) == len(EDGE_KEYS):
        for face in FACES:
            a, b, c = face
            sides = sorted((lengths[edge_key(a, b)], lengths[edge_key(a, c)], lengths[edge_key(b, c)]))
            if not sides[2] < sides[0] + sides[1]:
                errors.append(f"грань {{{a},{b},{c}}} нарушает неравенство треугольника")

    if errors:
        raise DevelopmentError(errors)

    return NaturalDevelopment({key: lengths[key] for key in EDGE_KEYS})


def relabel_development(dev: NaturalDevelopment, perm: Sequence[int]) -> NaturalDevelopment:
    """Вершина i новой развертки есть вершина perm[i] исходной"""
    if sorted(perm) != list(range(6)):
        raise ValueError(f"{perm} не перестановка шести вершин")
    return NaturalDevelopment({edge_key(i, j): dev.length(perm[i], perm[j]) for i, j in EDGES})


def _face_normal(v: np.ndarray, face: Sequence[int]) -> np.ndarray:
    a, b, c = (v[i] for i in face)
    return np.cross(b - a, c - a)


def validate_octahedron(oct: Octahedron3, tol: Optional[Tolerances] = None) -> List[str]:
    """Нарушения определения октаэдра: вырожденные грани, компланарные соседние грани"""
    tol = tol or Tolerances()
    v = oct.vertices
    scale = oct.scale
    errors = []

    if scale <= 0.0:
        return ["все вершины совпадают"]

    for face in FACES:
        area2 = np.linalg.norm(_face_normal(v, face))
        if area2 / scale <= tol.eps_geom:
            errors.append(f"грань {face} имеет нулевую площадь")

    for edge in EDGES:
        f1, f2 = faces_of_edge(edge)
        quad = sorted(set(f1) | set(f2))
        p = v[quad]
        vol6 = abs(np.linalg.det(p[1:] - p[0]))
        if vol6 / scale ** 1.5 <= tol.eps_geom:
            errors.append(f"соседние грани {f1} и {f2} лежат в одной плоскости")

    return errors


def develop(oct: Octahedron3) -> NaturalDevelopment:
    """Естественная развертка: длины 12 ребер"""
    errors = [e for e in validate_octahedron(oct) if "площадь" in e or "совпадают" in e]
    if errors:
        raise GeometryError("; ".join(errors))
    v = oct.vertices
    return NaturalDevelopment({
        edge_key(i, j): float(np.linalg.norm(v[i] - v[j])) for i, j in EDGES
    })


def diagonals_of(oct: Octahedron3) -> DiagonalSet:
    """Длины трех диагоналей"""
    v = oct.vertices
    d = {f"{i}{j}": float(np.linalg.norm(v[i] - v[j])) for i, j in DIAGONALS}
    return DiagonalSet(d05=d["05"], d14=d["14"], d23=d["23"])


def assemble_sdm(dev: NaturalDevelopment, diag: DiagonalSet) -> SquaredDistanceMatrix:
    """Матрица квадратов расстояний из развертки и диагоналей"""
    s = np.zeros((6, 6), dtype=float)
    for i, j in EDGES:
        s[i, j] = s[j, i] = dev.length(i, j) ** 2
    for (i, j), d in zip(DIAGONALS, diag.as_tuple()):
        s[i, j] = s[j, i] = d ** 2
    return SquaredDistanceMatrix(s, dev.scale)


def signed_face_distances(oct: Octahedron3, tol: Optional[Tolerances] = None) -> np.ndarray:
    """
    Нормированные знаковые расстояния от трех неинцидентных вершин
    до плоскости каждой грани, форма (8, 3); порядок вершин как apexes_of_face.
    """
    tol = tol or Tolerances()
    v = oct.vertices
    length = math.sqrt(oct.scale)
    out = np.zeros((len(FACES), 3), dtype=float)

    for f, face in enumerate(FACES):
        normal = _face_normal(v, face)
        norm = np.linalg.norm(normal)
        if norm / length ** 2 <= tol.eps_geom:
            raise GeometryError(f"Плоскость грани {face} не определена")
        normal = normal / norm
        for k, apex in enumerate(apexes_of_face(face)):
            out[f, k] = float(np.dot(v[apex] - v[face[0]], normal)) / length

    return out


def is_convex(oct: Octahedron3, tol: Optional[Tolerances] = None) -> ConvexityResult:
    """Выпуклость: для каждой грани три остальные вершины строго по одну сторону ее плоскости"""
    tol = tol or Tolerances()
    dist = signed_face_distances(oct, tol)
    min_margin = float(np.min(np.abs(dist)))

    for f, face in enumerate(FACES):
        row = dist[f]
        apexes = apexes_of_face(face)
        # большинство знаков задает "внутреннюю" сторону
        side = np.sign(np.sum(np.sign(row)))
        for k, value in enumerate(row):
            if abs(value) > tol.eps_geom and np.sign(value) != side:
                return ConvexityResult(ConvexityStatus.NONCONVEX, face, apexes[k], min_margin)

    if min_margin <= tol.eps_geom:
        f, k = np.unravel_index(np.argmin(np.abs(dist)), dist.shape)
        return ConvexityResult(ConvexityStatus.MARGINAL, FACES[f], apexes_of_face(FACES[f])[k], min_margin)

    return ConvexityResult(ConvexityStatus.CONVEX, min_margin=min_margin)


def is_hull_facet_set(oct: Octahedron3) -> bool:
    """Каждая из 8 граней есть грань выпуклой оболочки шести вершин"""
    try:
        hull = ConvexHull(oct.vertices)
    except QhullError:
        return False

    if len(hull.vertices) != 6:
        return False

    # qhull триангулирует грани; копланарные треугольники склеиваются по уравнениям
    hull_faces = {tuple(sorted(int(i) for i in simplex)) for simplex in hull.simplices}
    return all(face in hull_faces for face in FACES) and len(hull_faces) == len(FACES)


def axis_octahedron(edge: Optional[float] = None) -> Octahedron3:
    """Октаэдр с вершинами ±e1, ±e2, ±e3 (x0=+e1, x5=-e1, x1=+e2, x4=-e2, x2=-e3, x3=+e3)"""
    v = np.array([
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0],
        [0.0, -1.0, 0.0],
        [-1.0, 0.0, 0.0],
    ])
    if edge is not None:
        v *= edge / math.sqrt(2.0)
    return Octahedron3(v)


def regular_development(edge: float = 1.0) -> NaturalDevelopment:
    """Развертка правильного октаэдра"""
    return NaturalDevelopment({key: float(edge) for key in EDGE_KEYS})


def iter_face_pairs() -> Iterable[Tuple[Tuple[int, int, int], Tuple[int, int]]]:
    """24 пары (грань, пара неинцидентных вершин)"""
    for face in FACES:
        apexes = apexes_of_face(face)
        for p, q in itertools.combinations(apexes, 2):
            yield face, (p, q)


def same_side_products(oct: Octahedron3, tol: Optional[Tolerances] = None) -> np.ndarray:
    """
    Для 24 пар (грань, пара неинцидентных вершин) произведение нормированных
    знаковых расстояний; положительно, если обе вершины по одну сторону грани.
    """
    dist = signed_face_distances(oct, tol)
    out = []
    for f, face in enumerate(FACES):
        apexes = apexes_of_face(face)
        for p, q in itertools.combinations(apexes, 2):
            out.append(dist[f, apexes.index(p)] * dist[f, apexes.index(q)])
    return np.array(out)
