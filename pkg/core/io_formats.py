"""
JSON форматы octa-affine
octa-dev/1 (12 длин ребер), octa-tri/1 (восемь треугольников), octa-geom/1 (координаты),
octa-diag/1 (три диагонали), а также атомарная запись результатов
"""

import json
import logging
import math
import os
import sys
import tempfile
from typing import Any, Dict, Mapping, Optional

from core.errors import DevelopmentError, FormatError, GeometryError
from core.octa_model import (
    DIAGONAL_KEYS,
    FACES,
    DiagonalSet,
    NaturalDevelopment,
    Octahedron3,
    edge_key,
    validate_development,
)


logger = logging.getLogger(__name__)

DEV_FORMAT = "octa-dev/1"
TRI_FORMAT = "octa-tri/1"
GEOM_FORMAT = "octa-geom/1"
DIAG_FORMAT = "octa-diag/1"

# относительное расхождение общей стороны двух треугольников
SHARED_SIDE_RTOL = 1e-12


def _reject_constant(name: str):
    raise FormatError(f"недопустимое числовое значение {name}")


def loads(text: str) -> Dict[str, Any]:
    """Разбор JSON-объекта; NaN и Infinity запрещены"""
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise FormatError(f"некорректный JSON: {e.msg} (строка {e.lineno}, столбец {e.colno})")
    if not isinstance(data, dict):
        raise FormatError("ожидался JSON-объект на верхнем уровне")
    return data


def load_json(path: str) -> Dict[str, Any]:
    """Чтение JSON-файла; '-' означает стандартный ввод"""
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        raise FormatError(f"не удалось прочитать {path}: {e.strerror or e}")
    except UnicodeDecodeError as e:
        raise FormatError(f"{path}: файл не в кодировке UTF-8 (байт {e.start})")
    return loads(text)


def _number(value: Any, where: str) -> float:
    # bool является подклассом int
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"{where}: ожидалось число, получено {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise FormatError(f"{where}: ожидалось конечное число")
    return value


def _check_format(data: Mapping[str, Any], expected: str) -> None:
    fmt = data.get("format")
    if fmt != expected:
        raise FormatError(f"ожидался формат '{expected}', получено {fmt!r}")


def parse_development(data: Mapping[str, Any]) -> NaturalDevelopment:
    """Развертка из octa-dev/1 или octa-tri/1"""
    fmt = data.get("format")
    if fmt == TRI_FORMAT:
        return parse_triangles(data)
    _check_format(data, DEV_FORMAT)

    edges = data.get("edges")
    if not isinstance(edges, dict):
        raise FormatError("поле 'edges' должно быть объектом")

    raw = {}
    bad = []
    for key, value in edges.items():
        try:
            raw[key] = _number(value, f"ребро '{key}'")
        except FormatError as e:
            bad.append(str(e))
    if bad:
        raise DevelopmentError(bad)

    return validate_development(raw)


def parse_triangles(data: Mapping[str, Any]) -> NaturalDevelopment:
    """
    octa-tri/1: восемь треугольников {"corners": [a, b, c], "sides": [|ab|, |bc|, |ca|]};
    множества вершин совпадают с гранями октаэдра, общие стороны согласованы
    """
    _check_format(data, TRI_FORMAT)
    triangles = data.get("triangles")
    if not isinstance(triangles, list) or len(triangles) != len(FACES):
        raise FormatError(f"поле 'triangles' должно содержать {len(FACES)} треугольников")

    errors = []
    seen = set()
    lengths: Dict[str, float] = {}
    for n, tri in enumerate(triangles):
        if not isinstance(tri, dict):
            raise FormatError(f"треугольник #{n} должен быть объектом")
        corners, sides = tri.get("corners"), tri.get("sides")
        if not (isinstance(corners, list) and len(corners) == 3 and all(isinstance(c, int) for c in corners)):
            raise FormatError(f"треугольник #{n}: 'corners' должен быть списком из трех номеров вершин")
        if not (isinstance(sides, list) and len(sides) == 3):
            raise FormatError(f"треугольник #{n}: 'sides' должен быть списком из трех длин")

        face = tuple(sorted(corners))
        if face not in FACES:
            errors.append(f"треугольник #{n}: {corners} не является гранью октаэдра")
            continue
        if face in seen:
            errors.append(f"треугольник #{n}: грань {face} задана повторно")
            continue
        seen.add(face)

        a, b, c = corners
        for (i, j), side in zip(((a, b), (b, c), (c, a)), sides):
            value = _number(side, f"треугольник #{n}, сторона {i}{j}")
            key = edge_key(i, j)
            known = lengths.get(key)
            if known is None:
                lengths[key] = value
            elif abs(known - value) > SHARED_SIDE_RTOL * max(abs(known), abs(value)):
                errors.append(f"ребро '{key}' задано по-разному: {known} и {value}")

    if errors:
        raise DevelopmentError(errors)

    return validate_development(lengths)


def parse_octahedron(data: Mapping[str, Any]) -> Octahedron3:
    """Октаэдр из octa-geom/1"""
    _check_format(data, GEOM_FORMAT)
    vertices = data.get("vertices")
    if not isinstance(vertices, list) or len(vertices) != 6:
        raise FormatError("поле 'vertices' должно содержать 6 точек")

    points = []
    for n, p in enumerate(vertices):
        if not isinstance(p, list) or len(p) != 3:
            raise FormatError(f"вершина #{n} должна быть списком из трех координат")
        points.append([_number(c, f"вершина #{n}") for c in p])

    try:
        return Octahedron3(points)
    except GeometryError as e:
        raise FormatError(str(e))


def parse_diagonals(data: Mapping[str, Any]) -> DiagonalSet:
    """Диагонали из octa-diag/1 или из результата reconstruct (поле 'diagonals')"""
    diagonals = data.get("diagonals")
    if not isinstance(diagonals, dict):
        raise FormatError("поле 'diagonals' должно быть объектом с ключами 05, 14, 23")

    missing = [k for k in DIAGONAL_KEYS if k not in diagonals]
    if missing:
        raise FormatError(f"отсутствуют диагонали: {', '.join(missing)}")

    values = {k: _number(diagonals[k], f"диагональ '{k}'") for k in DIAGONAL_KEYS}
    try:
        return DiagonalSet(d05=values["05"], d14=values["14"], d23=values["23"])
    except ValueError as e:
        raise FormatError(str(e))


def dump_development(dev: NaturalDevelopment) -> Dict[str, Any]:
    return {"format": DEV_FORMAT, "edges": dev.as_dict()}


def dump_octahedron(oct: Octahedron3) -> Dict[str, Any]:
    return {"format": GEOM_FORMAT, "vertices": [[float(c) for c in p] for p in oct.vertices]}


def dump_diagonals(diag: DiagonalSet) -> Dict[str, Any]:
    return {"format": DIAG_FORMAT, "diagonals": diag.as_dict()}


def _finite(obj: Any) -> Any:
    """Бесконечности и NaN записываются как null"""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(obj: Any, pretty: bool = False) -> str:
    """Стабильная сериализация: порядок ключей как в объекте, repr для float"""
    obj = _finite(obj)
    if pretty:
        return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False, allow_nan=False) + "\n"


def write_output(text: str, path: Optional[str] = None) -> None:
    """Запись в файл через временный файл и os.replace; без пути в stdout"""
    if not path or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return

    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(prefix=".octa-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise

    logger.debug(f"💾 Результат записан в {path}")
