"""
Исключения octa-affine
"""

from typing import List, Optional


class OctaError(Exception):
    """Базовая ошибка библиотеки"""


class DevelopmentError(OctaError):
    """Развертка не прошла валидацию; violations перечисляет все нарушения"""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "некорректная развертка")


class GeometryError(OctaError):
    """Некорректный или вырожденный октаэдр"""


class EmbeddingError(OctaError):
    """Полуметрику не удалось вложить в R³"""

    def __init__(self, message: str, reason: Optional[str] = None):
        self.reason = reason or message
        super().__init__(message)


class NonEmbeddableError(OctaError):
    """Знак определителя Кэли-Менгера метрически невозможен"""


class SolverError(OctaError):
    """Структурная ошибка решателя"""


class FormatError(OctaError):
    """Ошибка формата входного JSON"""


class GenerationError(OctaError):
    """Генератор исчерпал лимит отказов"""
