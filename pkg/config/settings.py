"""
Настройки octa-affine
Пороги численных проверок, параметры решателя и генератора (БЕЗ Pydantic)
Источник значений: переменные окружения и необязательный .env файл
"""

import logging
import os
from dataclasses import dataclass, replace
from typing import List, Optional


def get_env_bool(key: str, default: bool = False) -> bool:
    """Получить boolean значение из переменной окружения"""
    value = os.getenv(key, str(default)).lower()
    return value in ('true', '1', 'yes', 'on')


def get_env_int(key: str, default: int = 0) -> int:
    """Получить int значение из переменной окружения"""
    try:
        return int(os.getenv(key, str(default)))
    except ValueError:
        return default


def get_env_float(key: str, default: float = 0.0) -> float:
    """Получить float значение из переменной окружения"""
    try:
        return float(os.getenv(key, str(default)))
    except ValueError:
        return default


@dataclass(frozen=True)
class Tolerances:
    """Допуски всех проверок: безразмерные, одинаковые для любого масштаба"""

    eps_rel: float = 1e-9       # граница невязок равенств
    eps_geom: float = 1e-9      # полоса "marginal" для строгих неравенств
    alpha_yes: float = 1e-7     # разброс отношений, при котором ответ "equivalent"
    alpha_no: float = 1e-4      # разброс, начиная с которого "not_equivalent"
    map_tol: float = 1e-8       # невязка восстановленного аффинного отображения
    embed_tol: float = 1e-7     # ошибка расстояний после трилатерации
    bisect_rtol: float = 1e-13
    newton_max_iter: int = 50
    grid: int = 1024
    dedup_rtol: float = 1e-8

    @classmethod
    def from_settings(cls, settings: "Settings") -> "Tolerances":
        """Допуски из глобальных настроек"""
        return cls(
            eps_rel=settings.EPS_REL,
            eps_geom=settings.EPS_GEOM,
            alpha_yes=settings.ALPHA_YES,
            alpha_no=settings.ALPHA_NO,
            map_tol=settings.MAP_TOL,
            embed_tol=settings.EMBED_TOL,
            bisect_rtol=settings.BISECT_RTOL,
            newton_max_iter=settings.NEWTON_MAX_ITER,
            grid=settings.GRID,
            dedup_rtol=settings.DEDUP_RTOL,
        )

    def with_overrides(self, **overrides) -> "Tolerances":
        """Копия с заменой указанных полей (None пропускается)"""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self

    def validate(self) -> List[str]:
        """Список нарушенных инвариантов (пустой, если всё в порядке)"""
        errors = []

        for name in ("eps_rel", "eps_geom", "alpha_yes", "alpha_no", "map_tol", "embed_tol", "bisect_rtol", "dedup_rtol"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                errors.append(f"{name} должен быть в интервале (0, 1), получено {value}")

        if self.alpha_yes >= self.alpha_no:
            errors.append("alpha_yes должен быть меньше alpha_no")

        if self.grid < 8:
            errors.append("grid должен быть не меньше 8")

        if self.newton_max_iter < 1:
            errors.append("newton_max_iter должен быть положительным")

        return errors


@dataclass(frozen=True)
class GenConfig:
    """Параметры генератора случайных октаэдров"""

    seed: int = 0
    noise: float = 0.25
    affine_det_range: tuple = (0.1, 10.0)
    affine_cond_max: float = 100.0
    max_rejections: int = 1000
    translation_scale: float = 1.0

    def validate(self) -> List[str]:
        """Список нарушенных инвариантов"""
        errors = []

        if not (0.0 <= self.noise < 1.0):
            errors.append(f"noise должен быть в [0, 1), получено {self.noise}")

        lo, hi = self.affine_det_range
        if not (0.0 < lo <= hi):
            errors.append(f"affine_det_range пуст или неположителен: {self.affine_det_range}")

        if self.affine_cond_max < 1.0:
            errors.append("affine_cond_max должен быть не меньше 1")

        if self.max_rejections < 1:
            errors.append("max_rejections должен быть положительным")

        if not (0 <= self.seed < 2 ** 64):
            errors.append("seed должен быть 64-битным неотрицательным целым")

        return errors


@dataclass
class Settings:
    """Настройки приложения (БЕЗ Pydantic)"""

    def __init__(self):
        """Инициализация настроек из переменных окружения"""

        # Основные настройки
        self.APP_NAME: str = "octa-affine"
        self.APP_VERSION: str = "1.0.0"
        self.DEBUG: bool = get_env_bool("DEBUG", False)

        # Допуски проверок
        self.EPS_REL: float = get_env_float("OCTA_EPS_REL", 1e-9)
        self.EPS_GEOM: float = get_env_float("OCTA_EPS_GEOM", 1e-9)
        self.ALPHA_YES: float = get_env_float("OCTA_ALPHA_YES", 1e-7)
        self.ALPHA_NO: float = get_env_float("OCTA_ALPHA_NO", 1e-4)
        self.MAP_TOL: float = get_env_float("OCTA_MAP_TOL", 1e-8)
        self.EMBED_TOL: float = get_env_float("OCTA_EMBED_TOL", 1e-7)

        # Настройки решателя
        self.BISECT_RTOL: float = get_env_float("OCTA_BISECT_RTOL", 1e-13)
        self.NEWTON_MAX_ITER: int = get_env_int("OCTA_NEWTON_MAX_ITER", 50)
        self.GRID: int = get_env_int("OCTA_GRID", 1024)
        self.DEDUP_RTOL: float = get_env_float("OCTA_DEDUP_RTOL", 1e-8)

        # Настройки генератора
        self.SEED: int = get_env_int("OCTA_SEED", 0)
        self.NOISE: float = get_env_float("OCTA_NOISE", 0.25)
        self.MAX_REJECTIONS: int = get_env_int("OCTA_MAX_REJECTIONS", 1000)

        # Настройки логирования
        self.LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    @property
    def tolerances(self) -> Tolerances:
        """Допуски в виде неизменяемого объекта"""
        return Tolerances.from_settings(self)

    @property
    def gen_config(self) -> GenConfig:
        """Конфигурация генератора по умолчанию"""
        return GenConfig(seed=self.SEED, noise=self.NOISE, max_rejections=self.MAX_REJECTIONS)


# Глобальный экземпляр настроек
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Получить экземпляр настроек (синглтон)"""
    global _settings

    if _settings is None:
        # Загружаем .env файл если есть
        try:
            from dotenv import load_dotenv
            load_dotenv()
        except ImportError:
            pass  # dotenv не обязательный

        _settings = Settings()

        logger = logging.getLogger(__name__)
        logger.debug("🔧 Настройки загружены:")
        logger.debug(f"   Допуски: eps_rel={_settings.EPS_REL}, eps_geom={_settings.EPS_GEOM}")
        logger.debug(f"   Решение: alpha_yes={_settings.ALPHA_YES}, alpha_no={_settings.ALPHA_NO}")
        logger.debug(f"   Сетка: {_settings.GRID}, Ньютон: {_settings.NEWTON_MAX_ITER} итераций")

    return _settings


def reset_settings() -> None:
    """Сбросить синглтон (перечитать окружение при следующем обращении)"""
    global _settings
    _settings = None


def validate_settings(settings: Settings) -> bool:
    """Валидация настроек"""
    errors = []

    errors.extend(settings.tolerances.validate())
    errors.extend(settings.gen_config.validate())

    if settings.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        errors.append(f"Неверный LOG_LEVEL: {settings.LOG_LEVEL}")

    if errors:
        logger = logging.getLogger(__name__)
        logger.error("❌ Ошибки в настройках:")
        for error in errors:
            logger.error(f"   - {error}")
        return False

    return True


def get_env_example() -> str:
    """Возвращает пример .env файла"""
    return """# Допуски
OCTA_EPS_REL=1e-9
OCTA_EPS_GEOM=1e-9
OCTA_ALPHA_YES=1e-7
OCTA_ALPHA_NO=1e-4
OCTA_MAP_TOL=1e-8
OCTA_EMBED_TOL=1e-7

# Решатель
OCTA_BISECT_RTOL=1e-13
OCTA_NEWTON_MAX_ITER=50
OCTA_GRID=1024
OCTA_DEDUP_RTOL=1e-8

# Генератор
OCTA_SEED=0
OCTA_NOISE=0.25
OCTA_MAX_REJECTIONS=1000

# Логирование
LOG_LEVEL=INFO
DEBUG=false
"""


def get_settings_summary() -> dict:
    """Получить сводку текущих настроек"""
    settings = get_settings()
    tol = settings.tolerances

    return {
        "app": {
            "name": settings.APP_NAME,
            "version": settings.APP_VERSION,
            "debug": settings.DEBUG,
        },
        "tolerances": {
            "eps_rel": tol.eps_rel,
            "eps_geom": tol.eps_geom,
            "alpha_yes": tol.alpha_yes,
            "alpha_no": tol.alpha_no,
            "map_tol": tol.map_tol,
            "embed_tol": tol.embed_tol,
        },
        "solver": {
            "bisect_rtol": tol.bisect_rtol,
            "newton_max_iter": tol.newton_max_iter,
            "grid": tol.grid,
            "dedup_rtol": tol.dedup_rtol,
        },
        "generator": {
            "seed": settings.SEED,
            "noise": settings.NOISE,
            "max_rejections": settings.MAX_REJECTIONS,
        },
        "logging": {
            "level": settings.LOG_LEVEL,
        },
    }
