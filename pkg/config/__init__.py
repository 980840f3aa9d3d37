"""
Конфигурационный пакет octa-affine
Содержит настройки, допуски и параметры генератора
"""

from .settings import GenConfig, Settings, Tolerances, get_settings, validate_settings

__all__ = ["GenConfig", "Settings", "Tolerances", "get_settings", "validate_settings"]
