"""
octa-affine: восстановление выпуклых октаэдров по естественным разверткам
и проверка аффинной эквивалентности по определителям Кэли-Менгера
Консольный инструмент, данные в stdout, логи в stderr
"""

import logging
import os
import sys

# Добавляем текущую директорию в путь для импортов
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.settings import get_settings, validate_settings
from cli.commands import EXIT_INVALID, run


def setup_logging() -> None:
    """Логирование только в stderr: stdout занят данными"""
    settings = get_settings()
    level = logging.DEBUG if settings.DEBUG else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr)
        ]
    )


def main() -> int:
    setup_logging()
    if not validate_settings(get_settings()):
        return EXIT_INVALID
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
