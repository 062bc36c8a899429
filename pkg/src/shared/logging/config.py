"""Настройка Loguru для CLI.

Все записи идут в stderr: stdout занят результатами подкоманд.
"""

import logging
import sys

from loguru import logger

from src.core.config import Settings, settings
from src.core.enums import AppEnvironment
from src.shared.logging.formatters import console_formatter, json_sink_formatter
from src.shared.logging.patchers import install_run_context_patcher

# Логгеры стандартного logging, которые перенаправляются в Loguru, и их уровни
THIRD_PARTY_LEVELS: dict[str, int] = {
    "": logging.INFO,
    "librosa": logging.INFO,
    "soundfile": logging.INFO,
    "py.warnings": logging.INFO,
    "numba": logging.WARNING,
}


class InterceptHandler(logging.Handler):
    """Перенаправляет записи стандартного logging в Loguru.

    Глубина стека подбирается так, чтобы в записи остались файл и строка
    вызывающей библиотеки, а не модуля logging.
    """

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level: str | int = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        frame, depth = logging.currentframe(), 2
        while frame is not None and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def configure_third_party_loggers() -> None:
    """Подключить InterceptHandler к логгерам из THIRD_PARTY_LEVELS."""
    logging.root.handlers = []
    for name, level in THIRD_PARTY_LEVELS.items():
        std_logger = logging.getLogger(name)
        std_logger.handlers = [InterceptHandler()]
        std_logger.setLevel(level)
        std_logger.propagate = False


def setup_logging(config: Settings | None = None) -> None:
    """Пересоздать sink'и Loguru по настройкам процесса.

    production пишет JSON строки (orjson), остальные окружения пишут
    цветной текст. diagnose включается только в local.

    Args:
        config: Настройки процесса (по умолчанию глобальные settings)

    """
    config = config or settings
    logger.remove()
    install_run_context_patcher()

    production = config.app_env == AppEnvironment.PRODUCTION
    logger.add(
        sys.stderr,
        format=json_sink_formatter if production else console_formatter,
        level=config.log_level.value,
        colorize=not production,
        backtrace=True,
        diagnose=config.app_env == AppEnvironment.LOCAL,
    )

    configure_third_party_loggers()
    logging.captureWarnings(True)
    logger.debug("Логирование настроено", level=config.log_level.value, env=config.app_env.value)


def get_logger(name: str | None = None):
    """Loguru logger, при необходимости с привязанным именем модуля.

    Example:
        >>> logger = get_logger()
        >>> logger.info("Эпоха завершена", epoch=3, loss=0.41)

    """
    if name:
        return logger.bind(name=name)
    return logger
