"""Patchers для добавления контекста запуска в логи.

Обеспечивает автоматическое добавление run_id и имени команды CLI
в каждую запись лога для корреляции логов нескольких запусков.
"""

from typing import Any

from loguru import logger

from src.shared.logging.context import get_current_command, get_current_run_id


def run_context_patcher(record: dict[str, Any]) -> None:
    """Patch Loguru record для добавления run_id и command.

    Если контекст запуска не установлен, использует fallback "NO_RUN".

    Args:
        record: Loguru record dictionary, который будет модифицирован in-place

    Example:
        # В JSON формате:
        {
            "level": "INFO",
            "message": "Эпоха завершена",
            "run_id": "multicondition-seed1",
            "command": "train"
        }

    """
    record["extra"]["run_id"] = get_current_run_id() or "NO_RUN"
    command = get_current_command()
    if command:
        record["extra"]["command"] = command


def install_run_context_patcher() -> None:
    """Установить run context patcher в Loguru.

    Вызывается один раз при настройке логирования в setup_logging().
    """
    logger.configure(patcher=run_context_patcher)  # type: ignore[arg-type]
