"""Модуль структурированного логирования.

Предоставляет единый интерфейс для логирования во всем приложении:
- Автоматическое добавление run_id текущего запуска
- JSON формат для production structured logging
- Human-readable формат для development
- Специализированные функции для логирования обучения

Основное использование:
    >>> from src.shared.logging import setup_logging, get_logger
    >>> setup_logging()  # Вызвать один раз при старте
    >>> logger = get_logger(__name__)
    >>> logger.info("Test message")  # run_id добавится автоматически
"""

from src.shared.logging.config import (
    InterceptHandler,
    configure_third_party_loggers,
    get_logger,
    setup_logging,
)
from src.shared.logging.context import get_current_command, get_current_run_id, run_context
from src.shared.logging.formatters import (
    console_formatter,
    json_formatter,
)
from src.shared.logging.helpers import (
    LogExecutionTime,
    log_divergence,
    log_epoch,
    log_transfer,
)
from src.shared.logging.patchers import (
    install_run_context_patcher,
    run_context_patcher,
)

__all__ = [
    "InterceptHandler",
    "LogExecutionTime",
    "configure_third_party_loggers",
    "console_formatter",
    "get_current_command",
    "get_current_run_id",
    "get_logger",
    "install_run_context_patcher",
    "json_formatter",
    "log_divergence",
    "log_epoch",
    "log_transfer",
    "run_context",
    "run_context_patcher",
    "setup_logging",
]
