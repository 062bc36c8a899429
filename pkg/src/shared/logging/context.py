"""Контекст запуска для корреляции логов.

Хранит run_id и имя команды CLI в contextvars; patcher добавляет их
в каждую запись лога.
"""

import contextvars
from collections.abc import Iterator
from contextlib import contextmanager

_run_id_var: contextvars.ContextVar[str | None] = contextvars.ContextVar("run_id", default=None)
_command_var: contextvars.ContextVar[str | None] = contextvars.ContextVar("command", default=None)


def get_current_run_id() -> str | None:
    """Возвращает ID текущего запуска из контекста."""
    return _run_id_var.get()


def get_current_command() -> str | None:
    """Возвращает имя текущей команды CLI из контекста."""
    return _command_var.get()


@contextmanager
def run_context(run_id: str, command: str | None = None) -> Iterator[None]:
    """Установить контекст запуска на время выполнения блока.

    Args:
        run_id: Идентификатор запуска (обычно имя директории запуска).
        command: Имя подкоманды CLI.

    Example:
        >>> with run_context("multicondition-seed1", command="train"):
        ...     logger.info("Эпоха завершена")  # run_id добавится автоматически

    """
    run_token = _run_id_var.set(run_id)
    command_token = _command_var.set(command)
    try:
        yield
    finally:
        _command_var.reset(command_token)
        _run_id_var.reset(run_token)
