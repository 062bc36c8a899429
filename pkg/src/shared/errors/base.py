"""Базовый класс исключений лаборатории.

`AppException` несёт код ошибки (snake_case имени класса), сообщение,
детали и код выхода процесса. CLI печатает его в stderr как `ErrorResponse`.
"""

import re
from typing import Any

import orjson
from pydantic import BaseModel, Field

_CAMEL_BOUNDARY = re.compile(r"(?<!^)(?=[A-Z])")


class ErrorResponse(BaseModel):
    """Описание ошибки, которое CLI пишет последней строкой stderr.

    Attributes:
        error_code: Код ошибки (snake_case имени класса).
        message: Человекочитаемое описание.
        exit_code: Код выхода процесса.
        details: Дополнительные поля (путь, имя тензора, ожидаемая форма).

    """

    error_code: str = Field(..., description="Уникальный код ошибки")
    message: str = Field(..., description="Описание ошибки")
    exit_code: int = Field(..., description="Код выхода процесса")
    details: dict[str, Any] | None = Field(None, description="Дополнительные детали")


class AppException(Exception):
    """Базовое исключение приложения.

    Attributes:
        exit_code: Код выхода CLI (по умолчанию 1).
        code: Код ошибки.
        message: Описание ошибки (по умолчанию первая строка docstring класса).
        details: Дополнительная информация.

    Examples:
        >>> class StaleLockError(AppException):
        ...     '''Директория запуска занята.'''
        ...     exit_code = 2
        >>> error = StaleLockError(details={"run_dir": "runs/a"})
        >>> error.code
        'stale_lock_error'
        >>> error.message
        'Директория запуска занята.'

    """

    exit_code: int = 1

    def __init__(
        self,
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация исключения.

        Args:
            message: Описание ошибки. Если не указано, берется из docstring.
            details: Дополнительная информация об ошибке.

        """
        self.code = _CAMEL_BOUNDARY.sub("_", type(self).__name__).lower()
        self.message = message or self._default_message()
        self.details = details or {}
        super().__init__(self.message)

    @classmethod
    def _default_message(cls) -> str:
        """Первая непустая строка docstring или имя класса."""
        for line in (cls.__doc__ or "").splitlines():
            if line.strip():
                return line.strip()
        return cls.__name__

    def to_response(self) -> ErrorResponse:
        """Pydantic схема ошибки."""
        return ErrorResponse(
            error_code=self.code,
            message=self.message,
            exit_code=self.exit_code,
            details=self.details or None,
        )

    def to_json_line(self) -> str:
        """Одна JSON строка без пустых полей (numpy значения и пути приводятся к str)."""
        payload = self.to_response().model_dump(exclude_none=True)
        return orjson.dumps(payload, default=str).decode("utf-8")

    def __repr__(self) -> str:
        """Строковое представление исключения."""
        return f"{type(self).__name__}(code={self.code!r}, message={self.message!r})"
