"""Маппинг исключений сторонних библиотек на доменные.

Правило выбирается по MRO исходного исключения: `FileNotFoundError` найдёт
запись для `OSError`, а зарегистрированный подкласс перекроет правило
своего базового класса. Неизвестные исключения становятся `InternalError`.
"""

from typing import Any

import pydantic
import soundfile
import yaml

from src.shared.errors.base import AppException
from src.shared.errors.domain_errors import (
    ConfigError,
    DataError,
    InternalError,
    NumericDivergenceError,
)

_DEFAULT_RULES: dict[type[BaseException], type[AppException]] = {
    # Конфигурация
    pydantic.ValidationError: ConfigError,
    yaml.YAMLError: ConfigError,
    # Данные
    soundfile.LibsndfileError: DataError,
    UnicodeDecodeError: DataError,
    OSError: DataError,
    # Численные
    FloatingPointError: NumericDivergenceError,
    OverflowError: NumericDivergenceError,
}


def _validation_details(error: pydantic.ValidationError) -> tuple[str, dict[str, Any]]:
    fields = [
        {"field": ".".join(str(part) for part in item["loc"]), "error": item["msg"]}
        for item in error.errors()
    ]
    message = "; ".join(f"{item['field']}: {item['error']}" for item in fields)
    return message, {"fields": fields}


def _describe(error: BaseException) -> tuple[str, dict[str, Any]]:
    """Сообщение и детали, извлекаемые из исходного исключения."""
    if isinstance(error, pydantic.ValidationError):
        return _validation_details(error)

    details: dict[str, Any] = {}
    mark = getattr(error, "problem_mark", None)
    if isinstance(error, yaml.YAMLError) and mark is not None:
        details["line"] = mark.line + 1
        details["column"] = mark.column + 1
    if isinstance(error, OSError) and error.filename:
        details["path"] = str(error.filename)
    return str(error), details


class ExceptionMapper:
    """Преобразование исключений в `AppException` с кодом выхода.

    Examples:
        >>> mapper = ExceptionMapper()
        >>> isinstance(mapper.map(FileNotFoundError("manifest.csv")), DataError)
        True

    """

    def __init__(self) -> None:
        self._rules = dict(_DEFAULT_RULES)

    def register(
        self,
        exception_type: type[BaseException],
        domain_exception_type: type[AppException],
    ) -> None:
        """Добавить или заменить правило для типа исключения."""
        self._rules[exception_type] = domain_exception_type

    def resolve(self, exception_type: type[BaseException]) -> type[AppException] | None:
        """Доменный тип для исключения (ближайший класс в MRO) или None."""
        for klass in exception_type.__mro__:
            if klass in self._rules:
                return self._rules[klass]
        return None

    def map(self, exception: BaseException) -> AppException:
        """Доменное исключение для произвольного исключения."""
        if isinstance(exception, AppException):
            return exception

        domain_type = self.resolve(type(exception))
        if domain_type is None:
            return InternalError(
                message=str(exception) or type(exception).__name__,
                details={
                    "original_exception": type(exception).__name__,
                    "original_message": str(exception),
                },
            )

        message, details = _describe(exception)
        details["original_exception"] = type(exception).__name__
        return domain_type(message=message or None, details=details)


exception_mapper = ExceptionMapper()


def map_exception(exception: BaseException) -> AppException:
    """Маппинг через общий экземпляр `exception_mapper`."""
    return exception_mapper.map(exception)
