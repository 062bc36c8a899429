"""Стандартные доменные исключения приложения.

Этот модуль содержит набор доменных исключений, соответствующих
кодам выхода CLI: 0 успех, 2 ошибка использования/конфигурации,
3 ошибка данных, 4 численная расходимость.
"""

from src.shared.errors.base import AppException


class UsageError(AppException):
    """Некорректное использование команды."""

    exit_code = 2


class ConfigError(AppException):
    """Ошибка конфигурации эксперимента."""

    exit_code = 2


class RunLockedError(AppException):
    """Директория запуска занята другим процессом."""

    exit_code = 2


class DataError(AppException):
    """Ошибка входных данных."""

    exit_code = 3


class NumericDivergenceError(AppException):
    """Численная расходимость обучения."""

    exit_code = 4


class InternalError(AppException):
    """Внутренняя ошибка."""

    exit_code = 1
