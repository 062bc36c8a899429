"""Исключения лаборатории.

Этот модуль содержит исключения тензорного ядра, аудио фронтенда, корпуса,
обучения и отчётов. Каждое наследует доменное исключение, определяющее
код выхода CLI.
"""

from collections.abc import Sequence
from typing import Any

from src.shared.errors.domain_errors import (
    ConfigError,
    DataError,
    NumericDivergenceError,
    UsageError,
)


class ShapeMismatchError(UsageError):
    """Несовместимые формы тензоров."""

    def __init__(
        self,
        op: str | None = None,
        shapes: Sequence[Sequence[int]] | None = None,
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация ошибки.

        Args:
            op: Имя операции.
            shapes: Формы входных тензоров.
            message: Описание ошибки.
            details: Дополнительная информация.

        """
        details = details or {}
        if op:
            details["op"] = op
        if shapes is not None:
            details["shapes"] = [list(shape) for shape in shapes]
        if not message and op and shapes is not None:
            message = f"Несовместимые формы в '{op}': {details['shapes']}"
        super().__init__(message=message, details=details)


class InvalidArgumentError(UsageError):
    """Недопустимое значение аргумента."""


class NonFiniteError(NumericDivergenceError):
    """Обнаружены NaN/Inf значения."""

    def __init__(
        self,
        where: str | None = None,
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация ошибки.

        Args:
            where: Имя слоя, операции или параметра.
            message: Описание ошибки.
            details: Дополнительная информация.

        """
        details = details or {}
        if where:
            details["where"] = where
            if not message:
                message = f"Неконечные значения в '{where}'"
        super().__init__(message=message, details=details)


class UnsupportedAudioError(DataError):
    """Аудиофайл в неподдерживаемом формате."""

    def __init__(
        self,
        path: str | None = None,
        reason: str | None = None,
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация ошибки.

        Args:
            path: Путь к файлу.
            reason: Причина отказа (например, "unsupported sample rate").
            message: Описание ошибки.
            details: Дополнительная информация.

        """
        details = details or {}
        if path:
            details["path"] = path
        if reason:
            details["reason"] = reason
        if not message and reason:
            message = f"Файл '{path}' отклонён: {reason}"
        super().__init__(message=message, details=details)


class SignalTooShortError(DataError):
    """Сигнал короче одного кадра анализа."""


class UndefinedSnrError(DataError):
    """SNR не определён для нулевого сигнала или шума."""


class InsufficientDataError(DataError):
    """Недостаточно записей для операции."""


class ManifestFormatError(DataError):
    """Некорректный формат манифеста."""

    def __init__(
        self,
        path: str | None = None,
        line: int | None = None,
        reason: str | None = None,
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация ошибки.

        Args:
            path: Путь к манифесту.
            line: Номер строки (с 1).
            reason: Описание проблемы.
            message: Описание ошибки.
            details: Дополнительная информация.

        """
        details = details or {}
        if path:
            details["path"] = path
        if line is not None:
            details["line"] = line
        if reason:
            details["reason"] = reason
        if not message and reason:
            message = f"Манифест '{path}', строка {line}: {reason}"
        super().__init__(message=message, details=details)


class MissingArtifactError(DataError):
    """Не найден файл, на который ссылается запуск."""

    def __init__(
        self,
        path: str | None = None,
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация ошибки.

        Args:
            path: Путь к отсутствующему файлу.
            message: Описание ошибки.
            details: Дополнительная информация.

        """
        details = details or {}
        if path:
            details["path"] = path
            if not message:
                message = f"Файл не найден: {path}"
        super().__init__(message=message, details=details)


class CheckpointFormatError(DataError):
    """Повреждённый заголовок чекпоинта."""

    def __init__(
        self,
        path: str | None = None,
        reason: str | None = None,
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация ошибки.

        Args:
            path: Путь к чекпоинту.
            reason: Причина (например, "corrupt header", "truncated payload").
            message: Описание ошибки.
            details: Дополнительная информация.

        """
        details = details or {}
        if path:
            details["path"] = path
        if reason:
            details["reason"] = reason
        if not message and reason:
            message = f"Чекпоинт '{path}': {reason}"
        super().__init__(message=message, details=details)


class TruncatedCheckpointError(CheckpointFormatError):
    """Чекпоинт обрезан (truncated payload)."""


class DigestMismatchError(ConfigError):
    """Дайджест не совпадает с ожидаемым."""

    def __init__(
        self,
        expected: str | None = None,
        actual: str | None = None,
        kind: str = "spec",
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация ошибки.

        Args:
            expected: Ожидаемый дайджест.
            actual: Фактический дайджест.
            kind: Что сверяется ("spec" или "payload").
            message: Описание ошибки.
            details: Дополнительная информация.

        """
        details = details or {}
        details["kind"] = kind
        if expected is not None:
            details["expected"] = expected
        if actual is not None:
            details["actual"] = actual
        if not message:
            message = f"digest mismatch ({kind}): ожидался {expected}, получен {actual}"
        super().__init__(message=message, details=details)
        if kind == "payload":
            self.exit_code = DataError.exit_code


class TransferShapeError(UsageError):
    """Несовпадение форм при переносе параметров."""

    def __init__(
        self,
        offending: Sequence[str] | None = None,
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация ошибки.

        Args:
            offending: Имена тензоров, которые нельзя перенести.
            message: Описание ошибки.
            details: Дополнительная информация.

        """
        details = details or {}
        if offending:
            details["offending"] = list(offending)
            if not message:
                message = f"Нельзя перенести тензоры: {', '.join(offending)}"
        super().__init__(message=message, details=details)


class ReportWriteError(DataError):
    """Не удалось записать файлы отчёта."""


class TrainingDivergedError(NumericDivergenceError):
    """Обучение разошлось (NaN/Inf в потерях, активациях или градиентах)."""

    def __init__(
        self,
        epoch: int,
        batch_index: int,
        last_good_epoch: int,
        last_good: Any = None,
        where: str | None = None,
        message: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Инициализация ошибки.

        Args:
            epoch: Эпоха, на которой обнаружено расхождение.
            batch_index: Номер батча в эпохе.
            last_good_epoch: Последняя эпоха с конечными параметрами.
            last_good: Параметры после last_good_epoch.
            where: Место обнаружения (слой, loss или параметр).
            message: Описание ошибки.
            details: Дополнительная информация.

        """
        details = details or {}
        details.update({"epoch": epoch, "batch_index": batch_index, "last_good_epoch": last_good_epoch})
        if where:
            details["where"] = where
        if not message:
            message = f"Обучение разошлось на эпохе {epoch}, батч {batch_index}"
        self.last_good = last_good
        self.last_good_epoch = last_good_epoch
        super().__init__(message=message, details=details)
