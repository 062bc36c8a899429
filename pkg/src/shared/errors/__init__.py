"""Модуль обработки исключений приложения.

Предоставляет унифицированную систему исключений с автоматической генерацией
кодов ошибок, кодами выхода CLI, доменные исключения и маппинг
инфраструктурных ошибок.

Основные компоненты:
    - AppException: Базовый класс всех доменных исключений
    - ErrorResponse: Pydantic схема для сериализации ошибок
    - Доменные исключения: UsageError, ConfigError, DataError, NumericDivergenceError
    - Исключения лаборатории: ShapeMismatchError, NonFiniteError, DigestMismatchError, ...
    - ExceptionMapper: Маппинг инфраструктурных исключений на доменные

Examples:
    >>> from src.shared.errors import ShapeMismatchError
    >>> raise ShapeMismatchError(op="add", shapes=[(2,), (3,)])

    >>> from src.shared.errors import map_exception
    >>> try:
    ...     load_run_config(path)
    ... except Exception as e:
    ...     raise map_exception(e)

"""

from src.shared.errors.base import AppException, ErrorResponse
from src.shared.errors.domain_errors import (
    ConfigError,
    DataError,
    InternalError,
    NumericDivergenceError,
    RunLockedError,
    UsageError,
)
from src.shared.errors.lab_errors import (
    CheckpointFormatError,
    DigestMismatchError,
    InsufficientDataError,
    InvalidArgumentError,
    ManifestFormatError,
    MissingArtifactError,
    NonFiniteError,
    ReportWriteError,
    ShapeMismatchError,
    SignalTooShortError,
    TrainingDivergedError,
    TransferShapeError,
    TruncatedCheckpointError,
    UndefinedSnrError,
    UnsupportedAudioError,
)
from src.shared.errors.mapping import ExceptionMapper, exception_mapper, map_exception

__all__ = [
    "AppException",
    "CheckpointFormatError",
    "ConfigError",
    "DataError",
    "DigestMismatchError",
    "ErrorResponse",
    "ExceptionMapper",
    "InsufficientDataError",
    "InternalError",
    "InvalidArgumentError",
    "ManifestFormatError",
    "MissingArtifactError",
    "NonFiniteError",
    "NumericDivergenceError",
    "ReportWriteError",
    "RunLockedError",
    "ShapeMismatchError",
    "SignalTooShortError",
    "TrainingDivergedError",
    "TransferShapeError",
    "TruncatedCheckpointError",
    "UndefinedSnrError",
    "UnsupportedAudioError",
    "UsageError",
    "exception_mapper",
    "map_exception",
]
