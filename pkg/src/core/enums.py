"""Enums для ResNet ASR Lab.

Централизованное хранилище всех enum'ов проекта.
"""

from enum import Enum


class Mode(str, Enum):
    """Акустический режим высказывания."""

    CLEAN = "clean"
    NOISY = "noisy"


class NoiseType(str, Enum):
    """Сценарий шума (метро, многоголосье, автомобиль, выставочный зал)."""

    NONE = "none"
    SUBWAY = "subway"
    BABBLE = "babble"
    CAR = "car"
    EXHIBITION = "exhibition"


class Split(str, Enum):
    """Часть датасета."""

    TRAIN = "train"
    TEST = "test"


class TaskKind(str, Enum):
    """Задача классификации."""

    MULTICLASS = "multiclass"
    BINARY = "binary"


class TrainingMode(str, Enum):
    """Режим обучения: только чистые данные или multi-condition."""

    CLEAN = "clean"
    MULTICONDITION = "multicondition"


class ForwardMode(str, Enum):
    """Режим прямого прохода."""

    TRAIN = "train"
    INFER = "infer"


class Padding(str, Enum):
    """Режим паддинга свёртки."""

    SAME = "same"
    VALID = "valid"


class LayerKind(str, Enum):
    """Тип слоя в ModelSpec."""

    CONV = "conv"
    MAXPOOL = "maxpool"
    RESIDUAL = "residual"
    BOTTLENECK = "bottleneck"
    GLOBAL_AVG_POOL = "global_avg_pool"
    FLATTEN = "flatten"
    DENSE = "dense"
    DROPOUT = "dropout"


class Activation(str, Enum):
    """Функция активации после слоя."""

    NONE = "none"
    RELU = "relu"
    SOFTMAX = "softmax"


class ArchitectureKind(str, Enum):
    """Архитектура модели."""

    TARGET = "target"
    SOURCE = "source"
    CNN = "cnn"


class LogLevel(str, Enum):
    """Уровень логирования."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class AppEnvironment(str, Enum):
    """Окружение приложения."""

    LOCAL = "local"
    DEVELOPMENT = "development"
    PRODUCTION = "production"
