"""Core модуль ResNet ASR Lab.

Содержит базовые компоненты: конфигурацию, enum'ы, константы, схемы RunConfig.
"""

from src.core.config import Settings, load_settings, settings
from src.core.enums import (
    Activation,
    AppEnvironment,
    ArchitectureKind,
    ForwardMode,
    LayerKind,
    LogLevel,
    Mode,
    NoiseType,
    Padding,
    Split,
    TaskKind,
    TrainingMode,
)

__all__ = [
    "Activation",
    "AppEnvironment",
    "ArchitectureKind",
    "ForwardMode",
    "LayerKind",
    "LogLevel",
    "Mode",
    "NoiseType",
    "Padding",
    "Settings",
    "Split",
    "TaskKind",
    "TrainingMode",
    "load_settings",
    "settings",
]
