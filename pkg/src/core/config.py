"""Настройки процесса ResNet ASR Lab.

Конфигурация загружается из переменных окружения через pydantic-settings.
Настройки конкретного эксперимента (RunConfig) живут в YAML файлах,
см. src/core/run_config.py.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.enums import AppEnvironment, LogLevel


class ApplicationSettings(BaseSettings):
    """Основные настройки приложения."""

    app_name: str = Field(default="ResNet ASR Lab", description="Название приложения")
    app_version: str = Field(default="1.0.0", description="Версия приложения")
    app_env: AppEnvironment = Field(default=AppEnvironment.DEVELOPMENT, description="Окружение (local/development/production)")
    log_level: LogLevel = Field(default=LogLevel.INFO, description="Уровень логирования")


class ReproducibilitySettings(BaseSettings):
    """Настройки воспроизводимости."""

    seed: int | None = Field(
        default=None,
        ge=0,
        lt=2**64,
        description="Переопределение seed из RunConfig (RESNET_ASR_SEED)",
    )


class NumericSettings(BaseSettings):
    """Настройки численных проверок."""

    numeric_check: bool = Field(
        default=True,
        description="Проверять конечность активаций после каждого слоя",
    )


class Settings(
    ApplicationSettings,
    ReproducibilitySettings,
    NumericSettings,
):
    """Объединённые настройки приложения.

    Все значения загружаются из переменных окружения с префиксом RESNET_ASR_.
    """

    model_config = SettingsConfigDict(
        env_prefix="RESNET_ASR_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


def load_settings() -> Settings:
    """Перечитать настройки из окружения.

    Нужна CLI и тестам, которые меняют переменные окружения после импорта.
    """
    return Settings()


settings = Settings()
