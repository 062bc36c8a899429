"""Тесты настроек процесса.

Покрывает:
- значения по умолчанию
- load_settings перечитывает окружение на каждом вызове
"""

import pytest
from pydantic import ValidationError

from src.core.config import Settings, load_settings
from src.core.enums import AppEnvironment


class TestLoadSettings:
    """Тесты чтения настроек из окружения."""

    def test_defaults(self):
        config = load_settings()
        assert isinstance(config, Settings)
        assert config.seed is None
        assert config.numeric_check is True

    def test_environment_reread(self, monkeypatch):
        """Переменная, заданная после первого вызова, видна во втором."""
        assert load_settings().seed is None
        monkeypatch.setenv("RESNET_ASR_SEED", "7")
        monkeypatch.setenv("RESNET_ASR_APP_ENV", "production")
        config = load_settings()
        assert config.seed == 7
        assert config.app_env == AppEnvironment.PRODUCTION

    def test_negative_seed_rejected(self, monkeypatch):
        monkeypatch.setenv("RESNET_ASR_SEED", "-1")
        with pytest.raises(ValidationError):
            load_settings()
