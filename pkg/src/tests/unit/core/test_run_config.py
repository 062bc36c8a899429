"""Тесты RunConfig и его загрузчика.

Покрывает:
- значения по умолчанию и отклонение неизвестных ключей
- ошибки YAML со строкой, ошибки валидации с путём к полю
- переопределение seed через RESNET_ASR_SEED
- require_paths и report_dir по умолчанию
"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.core.constants import DEFAULT_SEED
from src.core.enums import ArchitectureKind, TaskKind, TrainingMode
from src.core.run_config import RunConfig
from src.services.run_config import effective_seed, load_run_config, require_paths
from src.shared.errors import ConfigError


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.yaml"
    path.write_text(text, encoding="utf-8")
    return path


class TestRunConfigSchema:
    """Тесты схемы."""

    def test_defaults(self):
        """Пустая конфигурация валидна."""
        config = RunConfig()
        assert config.run.architecture == ArchitectureKind.TARGET
        assert config.run.task == TaskKind.MULTICLASS
        assert config.run.training_mode == TrainingMode.CLEAN
        assert config.run.seed == DEFAULT_SEED
        assert config.report_dir is None

    def test_unknown_key_rejected(self):
        """extra=forbid на каждой секции."""
        with pytest.raises(ValidationError):
            RunConfig.model_validate({"training": {"learnin_rate": 0.1}})

    def test_fixed_features(self):
        """Фронтенд фиксирован: 40 Mel полос."""
        with pytest.raises(ValidationError):
            RunConfig.model_validate({"features": {"n_mels": 80}})

    def test_report_dir_default(self):
        """report_dir по умолчанию - <run_dir>/report."""
        config = RunConfig.model_validate({"paths": {"run_dir": "runs/a"}})
        assert config.report_dir == Path("runs/a/report")

    def test_echo_is_json(self):
        """echo даёт JSON-совместимый словарь."""
        echo = RunConfig.model_validate({"paths": {"manifest": "m.csv"}}).echo()
        assert echo["paths"]["manifest"] == "m.csv"
        assert echo["run"]["architecture"] == "target"


class TestLoadRunConfig:
    """Тесты загрузки YAML."""

    def test_loads(self, tmp_path):
        """Секции читаются из YAML."""
        path = _write(
            tmp_path,
            "run:\n  name: demo\n  training_mode: multicondition\ntraining:\n  epochs: 3\n  batch_size: 8\n",
        )
        config = load_run_config(path)
        assert config.run.name == "demo"
        assert config.run.training_mode == TrainingMode.MULTICONDITION
        assert (config.training.epochs, config.training.batch_size) == (3, 8)

    def test_empty_file(self, tmp_path):
        """Пустой файл - конфигурация по умолчанию."""
        assert load_run_config(_write(tmp_path, "")) == RunConfig()

    def test_missing_file(self, tmp_path):
        """Нет файла."""
        with pytest.raises(ConfigError) as exc_info:
            load_run_config(tmp_path / "none.yaml")
        assert exc_info.value.exit_code == 2

    def test_yaml_syntax_error_has_line(self, tmp_path):
        """Синтаксическая ошибка сообщается со строкой."""
        path = _write(tmp_path, "run:\n  name: [demo\n")
        with pytest.raises(ConfigError) as exc_info:
            load_run_config(path)
        assert exc_info.value.details["line"] is not None

    def test_validation_error_names_field(self, tmp_path):
        """Путь к полю через точку."""
        path = _write(tmp_path, "training:\n  batch_size: 1\n")
        with pytest.raises(ConfigError) as exc_info:
            load_run_config(path)
        assert exc_info.value.details["fields"] == ["training.batch_size"]

    def test_top_level_not_mapping(self, tmp_path):
        """Верхний уровень - список."""
        with pytest.raises(ConfigError):
            load_run_config(_write(tmp_path, "- a\n- b\n"))


class TestHelpers:
    """Тесты require_paths и effective_seed."""

    def test_require_paths(self):
        """Отсутствующие пути перечисляются."""
        with pytest.raises(ConfigError) as exc_info:
            require_paths(RunConfig(), "manifest", "run_dir")
        assert exc_info.value.details["missing"] == ["paths.manifest", "paths.run_dir"]

    def test_require_paths_ok(self):
        require_paths(RunConfig.model_validate({"paths": {"manifest": "m.csv"}}), "manifest")

    def test_seed_from_config(self):
        """Без переменной окружения - seed из конфигурации."""
        assert effective_seed(RunConfig.model_validate({"run": {"seed": 11}})) == 11

    def test_seed_env_override(self, monkeypatch):
        """RESNET_ASR_SEED переопределяет run.seed."""
        monkeypatch.setenv("RESNET_ASR_SEED", "99")
        assert effective_seed(RunConfig.model_validate({"run": {"seed": 11}})) == 99
