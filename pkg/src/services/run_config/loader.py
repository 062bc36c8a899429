"""RunConfig Loader - загрузка YAML конфигурации запуска.

Ошибки разбора YAML сообщаются со строкой и столбцом, ошибки валидации -
с путём к полю через точку (например, training.batch_size).
"""

from pathlib import Path

import yaml
from pydantic import ValidationError

from src.core.config import load_settings
from src.core.run_config import RunConfig
from src.shared.errors import ConfigError
from src.shared.logging import get_logger

logger = get_logger()


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        field = ".".join(str(part) for part in item["loc"]) or "<root>"
        parts.append(f"{field}: {item['msg']}")
    return "; ".join(parts)


def load_run_config(path: Path | str) -> RunConfig:
    """Прочитать и провалидировать RunConfig.

    Args:
        path: Путь к YAML файлу

    Returns:
        RunConfig

    Raises:
        ConfigError: Файла нет, YAML некорректен или не проходит валидацию

    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Файл конфигурации не найден: {path}", details={"path": str(path)})

    try:
        with path.open(encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        location = f"строка {mark.line + 1}, столбец {mark.column + 1}" if mark is not None else "позиция неизвестна"
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigError(
            f"{path}: {location}: {problem}",
            details={"path": str(path), "line": None if mark is None else mark.line + 1},
        ) from e

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: верхний уровень должен быть отображением секций", details={"path": str(path)})

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(
            f"{path}: {_format_validation_error(e)}",
            details={"path": str(path), "fields": [".".join(map(str, item["loc"])) for item in e.errors()]},
        ) from e

    logger.debug("Конфигурация загружена", path=str(path), run=config.run.name)
    return config


def require_paths(config: RunConfig, *names: str) -> None:
    """Проверить, что в секции paths заданы нужные подкоманде пути.

    Raises:
        ConfigError: Путь не задан

    """
    missing = [name for name in names if getattr(config.paths, name) is None]
    if missing:
        raise ConfigError(
            f"В секции paths не заданы: {', '.join(missing)}",
            details={"missing": [f"paths.{name}" for name in missing]},
        )


def effective_seed(config: RunConfig) -> int:
    """Seed запуска: RESNET_ASR_SEED, если задан, иначе run.seed."""
    override = load_settings().seed
    if override is not None:
        logger.info("Seed переопределён из окружения", seed=override, config_seed=config.run.seed)
        return override
    return config.run.seed
