"""Загрузка RunConfig из YAML."""

from src.services.run_config.loader import effective_seed, load_run_config, require_paths

__all__ = ["effective_seed", "load_run_config", "require_paths"]
