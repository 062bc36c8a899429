"""Общие фикстуры тестов ResNet ASR Lab.

Маленькие спецификации моделей, синтетический корпус в tmp директории
и изоляция от переменных окружения RESNET_ASR_*.
"""

from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest
from loguru import logger

from src.engine import Rng
from src.models import ModelSpec, ParamStore, init_params
from src.services.corpus import SynthReport, synth_corpus
from src.tests.factories import make_tiny_spec


@pytest.fixture(autouse=True)
def _isolate_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Тесты не видят RESNET_ASR_SEED и прочие переопределения из окружения."""
    for name in ("RESNET_ASR_SEED", "RESNET_ASR_APP_ENV", "RESNET_ASR_NUMERIC_CHECK"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def np_rng() -> np.random.Generator:
    """numpy генератор для тестовых данных."""
    return np.random.default_rng(0)


@pytest.fixture
def tiny_spec() -> ModelSpec:
    """Маленькая residual модель на вход 1×8×8 и 3 класса."""
    return make_tiny_spec()


@pytest.fixture
def tiny_params(tiny_spec: ModelSpec) -> ParamStore:
    """Параметры tiny_spec, seed 0."""
    return init_params(tiny_spec, Rng(0).split("init"))


@pytest.fixture(scope="session")
def corpus(tmp_path_factory: pytest.TempPathFactory) -> SynthReport:
    """Синтетический корпус: 3 токена на класс, 33 чистых и 33 зашумлённых файла."""
    return synth_corpus(tmp_path_factory.mktemp("corpus"), num_per_class=3, seed=0)


@pytest.fixture(scope="session")
def corpus_manifest(corpus: SynthReport) -> Path:
    """Путь к manifest.csv сессионного корпуса."""
    return corpus.manifest_path


@pytest.fixture
def log_messages() -> Iterator[list[dict]]:
    """Записи loguru, накопленные за время теста (message + extra)."""
    records: list[dict] = []
    sink_id = logger.add(
        lambda message: records.append(
            {
                "level": message.record["level"].name,
                "message": message.record["message"],
                "extra": dict(message.record["extra"]),
            }
        ),
        level="DEBUG",
    )
    yield records
    logger.remove(sink_id)
