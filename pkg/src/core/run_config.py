"""RunConfig - Pydantic схемы конфигурации эксперимента.

YAML файл с секциями run, paths, training, features, transfer.
Неизвестные ключи отклоняются (extra="forbid"). Конфигурация целиком
записывается в метаданные чекпоинта.
"""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from src.core.constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_EVAL_BATCH_SIZE,
    DEFAULT_FINE_TUNE_LEARNING_RATE,
    DEFAULT_LEARNING_RATE,
    DEFAULT_SEED,
    DEFAULT_TEST_FRACTION,
    N_FRAMES,
    N_MELS,
    SAMPLE_RATE,
)
from src.core.enums import ArchitectureKind, TaskKind, TrainingMode


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RunSection(_Section):
    """Что обучаем и на каких данных."""

    name: str = Field(default="run", min_length=1, description="Имя запуска (run_id в логах)")
    architecture: ArchitectureKind = Field(default=ArchitectureKind.TARGET, description="target | source | cnn")
    task: TaskKind = Field(default=TaskKind.MULTICLASS, description="multiclass (11 классов) или binary (clean/noisy)")
    training_mode: TrainingMode = Field(
        default=TrainingMode.CLEAN,
        description="clean - только чистые записи в обучении, multicondition - чистые и зашумлённые",
    )
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64, description="Seed (переопределяется RESNET_ASR_SEED)")


class PathsSection(_Section):
    """Пути (относительные - от текущей директории)."""

    manifest: Path | None = Field(default=None, description="Манифест корпуса (CSV)")
    run_dir: Path | None = Field(default=None, description="Директория запуска: чекпоинты, history.csv, split")
    report_dir: Path | None = Field(default=None, description="Директория отчёта (по умолчанию <run_dir>/report)")


class TrainingSection(_Section):
    """Гиперпараметры SGD."""

    learning_rate: float = Field(default=DEFAULT_LEARNING_RATE, gt=0)
    fine_tune_learning_rate: float = Field(default=DEFAULT_FINE_TUNE_LEARNING_RATE, gt=0)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=2)
    epochs: int = Field(default=DEFAULT_EPOCHS, ge=1)
    eval_batch_size: int = Field(default=DEFAULT_EVAL_BATCH_SIZE, ge=1)
    test_fraction: float = Field(default=DEFAULT_TEST_FRACTION, gt=0, lt=1)


class FeaturesSection(_Section):
    """Параметры фронтенда (фиксированы форматом признаков 40 × 64 при 8000 Гц)."""

    sample_rate: Literal[8000] = SAMPLE_RATE
    n_mels: Literal[40] = N_MELS
    n_frames: Literal[64] = N_FRAMES


class TransferSection(_Section):
    """Перенос параметров и заморозка."""

    source_checkpoint: Path | None = Field(default=None, description="Чекпоинт предобученной модели")
    freeze: list[str] = Field(default_factory=list, description="Префиксы замороженных тензоров")
    feature_extraction: bool = Field(default=False, description="Заморозить всё, кроме выходной головы")
    name_map: dict[str, str] | None = Field(
        default=None,
        description="Префикс источника → префикс цели (по умолчанию все совпадающие тензоры кроме головы)",
    )


class RunConfig(_Section):
    """Конфигурация одного запуска."""

    run: RunSection = Field(default_factory=RunSection)
    paths: PathsSection = Field(default_factory=PathsSection)
    training: TrainingSection = Field(default_factory=TrainingSection)
    features: FeaturesSection = Field(default_factory=FeaturesSection)
    transfer: TransferSection = Field(default_factory=TransferSection)

    @property
    def report_dir(self) -> Path | None:
        if self.paths.report_dir is not None:
            return self.paths.report_dir
        return None if self.paths.run_dir is None else self.paths.run_dir / "report"

    def echo(self) -> dict:
        """JSON-совместимое представление для метаданных чекпоинта."""
        return self.model_dump(mode="json")
