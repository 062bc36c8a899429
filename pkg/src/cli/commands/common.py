"""Общие шаги подкоманд обучения: подготовка данных и артефакты запуска."""

import csv
from dataclasses import dataclass, field
from pathlib import Path

from src.core.constants import (
    BINARY_CLASS_NAMES,
    CHECKPOINT_PATTERN,
    HISTORY_HEADER,
    LATEST_POINTER,
    NUM_CLASSES,
)
from src.core.enums import Mode, TaskKind, TrainingMode
from src.core.run_config import RunConfig
from src.models import ModelSpec, ParamStore
from src.services.audio import FeatureStats
from src.services.corpus import Manifest, read_manifest, relabel_for_binary, split, write_manifest
from src.services.training import Checkpoint, EpochRecord, TrainConfig, load_checkpoint, save_checkpoint
from src.shared.errors import ConfigError, MissingArtifactError, UsageError
from src.shared.logging import get_logger

logger = get_logger()

TRAIN_SPLIT_CSV = "train.csv"
TEST_SPLIT_CSV = "test.csv"
HISTORY_CSV = "history.csv"


@dataclass(frozen=True)
class PreparedData:
    """Манифесты обучения и отложенной части для одного запуска."""

    train: Manifest
    test: Manifest
    num_classes: int


def num_classes_for(task: TaskKind) -> int:
    return len(BINARY_CLASS_NAMES) if task == TaskKind.BINARY else NUM_CLASSES


def report_dir_for(out: Path | None, config: RunConfig | None) -> Path:
    """Директория отчёта: --out, иначе report_dir конфигурации."""
    if out is not None:
        return out
    if config is not None and config.report_dir is not None:
        return config.report_dir
    raise UsageError("Нужен --out или --config с paths.report_dir либо paths.run_dir")


def prepare_data(
    config: RunConfig,
    run_dir: Path,
    seed: int,
    training_mode: TrainingMode | None = None,
) -> PreparedData:
    """Прочитать манифест, разбить на train/test и записать train.csv, test.csv.

    Отложенная часть всегда содержит все записи разбиения; в режиме clean
    из обучающей части убираются зашумлённые записи.

    Raises:
        ConfigError: binary задача без зашумлённых записей в обучении
        ManifestFormatError: Некорректный манифест
        InsufficientDataError: В классе меньше двух записей

    """
    task = config.run.task
    mode = training_mode or config.run.training_mode
    if task == TaskKind.BINARY and mode == TrainingMode.CLEAN:
        raise ConfigError(
            "binary задача требует training_mode: multicondition",
            details={"field": "run.training_mode"},
        )

    manifest = read_manifest(config.paths.manifest)
    dataset = split(manifest, test_fraction=config.training.test_fraction, seed=seed)
    write_manifest(dataset.train, run_dir / TRAIN_SPLIT_CSV)
    write_manifest(dataset.test, run_dir / TEST_SPLIT_CSV)

    train_part = dataset.train if mode == TrainingMode.MULTICONDITION else dataset.train.filter(Mode.CLEAN)
    train_part.require_nonempty("обучающая часть")
    test_part = dataset.test
    if task == TaskKind.BINARY:
        train_part = relabel_for_binary(train_part)
        test_part = relabel_for_binary(test_part)

    logger.info(
        "Данные подготовлены",
        train=len(train_part),
        test=len(test_part),
        task=task.value,
        training_mode=mode.value,
    )
    return PreparedData(train=train_part, test=test_part, num_classes=num_classes_for(task))


def train_config(config: RunConfig, seed: int, freeze_prefixes: list[str] | None = None) -> TrainConfig:
    """Собрать TrainConfig из секции training."""
    section = config.training
    return TrainConfig(
        learning_rate=section.learning_rate,
        fine_tune_learning_rate=section.fine_tune_learning_rate,
        batch_size=section.batch_size,
        epochs=section.epochs,
        seed=seed,
        freeze_prefixes=list(freeze_prefixes or []),
        eval_batch_size=section.eval_batch_size,
    )


def _format_record(record: EpochRecord) -> list[str]:
    return [
        str(record.epoch),
        f"{record.loss:.8f}",
        "" if record.val_accuracy is None else f"{record.val_accuracy:.4f}",
    ]


@dataclass
class RunWriter:
    """Колбэк конца эпохи: чекпоинт, указатель latest и history.csv.

    history.csv переписывается целиком после каждой эпохи, поэтому после
    возобновления файл совпадает с файлом непрерывного запуска.
    """

    run_dir: Path
    spec: ModelSpec
    stats: FeatureStats
    seed: int
    config: dict
    rows: list[list[str]] = field(default_factory=list)

    def __call__(self, record: EpochRecord, params: ParamStore) -> None:
        name = CHECKPOINT_PATTERN.format(epoch=record.epoch)
        ckpt = Checkpoint.from_run(self.spec, params, self.stats, record.epoch, self.seed, self.config)
        save_checkpoint(ckpt, self.run_dir / name)
        (self.run_dir / LATEST_POINTER).write_text(name + "\n", encoding="utf-8")

        self.rows.append(_format_record(record))
        with (self.run_dir / HISTORY_CSV).open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(HISTORY_HEADER)
            writer.writerows(self.rows)

    def load_history(self, up_to_epoch: int) -> None:
        """Подхватить строки history.csv до эпохи up_to_epoch (для resume)."""
        path = self.run_dir / HISTORY_CSV
        if not path.is_file():
            return
        with path.open(encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            next(reader, None)
            self.rows = [row for row in reader if row and int(row[0]) <= up_to_epoch]


def latest_checkpoint_path(run_dir: Path) -> Path | None:
    """Путь из указателя latest или None, если обучение ещё не сохраняло эпох."""
    pointer = run_dir / LATEST_POINTER
    if not pointer.is_file():
        return None
    return run_dir / pointer.read_text(encoding="utf-8").strip()


def load_latest(run_dir: Path) -> Checkpoint:
    """Загрузить последний чекпоинт запуска.

    Raises:
        MissingArtifactError: Указателя latest или файла чекпоинта нет

    """
    path = latest_checkpoint_path(run_dir)
    if path is None:
        raise MissingArtifactError(path=str(run_dir / LATEST_POINTER))
    return load_checkpoint(path)
