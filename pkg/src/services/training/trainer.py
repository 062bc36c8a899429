"""Цикл обучения мини-батчами SGD.

Порядок батчей каждой эпохи - перестановка из Rng(seed).split("shuffle").split(epoch),
маски dropout - из Rng(seed).split("dropout").split(epoch).split(batch).
Поэтому (seed, конфигурация, данные) однозначно задают историю и параметры.
"""

import math
import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_EVAL_BATCH_SIZE,
    DEFAULT_FINE_TUNE_LEARNING_RATE,
    DEFAULT_LEARNING_RATE,
    DEFAULT_SEED,
)
from src.core.enums import ForwardMode
from src.engine import Rng, Tensor, softmax_xent
from src.models import ModelSpec, ParamStore, forward, predict_proba
from src.services.audio import FeatureExtractor
from src.services.corpus import Manifest
from src.services.training.optimizer import collect_grads, sgd_step
from src.shared.errors import (
    InsufficientDataError,
    InvalidArgumentError,
    NonFiniteError,
    NumericDivergenceError,
    ShapeMismatchError,
    TrainingDivergedError,
)
from src.shared.logging import get_logger, log_divergence, log_epoch

logger = get_logger()


class TrainConfig(BaseModel):
    """Гиперпараметры обучения."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = Field(default=DEFAULT_LEARNING_RATE, gt=0, description="Шаг SGD")
    fine_tune_learning_rate: float = Field(
        default=DEFAULT_FINE_TUNE_LEARNING_RATE,
        gt=0,
        description="Шаг SGD при дообучении",
    )
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, ge=2, description="Размер мини-батча (≥ 2 для batch norm)")
    epochs: int = Field(default=DEFAULT_EPOCHS, ge=1, description="Число эпох")
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64, description="Seed перемешивания и dropout")
    freeze_prefixes: list[str] = Field(default_factory=list, description="Префиксы замороженных тензоров")
    eval_batch_size: int = Field(default=DEFAULT_EVAL_BATCH_SIZE, ge=1, description="Батч для оценки")


class EpochRecord(BaseModel):
    """Итог одной эпохи."""

    epoch: int = Field(..., ge=1)
    loss: float = Field(..., description="Средний loss по обучающим примерам")
    train_accuracy: float = Field(..., ge=0, le=100, description="Точность в train режиме (%)")
    val_accuracy: float | None = Field(default=None, ge=0, le=100, description="Точность на отложенной части (%)")


@dataclass(frozen=True)
class LabeledFeatures:
    """Признаки N × 1 × 40 × 64 и метки N."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        if self.features.ndim != 4 or self.features.shape[0] != self.labels.shape[0]:
            raise ShapeMismatchError(op="labeled_features", shapes=[self.features.shape, self.labels.shape])

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @classmethod
    def from_manifest(cls, manifest: Manifest, extractor: FeatureExtractor) -> "LabeledFeatures":
        """Извлечь признаки всех записей манифеста в его порядке."""
        manifest.require_nonempty()
        return cls(
            features=extractor.extract_many(manifest.paths()),
            labels=np.asarray(manifest.labels(), dtype=np.int64),
        )


@dataclass
class TrainResult:
    params: ParamStore
    history: list[EpochRecord]


EpochCallback = Callable[[EpochRecord, ParamStore], None]


def make_batches(order: np.ndarray, batch_size: int) -> list[np.ndarray]:
    """Разбить перестановку на батчи; хвост из одного примера присоединяется к предыдущему батчу."""
    batches = [order[start : start + batch_size] for start in range(0, order.size, batch_size)]
    if len(batches) > 1 and batches[-1].size == 1:
        tail = batches.pop()
        batches[-1] = np.concatenate([batches[-1], tail])
    return batches


def accuracy(spec: ModelSpec, params: ParamStore, data: LabeledFeatures, batch_size: int) -> float:
    """Точность в infer режиме (%), argmax с выбором меньшего индекса при равенстве."""
    if len(data) == 0:
        return 0.0
    predictions = np.argmax(predict_proba(spec, params, data.features, batch_size), axis=1)
    return 100.0 * float(np.mean(predictions == data.labels))


def _train_step(
    spec: ModelSpec,
    params: ParamStore,
    data: LabeledFeatures,
    indices: np.ndarray,
    learning_rate: float,
    rng: Rng,
) -> tuple[float, int]:
    """Один шаг: forward, loss, backward, SGD. Возвращает (loss, число верных)."""
    params.zero_grad()
    labels = data.labels[indices]
    logits = forward(spec, params, Tensor(data.features[indices]), ForwardMode.TRAIN, rng=rng)
    loss, probs = softmax_xent(logits, labels)
    value = loss.item()
    if not math.isfinite(value):
        raise NonFiniteError(where="loss")
    loss.backward()
    sgd_step(params, collect_grads(params), learning_rate)
    return value, int(np.sum(np.argmax(probs.data, axis=1) == labels))


def train(
    spec: ModelSpec,
    params: ParamStore,
    train_set: LabeledFeatures,
    config: TrainConfig,
    held_out: LabeledFeatures | None = None,
    on_epoch_end: EpochCallback | None = None,
    start_epoch: int = 0,
) -> TrainResult:
    """Обучить модель.

    Переданный ParamStore не изменяется, обучается его копия (флаги
    заморозки сохраняются).

    Args:
        spec: Архитектура
        params: Начальные параметры
        train_set: Обучающие признаки
        config: Гиперпараметры (используется learning_rate)
        held_out: Отложенная часть для val_accuracy
        on_epoch_end: Вызывается после каждой эпохи (запись чекпоинта)
        start_epoch: Число уже пройденных эпох (продолжение обучения)

    Returns:
        TrainResult с финальными параметрами и историей эпох

    Raises:
        InsufficientDataError: Меньше 2 обучающих примеров
        InvalidArgumentError: Метка вне [0, num_classes)
        TrainingDivergedError: NaN/Inf в loss, активациях или градиентах

    """
    if len(train_set) < 2:
        raise InsufficientDataError("Для обучения нужно минимум 2 примера", details={"records": len(train_set)})
    for data in (train_set, held_out):
        if data is not None and len(data) and (data.labels.min() < 0 or data.labels.max() >= spec.num_classes):
            raise InvalidArgumentError(f"Метки должны быть в [0, {spec.num_classes})")

    params = params.copy()
    root = Rng(config.seed)
    history: list[EpochRecord] = []
    last_good, last_good_epoch = params.copy(), start_epoch

    logger.info(
        "Начало обучения",
        architecture=spec.architecture,
        examples=len(train_set),
        epochs=config.epochs,
        start_epoch=start_epoch,
        learning_rate=config.learning_rate,
        batch_size=config.batch_size,
        frozen=len(params.frozen),
    )

    for epoch in range(start_epoch + 1, config.epochs + 1):
        started = time.perf_counter()
        order = root.split("shuffle").split(epoch).permutation(len(train_set))
        total_loss, correct = 0.0, 0
        for batch_index, indices in enumerate(make_batches(order, config.batch_size)):
            try:
                loss, batch_correct = _train_step(
                    spec,
                    params,
                    train_set,
                    indices,
                    config.learning_rate,
                    root.split("dropout").split(epoch).split(batch_index),
                )
            except NumericDivergenceError as e:
                where = str(e.details.get("where", "loss"))
                log_divergence(epoch, batch_index, where, last_good_epoch)
                raise TrainingDivergedError(
                    epoch=epoch,
                    batch_index=batch_index,
                    last_good_epoch=last_good_epoch,
                    last_good=last_good,
                    where=where,
                ) from e
            total_loss += loss * indices.size
            correct += batch_correct

        record = EpochRecord(
            epoch=epoch,
            loss=total_loss / len(train_set),
            train_accuracy=100.0 * correct / len(train_set),
            val_accuracy=accuracy(spec, params, held_out, config.eval_batch_size) if held_out is not None else None,
        )
        history.append(record)
        log_epoch(
            epoch=epoch,
            loss=record.loss,
            val_accuracy=record.val_accuracy,
            train_accuracy=record.train_accuracy,
            elapsed_ms=(time.perf_counter() - started) * 1000,
            learning_rate=config.learning_rate,
        )
        last_good, last_good_epoch = params.copy(), epoch
        if on_epoch_end is not None:
            on_epoch_end(record, params)

    return TrainResult(params=params, history=history)
