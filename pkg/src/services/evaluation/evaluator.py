"""Оценка модели: точность, матрица ошибок, разбивка по условиям, WER.

Для изолированных слов возможна только замена, поэтому
WER = 100 − accuracy.
"""

from collections import defaultdict
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, Field
from sklearn.metrics import confusion_matrix

from src.core.constants import BINARY_CLASS_NAMES, CLASS_NAMES, DEFAULT_EVAL_BATCH_SIZE
from src.core.enums import Mode, NoiseType
from src.models import ModelSpec, ParamStore, predict_proba
from src.services.audio import FeatureExtractor
from src.services.corpus import Manifest
from src.services.corpus.manifest import ConditionKey
from src.shared.errors import InvalidArgumentError
from src.shared.logging import LogExecutionTime, get_logger

logger = get_logger()

_MODE_ORDER = {mode.value: index for index, mode in enumerate(Mode)}
_NOISE_ORDER = {noise.value: index for index, noise in enumerate(NoiseType)}


class ConditionRow(BaseModel):
    """Точность для одного условия (mode, noise_type, snr_db)."""

    mode: Mode
    noise_type: NoiseType
    snr_db: int | None = None
    count: int = Field(..., ge=0)
    correct: int = Field(..., ge=0)
    accuracy: float = Field(..., ge=0, le=100, description="Точность (%)")


class EvalReport(BaseModel):
    """Результат оценки на тестовой части.

    Инварианты: сумма матрицы = count; строка i = число примеров класса i;
    wer = 100 − accuracy.
    """

    run: str = Field(default="", description="Имя запуска")
    class_names: list[str]
    count: int = Field(..., ge=0)
    correct: int = Field(..., ge=0)
    accuracy: float = Field(..., ge=0, le=100, description="Общая точность (%)")
    confusion: list[list[int]] = Field(..., description="K×K, строки - истина, столбцы - предсказание")
    conditions: list[ConditionRow] = Field(default_factory=list)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def wer(self) -> float:
        return wer(self)

    def mode_accuracy(self, mode: Mode) -> float | None:
        """Точность по всем условиям режима или None, если их нет."""
        rows = [row for row in self.conditions if row.mode == mode]
        count = sum(row.count for row in rows)
        if count == 0:
            return None
        return 100.0 * sum(row.correct for row in rows) / count


def wer(report: EvalReport) -> float:
    """Word error rate для изолированных слов: 100 − accuracy (%)."""
    return 100.0 - report.accuracy


def default_class_names(num_classes: int) -> list[str]:
    if num_classes == len(CLASS_NAMES):
        return list(CLASS_NAMES)
    if num_classes == len(BINARY_CLASS_NAMES):
        return list(BINARY_CLASS_NAMES)
    return [str(index) for index in range(num_classes)]


def _condition_order(key: ConditionKey) -> tuple[int, int, int]:
    mode, noise_type, snr_db = key
    return (_MODE_ORDER[mode], _NOISE_ORDER[noise_type], 0 if snr_db is None else -snr_db)


def evaluate_predictions(
    labels: Sequence[int] | np.ndarray,
    predictions: Sequence[int] | np.ndarray,
    conditions: Sequence[ConditionKey],
    class_names: Sequence[str],
    run: str = "",
) -> EvalReport:
    """Собрать отчёт из истинных меток и предсказаний.

    Args:
        labels: Истинные классы
        predictions: Предсказанные классы
        conditions: Условие каждого примера (в том же порядке)
        class_names: Имена K классов
        run: Имя запуска

    Returns:
        EvalReport

    """
    truth = np.asarray(labels, dtype=np.int64)
    predicted = np.asarray(predictions, dtype=np.int64)
    if truth.shape != predicted.shape or len(conditions) != truth.size:
        raise InvalidArgumentError("Длины меток, предсказаний и условий должны совпадать")

    matrix = confusion_matrix(truth, predicted, labels=list(range(len(class_names))))
    hits = truth == predicted

    grouped: dict[ConditionKey, list[int]] = defaultdict(lambda: [0, 0])
    for key, hit in zip(conditions, hits, strict=True):
        grouped[key][0] += 1
        grouped[key][1] += int(hit)

    rows = [
        ConditionRow(
            mode=Mode(key[0]),
            noise_type=NoiseType(key[1]),
            snr_db=key[2],
            count=count,
            correct=correct,
            accuracy=100.0 * correct / count,
        )
        for key, (count, correct) in sorted(grouped.items(), key=lambda item: _condition_order(item[0]))
    ]

    correct = int(np.trace(matrix))
    return EvalReport(
        run=run,
        class_names=list(class_names),
        count=int(truth.size),
        correct=correct,
        accuracy=100.0 * correct / truth.size if truth.size else 0.0,
        confusion=matrix.astype(int).tolist(),
        conditions=rows,
    )


def evaluate(
    spec: ModelSpec,
    params: ParamStore,
    manifest: Manifest,
    extractor: FeatureExtractor,
    batch_size: int = DEFAULT_EVAL_BATCH_SIZE,
    class_names: Sequence[str] | None = None,
    run: str = "",
) -> EvalReport:
    """Оценить модель на манифесте в infer режиме.

    Предсказание - argmax вероятностей; при точном равенстве выбирается
    меньший индекс класса.

    Raises:
        InvalidArgumentError: Пустой манифест или метка вне [0, num_classes)
        MissingArtifactError: Манифест ссылается на отсутствующий файл
        UnsupportedAudioError: Файл в неподдерживаемом формате

    """
    if not manifest.records:
        raise InvalidArgumentError("empty manifest: нечего оценивать", details={"root": str(manifest.root)})
    labels = np.asarray(manifest.labels(), dtype=np.int64)
    if labels.max() >= spec.num_classes:
        raise InvalidArgumentError(f"Метка {int(labels.max())} вне [0, {spec.num_classes})")

    with LogExecutionTime("evaluate", records=len(manifest), run=run):
        features = extractor.extract_many(manifest.paths())
        predictions = np.argmax(predict_proba(spec, params, features, batch_size), axis=1)

    report = evaluate_predictions(
        labels,
        predictions,
        [record.condition for record in manifest.records],
        class_names or default_class_names(spec.num_classes),
        run=run,
    )
    logger.info(
        "Оценка завершена",
        run=run,
        count=report.count,
        accuracy=round(report.accuracy, 4),
        wer=round(report.wer, 4),
        conditions=len(report.conditions),
    )
    return report
