"""Helper функции для структурированного логирования.

Предоставляет специализированные функции для логирования:
- Эпох обучения (loss, accuracy, длительность)
- Расходимости обучения (NaN/Inf)
- Переноса параметров между моделями
- Времени выполнения операций
"""

import time
from typing import Any

from loguru import logger


def log_epoch(
    epoch: int,
    loss: float,
    val_accuracy: float | None = None,
    train_accuracy: float | None = None,
    elapsed_ms: float | None = None,
    learning_rate: float | None = None,
) -> None:
    """Логировать итог эпохи обучения.

    Args:
        epoch: Номер эпохи (с 1)
        loss: Средний loss по эпохе
        val_accuracy: Точность на отложенной выборке (%)
        train_accuracy: Точность на обучающей выборке (%)
        elapsed_ms: Длительность эпохи в миллисекундах
        learning_rate: Текущий learning rate

    Example:
        >>> log_epoch(epoch=3, loss=0.412, val_accuracy=87.5, elapsed_ms=5234.1)

    """
    log_data: dict[str, Any] = {
        "event": "epoch_completed",
        "epoch": epoch,
        "loss": round(loss, 6),
    }

    if train_accuracy is not None:
        log_data["train_accuracy"] = round(train_accuracy, 4)

    if val_accuracy is not None:
        log_data["val_accuracy"] = round(val_accuracy, 4)

    if learning_rate is not None:
        log_data["learning_rate"] = learning_rate

    if elapsed_ms is not None:
        log_data["latency_ms"] = round(elapsed_ms, 2)

    logger.info(f"Эпоха {epoch} завершена", **log_data)


def log_divergence(
    epoch: int,
    batch_index: int,
    where: str,
    last_good_epoch: int | None = None,
) -> None:
    """Логировать расходимость обучения.

    Args:
        epoch: Номер эпохи, на которой обнаружен NaN/Inf
        batch_index: Индекс мини-батча
        where: Где обнаружены неконечные значения (loss, имя параметра)
        last_good_epoch: Последняя эпоха с конечными параметрами

    """
    logger.error(
        f"Обучение разошлось на эпохе {epoch}",
        event="training_diverged",
        epoch=epoch,
        batch_index=batch_index,
        where=where,
        last_good_epoch=last_good_epoch,
    )


def log_transfer(
    transferred: int,
    total_target: int,
    mapping_size: int,
) -> None:
    """Логировать результат переноса параметров.

    Args:
        transferred: Количество перенесённых тензоров
        total_target: Всего тензоров в целевой модели
        mapping_size: Количество записей в name_map

    """
    logger.info(
        "Параметры перенесены",
        event="transfer_init",
        transferred=transferred,
        total_target=total_target,
        mapping_size=mapping_size,
    )


class LogExecutionTime:
    """Замер длительности блока: DEBUG на входе, INFO или ERROR на выходе.

    Example:
        >>> with LogExecutionTime("feature_extraction", files=2412) as timer:
        ...     batch = extractor.extract_many(paths)
        >>> timer.elapsed_ms

    """

    def __init__(self, operation: str, **extra_fields: Any) -> None:
        self.operation = operation
        self.extra_fields = extra_fields
        self.elapsed_ms = 0.0
        self._started = 0.0

    def __enter__(self) -> "LogExecutionTime":
        self._started = time.perf_counter()
        logger.debug(f"Начало: {self.operation}", operation=self.operation, **self.extra_fields)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.elapsed_ms = (time.perf_counter() - self._started) * 1000
        fields = {"operation": self.operation, "latency_ms": round(self.elapsed_ms, 2), **self.extra_fields}
        if exc_type is None:
            logger.info(f"Готово: {self.operation} ({self.elapsed_ms:.2f}ms)", **fields)
        else:
            logger.error(
                f"Сбой: {self.operation} ({self.elapsed_ms:.2f}ms)",
                error_type=exc_type.__name__,
                error_message=str(exc_val),
                **fields,
            )
