"""Transfer learning: перенос параметров, заморозка и дообучение.

name_map отображает префикс источника на префикс цели. Префиксы
сопоставляются по сегментам имени ("block1" покрывает "block1.conv1.weight",
но не "block10.conv1.weight").
"""

from collections.abc import Mapping

import numpy as np

from src.core.constants import OUTPUT_HEAD_PREFIX
from src.models import ModelSpec, ParamStore, matches_prefix
from src.services.training.checkpoint import Checkpoint
from src.services.training.trainer import EpochCallback, LabeledFeatures, TrainConfig, TrainResult, train
from src.shared.errors import TransferShapeError
from src.shared.logging import get_logger, log_transfer

logger = get_logger()

NameMap = Mapping[str, str]


def _source_tensors(source: Checkpoint | ParamStore) -> dict[str, np.ndarray]:
    if isinstance(source, Checkpoint):
        return source.tensors
    return source.state()


def _rename(name: str, source_prefix: str, target_prefix: str) -> str:
    source_prefix = source_prefix.rstrip(".")
    target_prefix = target_prefix.rstrip(".")
    return target_prefix + name[len(source_prefix) :]


def transfer_init(
    source: Checkpoint | ParamStore,
    target: ParamStore,
    name_map: NameMap,
) -> tuple[ParamStore, int]:
    """Скопировать отображённые тензоры источника в копию целевого ParamStore.

    Неотображённые тензоры цели сохраняют свою инициализацию.

    Args:
        source: Чекпоинт или параметры источника
        target: Свежеинициализированные параметры цели
        name_map: Префикс источника → префикс цели

    Returns:
        (новый ParamStore, число перенесённых тензоров)

    Raises:
        TransferShapeError: Отображённый тензор отсутствует в источнике или цели,
            либо формы не совпадают (перечислены все такие имена)

    """
    tensors = _source_tensors(source)
    result = target.copy()
    pairs: list[tuple[str, str]] = []
    offending: list[str] = []

    for source_prefix, target_prefix in name_map.items():
        names = [name for name in tensors if matches_prefix(name, source_prefix)]
        if not names:
            offending.append(f"{source_prefix} (нет в источнике)")
            continue
        for name in names:
            target_name = _rename(name, source_prefix, target_prefix)
            if target_name not in result:
                offending.append(f"{name} → {target_name} (нет в цели)")
            elif tuple(tensors[name].shape) != result[target_name].shape:
                offending.append(f"{name} {tuple(tensors[name].shape)} → {target_name} {result[target_name].shape}")
            else:
                pairs.append((name, target_name))

    if offending:
        raise TransferShapeError(offending=offending)

    for name, target_name in pairs:
        result.assign(target_name, tensors[name])

    log_transfer(transferred=len(pairs), total_target=len(result), mapping_size=len(name_map))
    return result, len(pairs)


def default_name_map(source: ModelSpec, target: ModelSpec) -> dict[str, str]:
    """Все одноимённые тензоры одинаковой формы, кроме выходной головы."""
    source_shapes = {param.name: param.shape for param in source.param_shapes()}
    return {
        param.name: param.name
        for param in target.param_shapes()
        if not matches_prefix(param.name, OUTPUT_HEAD_PREFIX) and source_shapes.get(param.name) == param.shape
    }


def feature_extraction_prefixes(spec: ModelSpec) -> list[str]:
    """Префиксы всех слоёв с параметрами, кроме выходной головы."""
    prefixes = []
    for layer, (in_shape, _) in zip(spec.layers, spec.layer_shapes(), strict=True):
        if layer.name != spec.head.name and layer.param_shapes(in_shape):
            prefixes.append(layer.name)
    return prefixes


def fine_tune(
    spec: ModelSpec,
    params: ParamStore,
    train_set: LabeledFeatures,
    config: TrainConfig,
    held_out: LabeledFeatures | None = None,
    on_epoch_end: EpochCallback | None = None,
    start_epoch: int = 0,
) -> TrainResult:
    """Дообучить с заморозкой config.freeze_prefixes и fine_tune_learning_rate.

    Замороженные тензоры (включая running статистики batch norm под
    префиксом) побитово не меняются за весь запуск.
    """
    params = params.copy()
    frozen = params.freeze(config.freeze_prefixes)
    unmatched = [prefix for prefix in config.freeze_prefixes if not params.resolve([prefix])]
    if not frozen:
        logger.warning("Префиксы заморозки не совпали ни с одним тензором", prefixes=config.freeze_prefixes)
    elif unmatched:
        logger.warning("Часть префиксов заморозки не совпала ни с одним тензором", prefixes=unmatched)

    logger.info(
        "Дообучение",
        frozen_tensors=len(frozen),
        trainable_tensors=sum(1 for _ in params.trainable()),
        learning_rate=config.fine_tune_learning_rate,
    )
    tuned = config.model_copy(update={"learning_rate": config.fine_tune_learning_rate})
    return train(spec, params, train_set, tuned, held_out=held_out, on_epoch_end=on_epoch_end, start_epoch=start_epoch)
