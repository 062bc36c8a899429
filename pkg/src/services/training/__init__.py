"""Обучение: SGD, цикл обучения, transfer learning и чекпоинты."""

from src.services.training.checkpoint import (
    Checkpoint,
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    require_matching_spec,
    save_checkpoint,
)
from src.services.training.optimizer import collect_grads, sgd_step
from src.services.training.trainer import (
    EpochRecord,
    LabeledFeatures,
    TrainConfig,
    TrainResult,
    accuracy,
    make_batches,
    train,
)
from src.services.training.transfer import (
    default_name_map,
    feature_extraction_prefixes,
    fine_tune,
    transfer_init,
)

__all__ = [
    "Checkpoint",
    "EpochRecord",
    "LabeledFeatures",
    "TrainConfig",
    "TrainResult",
    "accuracy",
    "collect_grads",
    "decode_checkpoint",
    "default_name_map",
    "encode_checkpoint",
    "feature_extraction_prefixes",
    "fine_tune",
    "load_checkpoint",
    "make_batches",
    "require_matching_spec",
    "save_checkpoint",
    "sgd_step",
    "train",
    "transfer_init",
]
