"""Архитектуры моделей: спецификации, параметры, построители и прямой проход."""

from src.models.builders import (
    build_cnn_baseline,
    build_from_spec,
    build_model,
    build_source,
    build_target,
    cnn_baseline_spec,
    source_spec,
    target_spec,
)
from src.models.network import Trace, forward, predict_proba
from src.models.params import ParamStore, init_params, matches_prefix
from src.models.spec import (
    BottleneckBlockSpec,
    LayerSpec,
    ModelSpec,
    ParamShape,
    ResidualBlockSpec,
)

__all__ = [
    "BottleneckBlockSpec",
    "LayerSpec",
    "ModelSpec",
    "ParamShape",
    "ParamStore",
    "ResidualBlockSpec",
    "Trace",
    "build_cnn_baseline",
    "build_from_spec",
    "build_model",
    "build_source",
    "build_target",
    "cnn_baseline_spec",
    "forward",
    "init_params",
    "matches_prefix",
    "predict_proba",
    "source_spec",
    "target_spec",
]
