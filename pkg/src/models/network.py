"""Прямой проход модели по ModelSpec и ParamStore.

Слои выполняются по порядку, residual блоки считают
y = ReLU(branch(z) + shortcut(z)). При переданном trace в него
записываются выходы слоёв и внутренние тензоры блоков
("<блок>.branch", "<блок>.shortcut", "<блок>.sum").
"""

from collections.abc import Callable

import numpy as np

from src.core.config import settings
from src.core.enums import Activation, ForwardMode, LayerKind
from src.engine import (
    Rng,
    Tensor,
    add,
    batchnorm,
    bias_add,
    conv2d,
    dropout,
    flatten,
    global_avg_pool,
    matmul,
    maxpool2d,
    relu,
    softmax,
)
from src.models.params import ParamStore
from src.models.spec import BottleneckBlockSpec, LayerSpec, ModelSpec, ResidualBlockSpec
from src.shared.errors import InvalidArgumentError, NonFiniteError, ShapeMismatchError

Trace = dict[str, Tensor]


class _Runner:
    """Исполнитель одного прямого прохода."""

    def __init__(
        self,
        params: ParamStore,
        mode: ForwardMode,
        rng: Rng | None,
        trace: Trace | None,
        numeric_check: bool,
    ) -> None:
        self.params = params
        self.mode = mode
        self.rng = rng
        self.trace = trace
        self.numeric_check = numeric_check

    def record(self, name: str, value: Tensor) -> Tensor:
        if self.numeric_check and not value.is_finite():
            raise NonFiniteError(where=name)
        if self.trace is not None:
            self.trace[name] = value
        return value

    def conv_unit(
        self,
        prefix: str,
        x: Tensor,
        stride: int = 1,
        batch_norm: bool = True,
        activation: Activation = Activation.NONE,
        padding: str = "same",
    ) -> Tensor:
        """conv → (BN) → (ReLU) для параметров под префиксом."""
        out = conv2d(x, self.params[f"{prefix}.weight"], self.params[f"{prefix}.bias"], stride, padding)
        if batch_norm:
            # BN с замороженным тензором работает на running статистиках и не обновляет их
            frozen = self.params.any_frozen(prefix)
            bn_mode = ForwardMode.INFER if frozen else self.mode
            out = batchnorm(
                out,
                self.params[f"{prefix}.gamma"],
                self.params[f"{prefix}.beta"],
                self.params[f"{prefix}.running_mean"],
                self.params[f"{prefix}.running_var"],
                mode=bn_mode,
                update_stats=bn_mode == ForwardMode.TRAIN,
            )
        if activation == Activation.RELU:
            out = relu(out)
        return out

    def simple(self, layer: LayerSpec, x: Tensor) -> Tensor:
        if layer.kind == LayerKind.CONV:
            return self.conv_unit(
                layer.name,
                x,
                stride=layer.stride,
                batch_norm=layer.batch_norm,
                activation=layer.activation,
                padding=layer.padding.value,
            )
        if layer.kind == LayerKind.MAXPOOL:
            return maxpool2d(x, layer.pool_size or 1)
        if layer.kind == LayerKind.GLOBAL_AVG_POOL:
            return global_avg_pool(x)
        if layer.kind == LayerKind.FLATTEN:
            return flatten(x)
        if layer.kind == LayerKind.DENSE:
            out = bias_add(matmul(x, self.params[f"{layer.name}.weight"]), self.params[f"{layer.name}.bias"])
            return relu(out) if layer.activation == Activation.RELU else out
        if layer.kind == LayerKind.DROPOUT:
            layer_rng = self.rng.split(layer.name) if self.rng is not None else None
            return dropout(x, layer.rate or 0.0, layer_rng, self.mode)
        raise InvalidArgumentError(f"Неизвестный тип слоя: {layer.kind}")

    def residual(self, block: ResidualBlockSpec, z: Tensor) -> Tensor:
        branch = self.conv_unit(f"{block.name}.conv1", z, activation=Activation.RELU)
        branch = self.conv_unit(f"{block.name}.conv2", branch)
        shortcut = self.conv_unit(f"{block.name}.shortcut", z)
        return self._merge(block.name, branch, shortcut)

    def bottleneck(self, block: BottleneckBlockSpec, z: Tensor) -> Tensor:
        branch = self.conv_unit(f"{block.name}.conv1", z, activation=Activation.RELU)
        branch = self.conv_unit(f"{block.name}.conv2", branch, stride=block.stride, activation=Activation.RELU)
        branch = self.conv_unit(f"{block.name}.conv3", branch)
        shortcut = self.conv_unit(f"{block.name}.shortcut", z, stride=block.stride) if block.projection else z
        return self._merge(block.name, branch, shortcut)

    def _merge(self, name: str, branch: Tensor, shortcut: Tensor) -> Tensor:
        self.record(f"{name}.branch", branch)
        self.record(f"{name}.shortcut", shortcut)
        total = self.record(f"{name}.sum", add(branch, shortcut))
        return relu(total)


def forward(
    spec: ModelSpec,
    params: ParamStore,
    batch: Tensor | np.ndarray,
    mode: ForwardMode | str = ForwardMode.INFER,
    rng: Rng | None = None,
    trace: Trace | None = None,
    numeric_check: bool | None = None,
) -> Tensor:
    """Прямой проход.

    Args:
        spec: Архитектура
        params: Параметры
        batch: N×C×H×W вход
        mode: train (batch статистики, dropout) или infer
        rng: Генератор для dropout (обязателен в train режиме при dropout > 0)
        trace: Словарь для записи промежуточных тензоров
        numeric_check: Проверять конечность активаций (по умолчанию из настроек)

    Returns:
        N×K логиты

    Raises:
        ShapeMismatchError: Форма батча не совпадает с input_shape
        NonFiniteError: Неконечная активация

    """
    x = batch if isinstance(batch, Tensor) else Tensor(batch)
    if x.ndim != 4 or tuple(x.shape[1:]) != tuple(spec.input_shape):
        raise ShapeMismatchError(op="forward", shapes=[x.shape, (-1, *spec.input_shape)])

    runner = _Runner(
        params,
        ForwardMode(mode),
        rng,
        trace,
        settings.numeric_check if numeric_check is None else numeric_check,
    )

    handlers: dict[str, Callable[..., Tensor]] = {
        LayerKind.RESIDUAL.value: runner.residual,
        LayerKind.BOTTLENECK.value: runner.bottleneck,
    }
    for layer in spec.layers:
        handler = handlers.get(layer.kind, runner.simple)
        x = runner.record(layer.name, handler(layer, x))
    return x


def predict_proba(
    spec: ModelSpec,
    params: ParamStore,
    features: np.ndarray,
    batch_size: int,
) -> np.ndarray:
    """Вероятности классов в infer режиме, по батчам в порядке входа.

    Returns:
        N×K массив float64

    """
    outputs = []
    for start in range(0, features.shape[0], batch_size):
        logits = forward(spec, params, Tensor(features[start : start + batch_size]), ForwardMode.INFER)
        outputs.append(softmax(logits.data))
    if not outputs:
        return np.zeros((0, spec.num_classes))
    return np.concatenate(outputs, axis=0)
