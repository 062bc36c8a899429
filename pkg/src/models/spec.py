"""ModelSpec - декларативное описание архитектуры.

Содержит:
- LayerSpec: простые слои (conv, maxpool, global_avg_pool, flatten, dense, dropout)
- ResidualBlockSpec: два 3×3 conv + BN с 1×1 проекцией в shortcut
- BottleneckBlockSpec: 1×1 → 3×3 → 1×1 блок ResNet-50
- ModelSpec: упорядоченный список слоёв + форма входа, с проверкой
  согласованности форм при построении

Имена параметров строятся из имён слоёв: stem.conv.weight, block2.conv1.gamma,
stage3.block1.shortcut.weight, head.bias.
"""

from math import ceil, prod
from typing import Annotated, Literal

import orjson
import xxhash
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.enums import Activation, ArchitectureKind, LayerKind, Padding
from src.shared.errors import ShapeMismatchError

Shape = tuple[int, ...]

BN_TENSORS: tuple[str, ...] = ("gamma", "beta", "running_mean", "running_var")
BN_BUFFERS: tuple[str, ...] = ("running_mean", "running_var")


class ParamShape(BaseModel):
    """Описание одного тензора параметров."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Каноническое имя (stem.conv.weight)")
    shape: Shape = Field(..., description="Форма тензора")
    fan_in: int = Field(default=0, ge=0, description="fan_in для He-uniform (0 = не весовой тензор)")
    fill: float = Field(default=0.0, description="Начальное значение не весовых тензоров")
    buffer: bool = Field(default=False, description="Буфер (running статистики), не обучается")


def _conv_out(extent: int, kernel: int, stride: int, padding: Padding) -> int:
    if padding == Padding.SAME:
        return ceil(extent / stride)
    return (extent - kernel) // stride + 1


def conv_param_shapes(prefix: str, in_channels: int, filters: int, kernel: int, batch_norm: bool) -> list[ParamShape]:
    """Параметры свёртки (weight, bias) и batch norm (gamma, beta, running stats)."""
    shapes = [
        ParamShape(
            name=f"{prefix}.weight",
            shape=(filters, in_channels, kernel, kernel),
            fan_in=in_channels * kernel * kernel,
        ),
        ParamShape(name=f"{prefix}.bias", shape=(filters,)),
    ]
    if batch_norm:
        shapes += [
            ParamShape(name=f"{prefix}.gamma", shape=(filters,), fill=1.0),
            ParamShape(name=f"{prefix}.beta", shape=(filters,)),
            ParamShape(name=f"{prefix}.running_mean", shape=(filters,), buffer=True),
            ParamShape(name=f"{prefix}.running_var", shape=(filters,), fill=1.0, buffer=True),
        ]
    return shapes


class LayerSpec(BaseModel):
    """Простой слой.

    Используемые поля зависят от kind:
    - conv: filters, kernel_size, stride, padding, batch_norm, activation
    - maxpool: pool_size
    - dense: units, activation (softmax помечает выходную голову)
    - dropout: rate
    - global_avg_pool, flatten: без параметров
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["conv", "maxpool", "global_avg_pool", "flatten", "dense", "dropout"]
    name: str = Field(..., min_length=1, description="Префикс имён параметров слоя")
    filters: int | None = Field(default=None, ge=1)
    kernel_size: int | None = Field(default=None, ge=1)
    stride: int = Field(default=1, ge=1)
    padding: Padding = Padding.SAME
    batch_norm: bool = False
    pool_size: int | None = Field(default=None, ge=1)
    units: int | None = Field(default=None, ge=1)
    rate: float | None = Field(default=None, ge=0.0, lt=1.0)
    activation: Activation = Activation.NONE

    @model_validator(mode="after")
    def _check_fields(self) -> "LayerSpec":
        required = {
            LayerKind.CONV.value: ("filters", "kernel_size"),
            LayerKind.MAXPOOL.value: ("pool_size",),
            LayerKind.DENSE.value: ("units",),
            LayerKind.DROPOUT.value: ("rate",),
        }.get(self.kind, ())
        missing = [field for field in required if getattr(self, field) is None]
        if missing:
            raise ValueError(f"Слой '{self.name}' ({self.kind}) требует поля: {', '.join(missing)}")
        return self

    @property
    def is_head(self) -> bool:
        return self.kind == LayerKind.DENSE and self.activation == Activation.SOFTMAX

    def out_shape(self, in_shape: Shape) -> Shape:
        """Форма выхода для одного примера (без оси батча)."""
        if self.kind == LayerKind.CONV:
            _require_rank(self.name, in_shape, 3)
            channels, height, width = in_shape
            out_h = _conv_out(height, self.kernel_size or 1, self.stride, self.padding)
            out_w = _conv_out(width, self.kernel_size or 1, self.stride, self.padding)
            if out_h < 1 or out_w < 1:
                raise ShapeMismatchError(
                    op=self.name,
                    shapes=[in_shape],
                    message=f"Вход {height}×{width} слишком мал для ядра {self.kernel_size} в '{self.name}'",
                )
            return (self.filters or 0, out_h, out_w)
        if self.kind == LayerKind.MAXPOOL:
            _require_rank(self.name, in_shape, 3)
            channels, height, width = in_shape
            pool = self.pool_size or 1
            if height // pool < 1 or width // pool < 1:
                raise ShapeMismatchError(
                    op=self.name,
                    shapes=[in_shape],
                    message=f"Вход {height}×{width} слишком мал для пулинга в '{self.name}'",
                )
            return (channels, height // pool, width // pool)
        if self.kind == LayerKind.GLOBAL_AVG_POOL:
            _require_rank(self.name, in_shape, 3)
            return (in_shape[0],)
        if self.kind == LayerKind.FLATTEN:
            return (prod(in_shape),)
        if self.kind == LayerKind.DENSE:
            _require_rank(self.name, in_shape, 1)
            return (self.units or 0,)
        return in_shape

    def param_shapes(self, in_shape: Shape) -> list[ParamShape]:
        if self.kind == LayerKind.CONV:
            return conv_param_shapes(self.name, in_shape[0], self.filters or 0, self.kernel_size or 1, self.batch_norm)
        if self.kind == LayerKind.DENSE:
            units = self.units or 0
            return [
                ParamShape(name=f"{self.name}.weight", shape=(in_shape[0], units), fan_in=in_shape[0]),
                ParamShape(name=f"{self.name}.bias", shape=(units,)),
            ]
        return []


class ResidualBlockSpec(BaseModel):
    """Residual блок: y = ReLU(branch(z) + shortcut(z)).

    branch: conv1 3×3 + BN + ReLU → conv2 3×3 + BN
    shortcut: 1×1 проекция + BN (совпадение числа фильтров)
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["residual"] = "residual"
    name: str = Field(..., min_length=1)
    in_channels: int = Field(..., ge=1)
    out_channels: int = Field(..., ge=1)
    kernel_size: int = Field(default=3, ge=1)

    def out_shape(self, in_shape: Shape) -> Shape:
        _require_rank(self.name, in_shape, 3)
        if in_shape[0] != self.in_channels:
            raise ShapeMismatchError(
                op=self.name,
                shapes=[in_shape],
                message=f"'{self.name}' ожидает {self.in_channels} каналов, получено {in_shape[0]}",
            )
        return (self.out_channels, in_shape[1], in_shape[2])

    def param_shapes(self, in_shape: Shape) -> list[ParamShape]:
        return [
            *conv_param_shapes(f"{self.name}.conv1", self.in_channels, self.out_channels, self.kernel_size, True),
            *conv_param_shapes(f"{self.name}.conv2", self.out_channels, self.out_channels, self.kernel_size, True),
            *conv_param_shapes(f"{self.name}.shortcut", self.in_channels, self.out_channels, 1, True),
        ]


class BottleneckBlockSpec(BaseModel):
    """Bottleneck блок ResNet-50: 1×1 (f1) → 3×3 (f2, stride) → 1×1 (f3).

    Shortcut - 1×1 проекция со stride, если projection, иначе тождественный.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["bottleneck"] = "bottleneck"
    name: str = Field(..., min_length=1)
    in_channels: int = Field(..., ge=1)
    filters: tuple[int, int, int]
    stride: int = Field(default=1, ge=1)
    projection: bool = False

    @model_validator(mode="after")
    def _check_identity(self) -> "BottleneckBlockSpec":
        if not self.projection and (self.in_channels != self.filters[2] or self.stride != 1):
            raise ValueError(f"'{self.name}': тождественный shortcut требует in_channels == f3 и stride 1")
        return self

    def out_shape(self, in_shape: Shape) -> Shape:
        _require_rank(self.name, in_shape, 3)
        if in_shape[0] != self.in_channels:
            raise ShapeMismatchError(
                op=self.name,
                shapes=[in_shape],
                message=f"'{self.name}' ожидает {self.in_channels} каналов, получено {in_shape[0]}",
            )
        return (self.filters[2], ceil(in_shape[1] / self.stride), ceil(in_shape[2] / self.stride))

    def param_shapes(self, in_shape: Shape) -> list[ParamShape]:
        f1, f2, f3 = self.filters
        shapes = [
            *conv_param_shapes(f"{self.name}.conv1", self.in_channels, f1, 1, True),
            *conv_param_shapes(f"{self.name}.conv2", f1, f2, 3, True),
            *conv_param_shapes(f"{self.name}.conv3", f2, f3, 1, True),
        ]
        if self.projection:
            shapes += conv_param_shapes(f"{self.name}.shortcut", self.in_channels, f3, 1, True)
        return shapes


Layer = Annotated[LayerSpec | ResidualBlockSpec | BottleneckBlockSpec, Field(discriminator="kind")]


def _require_rank(name: str, shape: Shape, rank: int) -> None:
    if len(shape) != rank:
        raise ShapeMismatchError(
            op=name,
            shapes=[shape],
            message=f"'{name}' ожидает вход ранга {rank}, получено {shape}",
        )


class ModelSpec(BaseModel):
    """Архитектура модели: форма входа и упорядоченные слои.

    Инварианты (проверяются при построении):
    - формы соседних слоёв согласованы
    - ровно одна выходная голова (dense с softmax), и она последняя
    - num_classes ≥ 2 и совпадает с шириной головы
    - имена слоёв уникальны

    Raises:
        ShapeMismatchError: Формы слоёв не согласуются (например, вход слишком мал)
        pydantic.ValidationError: Нарушены остальные инварианты

    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    architecture: ArchitectureKind = Field(..., description="Семейство архитектуры")
    input_shape: tuple[int, int, int] = Field(..., description="Каналы × mel полосы × кадры")
    num_classes: int = Field(..., ge=2, description="Число классов выходной головы")
    layers: list[Layer] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_layers(self) -> "ModelSpec":
        if min(self.input_shape) < 1:
            raise ValueError(f"Форма входа должна быть положительной: {self.input_shape}")

        names = [layer.name for layer in self.layers]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"Имена слоёв не уникальны: {', '.join(duplicates)}")

        heads = [layer for layer in self.layers if isinstance(layer, LayerSpec) and layer.is_head]
        if len(heads) != 1 or heads[0] is not self.layers[-1]:
            raise ValueError("Нужна ровно одна выходная голова (dense + softmax) в конце")

        final = self.layer_shapes()[-1][1]
        if final != (self.num_classes,):
            raise ValueError(f"Ширина головы {final} не совпадает с num_classes={self.num_classes}")
        return self

    @property
    def head(self) -> LayerSpec:
        head = self.layers[-1]
        assert isinstance(head, LayerSpec)
        return head

    def layer_shapes(self) -> list[tuple[Shape, Shape]]:
        """(вход, выход) каждого слоя для одного примера."""
        shapes: list[tuple[Shape, Shape]] = []
        current: Shape = tuple(self.input_shape)
        for layer in self.layers:
            out = layer.out_shape(current)
            shapes.append((current, out))
            current = out
        return shapes

    def param_shapes(self) -> list[ParamShape]:
        """Все тензоры параметров и буферов в каноническом порядке."""
        result: list[ParamShape] = []
        for layer, (in_shape, _) in zip(self.layers, self.layer_shapes(), strict=True):
            result += layer.param_shapes(in_shape)
        return result

    def count_parameters(self) -> int:
        """Число обучаемых скаляров (без running статистик)."""
        return sum(prod(param.shape) for param in self.param_shapes() if not param.buffer)

    def flatten_width(self) -> int | None:
        """Ширина после flatten (None, если flatten нет)."""
        for layer, (_, out_shape) in zip(self.layers, self.layer_shapes(), strict=True):
            if isinstance(layer, LayerSpec) and layer.kind == LayerKind.FLATTEN:
                return out_shape[0]
        return None

    def canonical_json(self) -> bytes:
        """Каноническое JSON представление (ключи отсортированы)."""
        return orjson.dumps(self.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS)

    def digest(self) -> str:
        """xxh64 дайджест канонического JSON."""
        return xxhash.xxh64_hexdigest(self.canonical_json())

    @classmethod
    def from_json(cls, payload: str | bytes) -> "ModelSpec":
        return cls.model_validate(orjson.loads(payload))
