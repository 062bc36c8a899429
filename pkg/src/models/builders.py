"""Построители архитектур.

- build_target: целевая модель (conv 64 → три residual блока 64/128/256 → dense 128 → dropout → голова)
- build_source: ResNet-50 (7×7/64 stem, bottleneck стадии 3/4/6/3, global average pool)
- build_cnn_baseline: обычная CNN из тех же слоёв для сравнения
"""

from collections.abc import Sequence

from src.core.constants import (
    DEFAULT_INPUT_SHAPE,
    DEFAULT_SEED,
    DENSE_UNITS,
    DROPOUT_RATE,
    NUM_CLASSES,
    OUTPUT_HEAD_PREFIX,
    SOURCE_NUM_CLASSES,
    SOURCE_STAGE_BLOCKS,
    SOURCE_STAGE_FILTERS,
    STEM_FILTERS,
    TARGET_BLOCK_FILTERS,
)
from src.core.enums import Activation, ArchitectureKind
from src.engine import Rng
from src.models.params import ParamStore, init_params
from src.models.spec import BottleneckBlockSpec, Layer, LayerSpec, ModelSpec, ResidualBlockSpec
from src.shared.errors import ShapeMismatchError
from src.shared.logging import get_logger

logger = get_logger()

SOURCE_MIN_EXTENT = 32


def _head(num_classes: int) -> LayerSpec:
    return LayerSpec(kind="dense", name=OUTPUT_HEAD_PREFIX, units=num_classes, activation=Activation.SOFTMAX)


def _classifier(num_classes: int) -> list[Layer]:
    """flatten → dense(128, ReLU) → dropout(0.5) → голова."""
    return [
        LayerSpec(kind="flatten", name="flatten"),
        LayerSpec(kind="dense", name="dense", units=DENSE_UNITS, activation=Activation.RELU),
        LayerSpec(kind="dropout", name="dropout", rate=DROPOUT_RATE),
        _head(num_classes),
    ]


def target_spec(
    input_shape: Sequence[int] = DEFAULT_INPUT_SHAPE,
    num_classes: int = NUM_CLASSES,
) -> ModelSpec:
    """Спецификация целевой модели.

    conv(64, k3, BN, ReLU) → pool2 → resblock(64) → pool2 → resblock(128) → pool2 →
    resblock(256) → pool2 → flatten → dense(128, ReLU) → dropout(0.5) → dense(num_classes)

    Raises:
        ShapeMismatchError: Вход не переживает четыре пулинга

    """
    layers: list[Layer] = [
        LayerSpec(
            kind="conv",
            name="stem.conv",
            filters=STEM_FILTERS,
            kernel_size=3,
            batch_norm=True,
            activation=Activation.RELU,
        ),
        LayerSpec(kind="maxpool", name="stem.pool", pool_size=2),
    ]
    in_channels = STEM_FILTERS
    for index, filters in enumerate(TARGET_BLOCK_FILTERS, start=1):
        layers.append(ResidualBlockSpec(name=f"block{index}", in_channels=in_channels, out_channels=filters))
        layers.append(LayerSpec(kind="maxpool", name=f"block{index}.pool", pool_size=2))
        in_channels = filters
    layers += _classifier(num_classes)

    return ModelSpec(
        architecture=ArchitectureKind.TARGET,
        input_shape=tuple(input_shape),
        num_classes=num_classes,
        layers=layers,
    )


def source_spec(
    input_shape: Sequence[int] = (3, 224, 224),
    num_classes: int = SOURCE_NUM_CLASSES,
) -> ModelSpec:
    """Спецификация ResNet-50.

    Stem 7×7/64 stride 2 + BN + ReLU + pool2, затем bottleneck стадии (3, 4, 6, 3)
    с фильтрами (64,64,256), (128,128,512), (256,256,1024), (512,512,2048).
    Первый блок каждой стадии - с проекцией, стадии 2-4 уменьшают разрешение
    stride 2 в 3×3 свёртке. Затем global average pool и голова.

    Raises:
        ShapeMismatchError: Пространственные размеры входа меньше 32

    """
    if min(input_shape[1:]) < SOURCE_MIN_EXTENT:
        raise ShapeMismatchError(
            op="build_source",
            shapes=[tuple(input_shape)],
            message=f"ResNet-50 требует вход не меньше {SOURCE_MIN_EXTENT}×{SOURCE_MIN_EXTENT}",
        )

    layers: list[Layer] = [
        LayerSpec(
            kind="conv",
            name="stem.conv",
            filters=STEM_FILTERS,
            kernel_size=7,
            stride=2,
            batch_norm=True,
            activation=Activation.RELU,
        ),
        LayerSpec(kind="maxpool", name="stem.pool", pool_size=2),
    ]
    in_channels = STEM_FILTERS
    for stage, (blocks, filters) in enumerate(zip(SOURCE_STAGE_BLOCKS, SOURCE_STAGE_FILTERS, strict=True), start=1):
        for block in range(1, blocks + 1):
            first = block == 1
            layers.append(
                BottleneckBlockSpec(
                    name=f"stage{stage}.block{block}",
                    in_channels=in_channels,
                    filters=filters,
                    stride=2 if first and stage > 1 else 1,
                    projection=first,
                )
            )
            in_channels = filters[2]
    layers += [LayerSpec(kind="global_avg_pool", name="pool"), _head(num_classes)]

    return ModelSpec(
        architecture=ArchitectureKind.SOURCE,
        input_shape=tuple(input_shape),
        num_classes=num_classes,
        layers=layers,
    )


def cnn_baseline_spec(
    input_shape: Sequence[int] = DEFAULT_INPUT_SHAPE,
    num_classes: int = NUM_CLASSES,
) -> ModelSpec:
    """Спецификация обычной CNN без shortcut соединений.

    conv(64) → pool → conv(128) → pool → conv(256) → pool → pool → классификатор
    """
    layers: list[Layer] = []
    for index, filters in enumerate((STEM_FILTERS, *TARGET_BLOCK_FILTERS[1:]), start=1):
        layers.append(
            LayerSpec(
                kind="conv",
                name=f"conv{index}",
                filters=filters,
                kernel_size=3,
                batch_norm=True,
                activation=Activation.RELU,
            )
        )
        layers.append(LayerSpec(kind="maxpool", name=f"pool{index}", pool_size=2))
    layers.append(LayerSpec(kind="maxpool", name="pool4", pool_size=2))
    layers += _classifier(num_classes)

    return ModelSpec(
        architecture=ArchitectureKind.CNN,
        input_shape=tuple(input_shape),
        num_classes=num_classes,
        layers=layers,
    )


def build_from_spec(spec: ModelSpec, seed: int = DEFAULT_SEED) -> tuple[ModelSpec, ParamStore]:
    """Инициализировать параметры для готовой спецификации."""
    params = init_params(spec, Rng(seed).split("init"))
    logger.debug(
        "Модель построена",
        architecture=spec.architecture.value,
        tensors=len(params),
        parameters=params.num_parameters(),
    )
    return spec, params


def build_target(
    input_shape: Sequence[int] = DEFAULT_INPUT_SHAPE,
    num_classes: int = NUM_CLASSES,
    seed: int = DEFAULT_SEED,
) -> tuple[ModelSpec, ParamStore]:
    """Построить целевую residual модель."""
    return build_from_spec(target_spec(input_shape, num_classes), seed)


def build_source(
    input_shape: Sequence[int] = (3, 224, 224),
    num_classes: int = SOURCE_NUM_CLASSES,
    seed: int = DEFAULT_SEED,
) -> tuple[ModelSpec, ParamStore]:
    """Построить ResNet-50 (голова на 1000 классов по умолчанию)."""
    return build_from_spec(source_spec(input_shape, num_classes), seed)


def build_cnn_baseline(
    input_shape: Sequence[int] = DEFAULT_INPUT_SHAPE,
    num_classes: int = NUM_CLASSES,
    seed: int = DEFAULT_SEED,
) -> tuple[ModelSpec, ParamStore]:
    """Построить CNN без residual блоков."""
    return build_from_spec(cnn_baseline_spec(input_shape, num_classes), seed)


def build_model(
    architecture: ArchitectureKind,
    input_shape: Sequence[int] = DEFAULT_INPUT_SHAPE,
    num_classes: int = NUM_CLASSES,
    seed: int = DEFAULT_SEED,
) -> tuple[ModelSpec, ParamStore]:
    """Построить модель по типу архитектуры."""
    builders = {
        ArchitectureKind.TARGET.value: build_target,
        ArchitectureKind.SOURCE.value: build_source,
        ArchitectureKind.CNN.value: build_cnn_baseline,
    }
    return builders[ArchitectureKind(architecture).value](input_shape, num_classes, seed)
