"""Фабрики тестовых объектов, которые нужны и фикстурам, и тестам напрямую."""

import numpy as np

from src.core.enums import Activation, ArchitectureKind, Mode, NoiseType
from src.models import LayerSpec, ModelSpec, ResidualBlockSpec
from src.services.corpus import Manifest, UtteranceRecord


def make_tiny_spec(num_classes: int = 3, input_shape: tuple[int, int, int] = (1, 8, 8)) -> ModelSpec:
    """conv(4) → pool → resblock(4→6) → pool → flatten → dense(8) → dropout → голова."""
    return ModelSpec(
        architecture=ArchitectureKind.TARGET,
        input_shape=input_shape,
        num_classes=num_classes,
        layers=[
            LayerSpec(
                kind="conv",
                name="stem.conv",
                filters=4,
                kernel_size=3,
                batch_norm=True,
                activation=Activation.RELU,
            ),
            LayerSpec(kind="maxpool", name="stem.pool", pool_size=2),
            ResidualBlockSpec(name="block1", in_channels=4, out_channels=6),
            LayerSpec(kind="maxpool", name="block1.pool", pool_size=2),
            LayerSpec(kind="flatten", name="flatten"),
            LayerSpec(kind="dense", name="dense", units=8, activation=Activation.RELU),
            LayerSpec(kind="dropout", name="dropout", rate=0.5),
            LayerSpec(kind="dense", name="head", units=num_classes, activation=Activation.SOFTMAX),
        ],
    )


def make_manifest(
    per_label: dict[int, int],
    noisy: tuple[tuple[NoiseType, int], ...] = (),
    num_classes: int = 11,
) -> Manifest:
    """Манифест без файлов: per_label[label] чистых записей и по одной шумной на каждое условие noisy."""
    records = []
    for label, count in per_label.items():
        for index in range(count):
            records.append(UtteranceRecord(path=f"clean/{label}_{index}.wav", label=label, mode=Mode.CLEAN))
            for noise_type, snr_db in noisy:
                records.append(
                    UtteranceRecord(
                        path=f"noisy/{label}_{index}_{noise_type.value}_{snr_db}.wav",
                        label=label,
                        mode=Mode.NOISY,
                        noise_type=noise_type,
                        snr_db=snr_db,
                    )
                )
    return Manifest(records=records, num_classes=num_classes)


def random_features(rng: np.random.Generator, count: int, shape: tuple[int, int, int] = (1, 8, 8)) -> np.ndarray:
    """Случайные признаки N × C × H × W в float32."""
    return rng.standard_normal((count, *shape)).astype(np.float32)
