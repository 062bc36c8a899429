"""Проверка ёмкости целевой модели.

Целевая ResNet на 32 записях синтетического корпуса должна достичь
≥ 95% точности на обучающей выборке не более чем за 200 эпох
(SGD, lr 0.001).
"""

from src.core.enums import ArchitectureKind
from src.models import build_model
from src.services.audio import FeatureExtractor
from src.services.corpus import read_manifest
from src.services.training import LabeledFeatures, TrainConfig, accuracy, train

SUBSET_SIZE = 32
MAX_EPOCHS = 200
TARGET_ACCURACY = 95.0


def test_target_model_overfits_small_subset(corpus_manifest):
    """Точность на обучающей выборке растёт до 95% за ≤ 200 эпох."""
    manifest = read_manifest(corpus_manifest).subset(range(SUBSET_SIZE))
    extractor = FeatureExtractor()
    extractor.fit(manifest.paths())
    data = LabeledFeatures.from_manifest(manifest, extractor)

    spec, params = build_model(ArchitectureKind.TARGET, (1, 40, 64), num_classes=11, seed=1)
    reached = 0.0
    for epoch in range(1, MAX_EPOCHS + 1):
        config = TrainConfig(learning_rate=0.001, batch_size=8, epochs=epoch, seed=1)
        params = train(spec, params, data, config, start_epoch=epoch - 1).params
        reached = accuracy(spec, params, data, batch_size=SUBSET_SIZE)
        if reached >= TARGET_ACCURACY:
            break
    assert reached >= TARGET_ACCURACY, f"точность {reached:.2f}% после {epoch} эпох"
