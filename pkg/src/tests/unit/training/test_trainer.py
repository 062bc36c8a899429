"""Тесты цикла обучения.

Покрывает:
- разбиение на батчи (хвост из одного примера присоединяется)
- детерминизм истории и параметров по seed
- продолжение обучения с эпохи чекпоинта
- расходимость (NaN) с номером последней хорошей эпохи
- проверки входных данных
"""

import numpy as np
import pytest

from src.services.training import EpochRecord, LabeledFeatures, TrainConfig, accuracy, make_batches, train
from src.shared.errors import InsufficientDataError, InvalidArgumentError, ShapeMismatchError, TrainingDivergedError
from src.tests.factories import random_features


@pytest.fixture
def train_set(np_rng) -> LabeledFeatures:
    return LabeledFeatures(features=random_features(np_rng, 10), labels=np.arange(10) % 3)


@pytest.fixture
def config() -> TrainConfig:
    return TrainConfig(learning_rate=0.01, batch_size=4, epochs=2, seed=5, eval_batch_size=4)


class TestMakeBatches:
    """Тесты make_batches."""

    def test_even_split(self):
        """8 примеров по 4."""
        assert [b.tolist() for b in make_batches(np.arange(8), 4)] == [[0, 1, 2, 3], [4, 5, 6, 7]]

    def test_single_tail_merged(self):
        """Хвост из одного примера присоединяется к предыдущему батчу."""
        batches = make_batches(np.arange(9), 4)
        assert [b.size for b in batches] == [4, 5]

    def test_tail_of_two_kept(self):
        """Хвост из двух примеров остаётся отдельным батчем."""
        assert [b.size for b in make_batches(np.arange(10), 4)] == [4, 4, 2]

    def test_all_examples_once(self):
        """Каждый индекс попадает ровно в один батч."""
        order = np.random.default_rng(0).permutation(13)
        assert sorted(np.concatenate(make_batches(order, 3)).tolist()) == list(range(13))


class TestTrain:
    """Тесты train."""

    def test_history_per_epoch(self, tiny_spec, tiny_params, train_set, config):
        """Одна запись истории на эпоху, val_accuracy при held_out."""
        result = train(tiny_spec, tiny_params, train_set, config, held_out=train_set)
        assert [record.epoch for record in result.history] == [1, 2]
        assert all(np.isfinite(record.loss) for record in result.history)
        assert all(0.0 <= record.val_accuracy <= 100.0 for record in result.history)

    def test_deterministic(self, tiny_spec, tiny_params, train_set, config):
        """Одинаковые seed и данные - одинаковые история и параметры."""
        first = train(tiny_spec, tiny_params, train_set, config)
        second = train(tiny_spec, tiny_params, train_set, config)
        assert [r.loss for r in first.history] == [r.loss for r in second.history]
        assert first.params.equals(second.params)

    def test_seed_changes_result(self, tiny_spec, tiny_params, train_set, config):
        """Другой seed меняет порядок батчей и маски dropout."""
        first = train(tiny_spec, tiny_params, train_set, config)
        second = train(tiny_spec, tiny_params, train_set, config.model_copy(update={"seed": 6}))
        assert not first.params.equals(second.params)

    def test_input_params_unchanged(self, tiny_spec, tiny_params, train_set, config):
        """Обучается копия параметров."""
        before = tiny_params.copy()
        result = train(tiny_spec, tiny_params, train_set, config)
        assert tiny_params.equals(before)
        assert not result.params.equals(before)

    def test_resume_matches_continuous(self, tiny_spec, tiny_params, train_set, config):
        """Эпоха 1 + продолжение с start_epoch=1 совпадает с непрерывными двумя эпохами."""
        continuous = train(tiny_spec, tiny_params, train_set, config)
        first = train(tiny_spec, tiny_params, train_set, config.model_copy(update={"epochs": 1}))
        resumed = train(tiny_spec, first.params, train_set, config, start_epoch=1)
        assert [r.epoch for r in resumed.history] == [2]
        assert resumed.history[0].loss == continuous.history[1].loss
        assert resumed.params.equals(continuous.params)

    def test_callback_per_epoch(self, tiny_spec, tiny_params, train_set, config):
        """on_epoch_end получает запись и параметры после каждой эпохи."""
        seen: list[EpochRecord] = []
        train(tiny_spec, tiny_params, train_set, config, on_epoch_end=lambda record, params: seen.append(record))
        assert [record.epoch for record in seen] == [1, 2]

    def test_frozen_flags_kept(self, tiny_spec, tiny_params, train_set, config):
        """Замороженные тензоры не меняются за обучение."""
        tiny_params.freeze(["stem"])
        result = train(tiny_spec, tiny_params, train_set, config)
        for name in tiny_params.resolve(["stem"]):
            np.testing.assert_array_equal(result.params[name].data, tiny_params[name].data)


class TestTrainErrors:
    """Тесты ошибок обучения."""

    def test_nan_features_diverge(self, tiny_spec, tiny_params, train_set, config):
        """NaN во входе - TrainingDivergedError с последней хорошей эпохой 0."""
        features = train_set.features.copy()
        features[:] = np.nan
        broken = LabeledFeatures(features=features, labels=train_set.labels)
        with pytest.raises(TrainingDivergedError) as exc_info:
            train(tiny_spec, tiny_params, broken, config)
        assert exc_info.value.last_good_epoch == 0
        assert exc_info.value.details["epoch"] == 1
        assert exc_info.value.last_good.equals(tiny_params)
        assert exc_info.value.exit_code == 4

    def test_too_few_examples(self, tiny_spec, tiny_params, np_rng, config):
        """Один пример нельзя обучать с batch norm."""
        single = LabeledFeatures(features=random_features(np_rng, 1), labels=np.array([0]))
        with pytest.raises(InsufficientDataError):
            train(tiny_spec, tiny_params, single, config)

    def test_label_out_of_range(self, tiny_spec, tiny_params, np_rng, config):
        """Метка ≥ num_classes."""
        data = LabeledFeatures(features=random_features(np_rng, 4), labels=np.array([0, 1, 2, 3]))
        with pytest.raises(InvalidArgumentError):
            train(tiny_spec, tiny_params, data, config)

    def test_labeled_features_shape(self, np_rng):
        """Число меток совпадает с числом примеров."""
        with pytest.raises(ShapeMismatchError):
            LabeledFeatures(features=random_features(np_rng, 3), labels=np.array([0, 1]))

    def test_batch_size_at_least_two(self):
        """batch_size < 2 отклоняется конфигурацией."""
        with pytest.raises(ValueError):
            TrainConfig(batch_size=1)


class TestAccuracy:
    """Тесты accuracy."""

    def test_range(self, tiny_spec, tiny_params, train_set):
        """Точность в процентах."""
        value = accuracy(tiny_spec, tiny_params, train_set, batch_size=3)
        assert 0.0 <= value <= 100.0
        assert value * len(train_set) / 100.0 == pytest.approx(round(value * len(train_set) / 100.0))

    def test_empty(self, tiny_spec, tiny_params):
        """Пустой набор - 0."""
        empty = LabeledFeatures(features=np.zeros((0, 1, 8, 8), dtype=np.float32), labels=np.zeros(0, dtype=np.int64))
        assert accuracy(tiny_spec, tiny_params, empty, batch_size=2) == 0.0
