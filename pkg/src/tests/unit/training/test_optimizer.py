"""Тесты SGD."""

import numpy as np
import pytest

from src.engine import Rng, Tensor, softmax_xent
from src.models import ParamStore, forward, init_params
from src.services.training import collect_grads, sgd_step
from src.shared.errors import InvalidArgumentError, NonFiniteError, ShapeMismatchError
from src.tests.factories import make_tiny_spec, random_features


@pytest.fixture
def store() -> ParamStore:
    store = ParamStore()
    store.add("a.weight", Tensor(np.ones((2, 2), dtype=np.float32), requires_grad=True))
    store.add("b.weight", Tensor(np.ones(3, dtype=np.float32), requires_grad=True))
    store.add("a.running_mean", Tensor(np.zeros(2, dtype=np.float32)), buffer=True)
    return store


class TestSgdStep:
    """Тесты шага SGD."""

    def test_update_rule(self, store):
        """p ← p − lr·g."""
        updated = sgd_step(store, {"a.weight": np.full((2, 2), 2.0)}, lr=0.25)
        assert updated == ["a.weight"]
        np.testing.assert_array_equal(store["a.weight"].data, 0.5)
        assert store["a.weight"].dtype == np.float32

    def test_zero_lr_keeps_params(self, store):
        """lr = 0 не меняет параметры."""
        sgd_step(store, {"b.weight": np.ones(3)}, lr=0.0)
        np.testing.assert_array_equal(store["b.weight"].data, 1.0)

    def test_frozen_untouched(self, store):
        """Замороженный тензор не обновляется."""
        store.freeze(["a"])
        updated = sgd_step(store, {"a.weight": np.ones((2, 2)), "b.weight": np.ones(3)}, lr=1.0)
        assert updated == ["b.weight"]
        np.testing.assert_array_equal(store["a.weight"].data, 1.0)
        np.testing.assert_array_equal(store["b.weight"].data, 0.0)

    def test_buffer_untouched(self, store):
        """Буферы batch norm не обновляются шагом SGD."""
        sgd_step(store, {"a.running_mean": np.ones(2)}, lr=1.0)
        np.testing.assert_array_equal(store["a.running_mean"].data, 0.0)

    def test_nan_gradient_changes_nothing(self, store):
        """NaN в любом градиенте - ошибка до изменения параметров."""
        grads = {"a.weight": np.ones((2, 2)), "b.weight": np.array([0.0, np.nan, 0.0])}
        with pytest.raises(NonFiniteError) as exc_info:
            sgd_step(store, grads, lr=1.0)
        assert exc_info.value.details["where"] == "b.weight"
        np.testing.assert_array_equal(store["a.weight"].data, 1.0)

    def test_shape_mismatch(self, store):
        """Форма градиента должна совпадать."""
        with pytest.raises(ShapeMismatchError):
            sgd_step(store, {"b.weight": np.ones(4)}, lr=0.1)

    def test_unknown_name(self, store):
        """Градиент для несуществующего тензора."""
        with pytest.raises(InvalidArgumentError):
            sgd_step(store, {"c.weight": np.ones(1)}, lr=0.1)

    @pytest.mark.parametrize("lr", [-0.1, float("nan"), float("inf")])
    def test_invalid_lr(self, store, lr):
        """lr < 0 или неконечный."""
        with pytest.raises(InvalidArgumentError):
            sgd_step(store, {}, lr=lr)


class TestCollectGrads:
    """Тесты сбора градиентов."""

    def test_skips_missing_and_frozen(self, store):
        """Собираются только обучаемые тензоры с градиентом."""
        store["a.weight"].grad = np.ones((2, 2), dtype=np.float32)
        store["b.weight"].grad = np.ones(3, dtype=np.float32)
        store.freeze(["b"])
        assert list(collect_grads(store)) == ["a.weight"]


def _batch_loss(spec, params, features, labels) -> tuple[float, object]:
    logits = forward(spec, params, features)
    loss, _ = softmax_xent(logits, labels)
    return loss.item(), loss


class TestSingleStepDescent:
    """Шаг SGD с малым lr не увеличивает loss на фиксированном батче."""

    def test_descent_on_seeded_trials(self):
        """Не менее 95 из 100 seed: loss после шага lr=1e-4 не больше исходного."""
        spec = make_tiny_spec()
        descended = 0
        for seed in range(100):
            data_rng = np.random.default_rng(seed)
            params = init_params(spec, Rng(seed).split("init"))
            features = random_features(data_rng, 4)
            labels = data_rng.integers(0, spec.num_classes, size=4)

            before, loss = _batch_loss(spec, params, features, labels)
            params.zero_grad()
            loss.backward()
            sgd_step(params, collect_grads(params), lr=1e-4)
            after, _ = _batch_loss(spec, params, features, labels)
            descended += after <= before
        assert descended >= 95
