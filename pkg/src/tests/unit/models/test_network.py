"""Тесты прямого прохода.

Покрывает:
- residual сложение и trace внутренних тензоров блока
- predict_proba: распределения по строкам, независимость от размера батча
- batch norm в train режиме и у замороженных слоёв
- проверку формы входа и конечности активаций
- градиент всей модели по входу и по параметрам
"""

import numpy as np
import pytest

from src.core.enums import ForwardMode
from src.engine import Rng, Tensor, grad_check, softmax_xent
from src.models import ModelSpec, ParamStore, forward, predict_proba
from src.shared.errors import InvalidArgumentError, NonFiniteError, ShapeMismatchError
from src.tests.factories import random_features

LABELS = [0, 2, 1]


def _with_tensor(params: ParamStore, name: str, tensor: Tensor) -> ParamStore:
    """ParamStore с подменённым тензором (для проверки градиента по параметру)."""
    tensors = {key: (tensor if key == name else value) for key, value in params.items()}
    return ParamStore(tensors, buffers=[key for key in params if params.is_buffer(key)])


class TestResidual:
    """Тесты residual блока."""

    def test_sum_is_branch_plus_shortcut(self, tiny_spec, tiny_params, np_rng):
        """sum = branch + shortcut поэлементно."""
        trace: dict[str, Tensor] = {}
        forward(tiny_spec, tiny_params, random_features(np_rng, 2), trace=trace)
        np.testing.assert_allclose(
            trace["block1.sum"].data,
            trace["block1.branch"].data + trace["block1.shortcut"].data,
            rtol=1e-6,
        )

    def test_zero_branch_passes_shortcut(self, tiny_spec, tiny_params, np_rng):
        """При нулевых gamma/beta последнего BN ветки блок пропускает shortcut."""
        tiny_params.assign("block1.conv2.gamma", np.zeros(6))
        tiny_params.assign("block1.conv2.beta", np.zeros(6))
        trace: dict[str, Tensor] = {}
        forward(tiny_spec, tiny_params, random_features(np_rng, 2), trace=trace)
        np.testing.assert_array_equal(trace["block1.branch"].data, 0.0)
        np.testing.assert_array_equal(trace["block1.sum"].data, trace["block1.shortcut"].data)
        np.testing.assert_array_equal(trace["block1"].data, np.maximum(trace["block1.shortcut"].data, 0.0))

    def test_trace_keys(self, tiny_spec, tiny_params, np_rng):
        """В trace есть выход каждого слоя и тензоры блока."""
        trace: dict[str, Tensor] = {}
        forward(tiny_spec, tiny_params, random_features(np_rng, 2), trace=trace)
        for layer in tiny_spec.layers:
            assert layer.name in trace
        assert {"block1.branch", "block1.shortcut", "block1.sum"} <= set(trace)
        assert trace["block1"].shape == (2, 6, 4, 4)


class TestPredict:
    """Тесты логитов и вероятностей."""

    def test_forward_returns_logits(self, tiny_spec, tiny_params, np_rng):
        """Выход - N×K логиты."""
        logits = forward(tiny_spec, tiny_params, random_features(np_rng, 4))
        assert logits.shape == (4, 3)

    def test_proba_rows_sum_to_one(self, tiny_spec, tiny_params, np_rng):
        """Строки predict_proba - распределения в float64."""
        probs = predict_proba(tiny_spec, tiny_params, random_features(np_rng, 5), batch_size=2)
        assert probs.shape == (5, 3)
        assert probs.dtype == np.float64
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)
        assert (probs >= 0).all()

    def test_proba_independent_of_batch_size(self, tiny_spec, tiny_params, np_rng):
        """В infer режиме результат не зависит от разбиения на батчи."""
        features = random_features(np_rng, 5)
        np.testing.assert_allclose(
            predict_proba(tiny_spec, tiny_params, features, batch_size=1),
            predict_proba(tiny_spec, tiny_params, features, batch_size=5),
            rtol=1e-5,
        )

    def test_proba_empty(self, tiny_spec, tiny_params):
        """Пустой вход даёт 0×K."""
        empty = np.zeros((0, 1, 8, 8), dtype=np.float32)
        assert predict_proba(tiny_spec, tiny_params, empty, batch_size=4).shape == (0, 3)

    def test_infer_deterministic(self, tiny_spec, tiny_params, np_rng):
        """Два infer прохода совпадают побитово."""
        features = random_features(np_rng, 3)
        first = forward(tiny_spec, tiny_params, features).data
        second = forward(tiny_spec, tiny_params, features).data
        np.testing.assert_array_equal(first, second)


class TestTrainMode:
    """Тесты train режима."""

    def test_running_stats_updated(self, tiny_spec, tiny_params, np_rng):
        """train проход обновляет running статистики."""
        before = tiny_params["block1.conv1.running_mean"].data.copy()
        forward(tiny_spec, tiny_params, random_features(np_rng, 4), ForwardMode.TRAIN, rng=Rng(0))
        assert not np.array_equal(before, tiny_params["block1.conv1.running_mean"].data)

    def test_frozen_bn_untouched(self, tiny_spec, tiny_params, np_rng):
        """У замороженного слоя BN работает на running статистиках и не обновляет их."""
        tiny_params.freeze(["stem"])
        before_mean = tiny_params["stem.conv.running_mean"].data.copy()
        before_var = tiny_params["stem.conv.running_var"].data.copy()
        forward(tiny_spec, tiny_params, random_features(np_rng, 4), ForwardMode.TRAIN, rng=Rng(0))
        np.testing.assert_array_equal(before_mean, tiny_params["stem.conv.running_mean"].data)
        np.testing.assert_array_equal(before_var, tiny_params["stem.conv.running_var"].data)

    def test_dropout_requires_rng(self, tiny_spec, tiny_params, np_rng):
        """train режим с dropout без rng - ошибка."""
        with pytest.raises(InvalidArgumentError):
            forward(tiny_spec, tiny_params, random_features(np_rng, 2), ForwardMode.TRAIN)

    def test_same_rng_same_output(self, tiny_spec, np_rng, tiny_params):
        """train проход детерминирован при одинаковом rng и параметрах."""
        features = random_features(np_rng, 4)
        first = forward(tiny_spec, tiny_params.copy(), features, ForwardMode.TRAIN, rng=Rng(1)).data
        second = forward(tiny_spec, tiny_params.copy(), features, ForwardMode.TRAIN, rng=Rng(1)).data
        np.testing.assert_array_equal(first, second)


class TestChecks:
    """Тесты проверок входа и численной устойчивости."""

    def test_bad_input_shape(self, tiny_spec, tiny_params):
        """Форма примера не совпадает с input_shape."""
        with pytest.raises(ShapeMismatchError):
            forward(tiny_spec, tiny_params, np.zeros((2, 1, 8, 9), dtype=np.float32))

    def test_missing_batch_axis(self, tiny_spec, tiny_params):
        """Вход без оси батча отклоняется."""
        with pytest.raises(ShapeMismatchError):
            forward(tiny_spec, tiny_params, np.zeros((1, 8, 8), dtype=np.float32))

    def test_non_finite_detected(self, tiny_spec, tiny_params, np_rng):
        """NaN в весах обнаруживается при numeric_check."""
        weight = tiny_params["stem.conv.weight"].data.copy()
        weight[0, 0, 0, 0] = np.nan
        tiny_params.assign("stem.conv.weight", weight)
        with pytest.raises(NonFiniteError) as exc_info:
            forward(tiny_spec, tiny_params, random_features(np_rng, 2), numeric_check=True)
        assert exc_info.value.details["where"] == "stem.conv"


class TestModelGradient:
    """Градиент всей модели центральными разностями (шаг 1e-5)."""

    def test_gradient_wrt_input(self, tiny_spec: ModelSpec, tiny_params: ParamStore, np_rng):
        """Градиент loss по входу."""
        x = random_features(np_rng, 3).astype(np.float64)

        def loss(t: Tensor) -> Tensor:
            value, _ = softmax_xent(forward(tiny_spec, tiny_params, t), LABELS)
            return value

        report = grad_check(loss, x, step=1e-5, max_checks=64)
        assert report.passed, report

    @pytest.mark.parametrize("name", ["head.weight", "dense.bias", "block1.conv1.weight", "stem.conv.gamma"])
    def test_gradient_wrt_params(self, tiny_spec: ModelSpec, tiny_params: ParamStore, np_rng, name):
        """Градиент loss по тензору параметров."""
        features = Tensor(random_features(np_rng, 3).astype(np.float64))

        def loss(t: Tensor) -> Tensor:
            value, _ = softmax_xent(forward(tiny_spec, _with_tensor(tiny_params, name, t), features), LABELS)
            return value

        report = grad_check(loss, tiny_params[name].data, step=1e-5, max_checks=32)
        assert report.passed, report
