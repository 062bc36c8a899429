"""Тесты дифференцируемых операций.

Покрывает:
- свёртку с паддингом "same" и шагом
- max pooling с обрезкой нечётных размеров
- batch norm в train/infer режимах
- inverted dropout
- softmax cross-entropy
"""

import math

import numpy as np
import pytest

from src.core.enums import ForwardMode
from src.engine import (
    Rng,
    Tensor,
    batchnorm,
    conv2d,
    dropout,
    global_avg_pool,
    maxpool2d,
    relu,
    softmax,
    softmax_xent,
    tensor_sum,
)
from src.shared.errors import InvalidArgumentError, ShapeMismatchError


class TestConv2d:
    """Тесты свёртки."""

    def test_same_padding_box_filter(self):
        """Единичное ядро 3×3 на единицах: углы 4, края 6, центр 9."""
        x = Tensor(np.ones((1, 1, 3, 3)))
        weight = Tensor(np.ones((1, 1, 3, 3)))
        out = conv2d(x, weight)
        expected = np.array([[4, 6, 4], [6, 9, 6], [4, 6, 4]], dtype=np.float32)
        np.testing.assert_array_equal(out.data[0, 0], expected)

    def test_same_padding_extra_pixel_bottom_right(self):
        """Чётный вход, шаг 2: лишний паддинг снизу/справа, выход ceil(H/2)."""
        x = Tensor(np.arange(16, dtype=np.float64).reshape(1, 1, 4, 4))
        weight = np.zeros((1, 1, 3, 3))
        weight[0, 0, 0, 0] = 1.0
        out = conv2d(x, Tensor(weight), stride=2)
        np.testing.assert_array_equal(out.data[0, 0], [[0.0, 2.0], [8.0, 10.0]])

    def test_stride_output_shape(self):
        """5×5 с шагом 2 → 3×3."""
        out = conv2d(Tensor(np.ones((2, 3, 5, 5))), Tensor(np.ones((4, 3, 3, 3))), stride=2)
        assert out.shape == (2, 4, 3, 3)

    def test_bias_added_per_channel(self):
        """Смещение прибавляется к каждому каналу."""
        out = conv2d(
            Tensor(np.zeros((1, 1, 2, 2))),
            Tensor(np.ones((2, 1, 1, 1))),
            Tensor(np.array([1.0, -2.0], dtype=np.float32)),
        )
        np.testing.assert_array_equal(out.data[0, 0], np.ones((2, 2)))
        np.testing.assert_array_equal(out.data[0, 1], np.full((2, 2), -2.0))

    def test_single_example_without_batch_axis(self):
        """Вход C×H×W даёт выход O×H×W."""
        out = conv2d(Tensor(np.ones((1, 4, 4))), Tensor(np.ones((2, 1, 3, 3))))
        assert out.shape == (2, 4, 4)

    def test_channel_mismatch(self):
        """Каналы входа и ядра должны совпадать."""
        with pytest.raises(ShapeMismatchError):
            conv2d(Tensor(np.ones((1, 2, 4, 4))), Tensor(np.ones((1, 3, 3, 3))))

    def test_kernel_larger_than_valid_input(self):
        """Ядро больше входа без паддинга."""
        with pytest.raises(ShapeMismatchError):
            conv2d(Tensor(np.ones((1, 1, 2, 2))), Tensor(np.ones((1, 1, 3, 3))), padding="valid")

    def test_float32_inputs_give_float32(self):
        """Накопление в float64, результат в типе входов."""
        out = conv2d(Tensor(np.ones((1, 1, 3, 3), dtype=np.float32)), Tensor(np.ones((1, 1, 3, 3), dtype=np.float32)))
        assert out.dtype == np.float32


class TestMaxPool2d:
    """Тесты max pooling."""

    def test_odd_size_cropped(self):
        """5×5 → 2×2, последняя строка и столбец отбрасываются."""
        x = Tensor(np.arange(25, dtype=np.float64).reshape(1, 1, 5, 5), requires_grad=True)
        out = maxpool2d(x, 2)
        np.testing.assert_array_equal(out.data[0, 0], [[6.0, 8.0], [16.0, 18.0]])
        tensor_sum(out).backward()
        assert x.grad[0, 0, 4].sum() == 0.0
        assert x.grad[0, 0, :, 4].sum() == 0.0
        assert x.grad.sum() == 4.0

    def test_gradient_routed_to_argmax(self):
        """Градиент попадает только в максимум окна."""
        data = np.array([[[[1.0, 3.0], [2.0, 0.0]]]])
        x = Tensor(data, requires_grad=True)
        tensor_sum(maxpool2d(x, 2)).backward()
        np.testing.assert_array_equal(x.grad[0, 0], [[0.0, 1.0], [0.0, 0.0]])

    def test_too_small_input(self):
        """1×1 вход не переживает пулинг 2."""
        with pytest.raises(ShapeMismatchError):
            maxpool2d(Tensor(np.ones((1, 1, 1, 1))), 2)


class TestBatchNorm:
    """Тесты batch normalization."""

    @staticmethod
    def _params(channels: int) -> tuple[Tensor, Tensor, Tensor, Tensor]:
        return (
            Tensor(np.ones(channels)),
            Tensor(np.zeros(channels)),
            Tensor(np.zeros(channels)),
            Tensor(np.ones(channels)),
        )

    def test_train_normalizes_batch(self, np_rng):
        """В train режиме выход по каждому каналу имеет нулевое среднее и единичную дисперсию."""
        gamma, beta, mean, var = self._params(3)
        x = Tensor(np_rng.normal(5.0, 2.0, size=(8, 3, 4, 4)))
        out = batchnorm(x, gamma, beta, mean, var, mode=ForwardMode.TRAIN)
        np.testing.assert_allclose(out.data.mean(axis=(0, 2, 3)), 0.0, atol=1e-9)
        np.testing.assert_allclose(out.data.var(axis=(0, 2, 3)), 1.0, atol=1e-3)

    def test_running_stats_update(self):
        """running = 0.9·running + 0.1·batch (дисперсия смещённая)."""
        gamma, beta, mean, var = self._params(1)
        x = Tensor(np.array([[1.0], [3.0]]))
        batchnorm(x, gamma, beta, mean, var, mode=ForwardMode.TRAIN)
        np.testing.assert_allclose(mean.data, [0.2])
        np.testing.assert_allclose(var.data, [0.9 * 1.0 + 0.1 * 1.0])

    def test_no_update_when_disabled(self):
        """update_stats=False оставляет running статистики."""
        gamma, beta, mean, var = self._params(1)
        batchnorm(Tensor(np.array([[1.0], [3.0]])), gamma, beta, mean, var, update_stats=False)
        np.testing.assert_array_equal(mean.data, [0.0])
        np.testing.assert_array_equal(var.data, [1.0])

    def test_infer_uses_running_stats(self):
        """В infer режиме x̂ = (x − running_mean)/sqrt(running_var + eps)."""
        gamma, beta, mean, var = self._params(2)
        x = Tensor(np.array([[2.0, -4.0]]))
        out = batchnorm(x, gamma, beta, mean, var, mode=ForwardMode.INFER)
        np.testing.assert_allclose(out.data, x.data / math.sqrt(1.0 + 1e-5))

    def test_train_single_example_rejected(self):
        """Батч из одного примера в train режиме - ошибка использования."""
        gamma, beta, mean, var = self._params(2)
        with pytest.raises(InvalidArgumentError):
            batchnorm(Tensor(np.ones((1, 2))), gamma, beta, mean, var, mode=ForwardMode.TRAIN)

    def test_channel_mismatch(self):
        """gamma другой длины, чем каналы."""
        gamma, beta, mean, var = self._params(3)
        with pytest.raises(ShapeMismatchError):
            batchnorm(Tensor(np.ones((2, 2))), gamma, beta, mean, var)


class TestDropout:
    """Тесты inverted dropout."""

    def test_infer_is_identity(self):
        """В infer режиме вход возвращается без изменений."""
        x = Tensor(np.ones((4, 4)))
        assert dropout(x, 0.5, None, ForwardMode.INFER) is x

    def test_train_scales_survivors(self):
        """Выжившие элементы умножаются на 1/(1 − rate)."""
        x = Tensor(np.ones((50, 50)))
        out = dropout(x, 0.5, Rng(0), ForwardMode.TRAIN)
        assert set(np.unique(out.data)) <= {0.0, 2.0}
        assert 0.4 < (out.data > 0).mean() < 0.6

    def test_same_rng_same_mask(self):
        """Маска определяется генератором."""
        x = Tensor(np.ones((10, 10)))
        first = dropout(x, 0.3, Rng(7).split("dropout"), ForwardMode.TRAIN)
        second = dropout(x, 0.3, Rng(7).split("dropout"), ForwardMode.TRAIN)
        np.testing.assert_array_equal(first.data, second.data)

    @pytest.mark.parametrize("rate", [-0.1, 1.0, 1.5])
    def test_rate_out_of_range(self, rate):
        """rate вне [0, 1)."""
        with pytest.raises(InvalidArgumentError):
            dropout(Tensor(np.ones(3)), rate, Rng(0))

    def test_train_requires_rng(self):
        """Без rng в train режиме - ошибка."""
        with pytest.raises(InvalidArgumentError):
            dropout(Tensor(np.ones((2, 2))), 0.5, None, ForwardMode.TRAIN)


class TestSoftmaxCrossEntropy:
    """Тесты softmax cross-entropy."""

    def test_uniform_logits(self):
        """Равные логиты: loss = log K, вероятности 1/K."""
        loss, probs = softmax_xent(Tensor(np.zeros((2, 4))), [0, 3])
        assert loss.item() == pytest.approx(math.log(4))
        np.testing.assert_allclose(probs.data, 0.25)

    def test_gradient_is_probs_minus_onehot(self):
        """Градиент по логитам: (p − onehot)/N."""
        logits = Tensor(np.zeros((2, 2)), requires_grad=True)
        loss, _ = softmax_xent(logits, [0, 1])
        loss.backward()
        np.testing.assert_allclose(logits.grad, [[-0.25, 0.25], [0.25, -0.25]])

    def test_large_logits_stable(self):
        """Большие логиты не дают переполнения."""
        loss, _ = softmax_xent(Tensor(np.array([[1000.0, 0.0]])), [0])
        assert loss.item() == pytest.approx(0.0, abs=1e-9)

    def test_label_out_of_range(self):
        """Метка ≥ K."""
        with pytest.raises(InvalidArgumentError):
            softmax_xent(Tensor(np.zeros((1, 3))), [3])

    def test_softmax_rows_sum_to_one(self, np_rng):
        """softmax по строкам."""
        probs = softmax(np_rng.normal(size=(5, 7)))
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)


class TestPoolingAndActivations:
    """Тесты global average pooling и ReLU."""

    def test_global_avg_pool(self):
        """Среднее по H×W."""
        x = Tensor(np.arange(8, dtype=np.float64).reshape(1, 2, 2, 2))
        np.testing.assert_allclose(global_avg_pool(x).data, [[1.5, 5.5]])

    def test_relu_subgradient_at_zero(self):
        """Субградиент ReLU в нуле равен 0."""
        x = Tensor(np.array([-1.0, 0.0, 2.0]), requires_grad=True)
        tensor_sum(relu(x)).backward()
        np.testing.assert_array_equal(x.grad, [0.0, 0.0, 1.0])
