"""Дифференцируемые операции тензорного ядра.

Каждая операция реализована как Function с forward/backward над numpy
массивами. Свёртка, матричное произведение и статистики batch norm
накапливаются в float64, результат приводится к типу входов.

Формат данных: N×C×H×W для свёрток и пулинга, N×K для dense слоёв.
"""

from collections.abc import Sequence
from math import ceil

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.core.constants import BN_EPSILON, BN_MOMENTUM
from src.core.enums import ForwardMode, Padding
from src.engine.rng import Rng
from src.engine.tensor import Function, Tensor, result_dtype
from src.shared.errors import InvalidArgumentError, ShapeMismatchError


class Add(Function):
    """Поэлементная сумма тензоров одинаковой формы."""

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape != b.shape:
            raise ShapeMismatchError(op="add", shapes=[a.shape, b.shape])
        return (a + b).astype(result_dtype(a, b), copy=False)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return grad, grad


class MatMul(Function):
    """Матричное произведение m×k · k×n."""

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ShapeMismatchError(op="matmul", shapes=[a.shape, b.shape])
        self.a = a
        self.b = b
        out = a.astype(np.float64) @ b.astype(np.float64)
        return out.astype(result_dtype(a, b))

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        g = grad.astype(np.float64)
        grad_a = g @ self.b.astype(np.float64).T
        grad_b = self.a.astype(np.float64).T @ g
        return grad_a.astype(self.a.dtype), grad_b.astype(self.b.dtype)


class BiasAdd(Function):
    """Прибавление смещения по оси каналов (ось 1)."""

    def forward(self, x: np.ndarray, bias: np.ndarray) -> np.ndarray:
        if x.ndim < 2 or bias.ndim != 1 or x.shape[1] != bias.shape[0]:
            raise ShapeMismatchError(op="bias_add", shapes=[x.shape, bias.shape])
        self.reduce_axes = tuple(axis for axis in range(x.ndim) if axis != 1)
        self.bias_dtype = bias.dtype
        view = bias.reshape((1, -1) + (1,) * (x.ndim - 2))
        return (x + view).astype(result_dtype(x, bias), copy=False)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        grad_bias = grad.astype(np.float64).sum(axis=self.reduce_axes)
        return grad, grad_bias.astype(self.bias_dtype)


class Sum(Function):
    """Сумма всех элементов (скаляр)."""

    def forward(self, x: np.ndarray) -> np.ndarray:
        self.shape = x.shape
        self.dtype = x.dtype
        return np.asarray(x.astype(np.float64).sum(), dtype=x.dtype)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (np.full(self.shape, grad.reshape(-1)[0], dtype=self.dtype),)


class Reshape(Function):
    """Смена формы без изменения порядка элементов."""

    def forward(self, x: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
        self.in_shape = x.shape
        try:
            return x.reshape(shape)
        except ValueError as e:
            raise ShapeMismatchError(op="reshape", shapes=[x.shape, shape]) from e

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad.reshape(self.in_shape),)


class ReLU(Function):
    """max(0, x), субградиент в нуле равен 0."""

    def forward(self, x: np.ndarray) -> np.ndarray:
        self.mask = x > 0
        return np.where(self.mask, x, np.zeros((), dtype=x.dtype))

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (np.where(self.mask, grad, np.zeros((), dtype=grad.dtype)),)


def _same_padding(extent: int, kernel: int, stride: int) -> tuple[int, int]:
    """Паддинг "same": выход ceil(extent/stride), лишний пиксель снизу/справа."""
    out = ceil(extent / stride)
    total = max((out - 1) * stride + kernel - extent, 0)
    return total // 2, total - total // 2


class Conv2d(Function):
    """Двумерная кросс-корреляция (ядро не переворачивается).

    Входы: x N×C×H×W, weight O×C×kh×kw, опционально bias O.
    """

    def forward(
        self,
        x: np.ndarray,
        weight: np.ndarray,
        bias: np.ndarray | None = None,
        *,
        stride: int = 1,
        padding: Padding = Padding.SAME,
    ) -> np.ndarray:
        shapes = [x.shape, weight.shape] + ([bias.shape] if bias is not None else [])
        if x.ndim != 4 or weight.ndim != 4 or x.shape[1] != weight.shape[1]:
            raise ShapeMismatchError(op="conv2d", shapes=shapes)
        if bias is not None and bias.shape != (weight.shape[0],):
            raise ShapeMismatchError(op="conv2d", shapes=shapes)
        if stride < 1:
            raise InvalidArgumentError(f"stride должен быть положительным: {stride}")

        _, _, height, width = x.shape
        _, _, kh, kw = weight.shape
        if Padding(padding) == Padding.SAME:
            pad_h = _same_padding(height, kh, stride)
            pad_w = _same_padding(width, kw, stride)
        else:
            pad_h = pad_w = (0, 0)
        if kh > height + sum(pad_h) or kw > width + sum(pad_w):
            raise ShapeMismatchError(
                op="conv2d",
                shapes=shapes,
                message=f"Ядро {kh}×{kw} больше входа {height}×{width} с паддингом",
            )

        self.stride = stride
        self.pad_h = pad_h
        self.pad_w = pad_w
        self.x_dtype = x.dtype
        self.w_dtype = weight.dtype
        self.has_bias = bias is not None
        self.b_dtype = bias.dtype if bias is not None else weight.dtype
        self.weight = weight.astype(np.float64)
        self.padded = np.pad(x.astype(np.float64), ((0, 0), (0, 0), pad_h, pad_w))

        windows = self._windows()
        out = np.tensordot(windows, self.weight, axes=([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2)
        if bias is not None:
            out = out + bias.astype(np.float64)[None, :, None, None]
        arrays = (x, weight) if bias is None else (x, weight, bias)
        return np.ascontiguousarray(out).astype(result_dtype(*arrays))

    def _windows(self) -> np.ndarray:
        """Окна N×C×H'×W'×kh×kw поверх паддированного входа (view)."""
        _, _, kh, kw = self.weight.shape
        windows = sliding_window_view(self.padded, (kh, kw), axis=(2, 3))
        return windows[:, :, :: self.stride, :: self.stride]

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        g = grad.astype(np.float64)
        _, _, out_h, out_w = g.shape
        _, _, kh, kw = self.weight.shape
        s = self.stride

        windows = self._windows()[:, :, :out_h, :out_w]
        grad_weight = np.tensordot(g, windows, axes=([0, 2, 3], [0, 2, 3]))

        grad_padded = np.zeros_like(self.padded)
        for i in range(kh):
            for j in range(kw):
                contribution = np.tensordot(g, self.weight[:, :, i, j], axes=([1], [0]))
                grad_padded[:, :, i : i + s * (out_h - 1) + 1 : s, j : j + s * (out_w - 1) + 1 : s] += (
                    contribution.transpose(0, 3, 1, 2)
                )

        height = grad_padded.shape[2] - sum(self.pad_h)
        width = grad_padded.shape[3] - sum(self.pad_w)
        top, left = self.pad_h[0], self.pad_w[0]
        grad_x = grad_padded[:, :, top : top + height, left : left + width]

        grads: tuple[np.ndarray | None, ...] = (
            grad_x.astype(self.x_dtype),
            grad_weight.astype(self.w_dtype),
        )
        if self.has_bias:
            grads += (g.sum(axis=(0, 2, 3)).astype(self.b_dtype),)
        return grads


class MaxPool2d(Function):
    """Max pooling по двум последним осям, окно pool×pool с шагом pool.

    Нечётные размеры обрезаются (floor). Градиент идёт в argmax окна,
    при равенстве в первый по порядку элемент.
    """

    def forward(self, x: np.ndarray, pool: int) -> np.ndarray:
        if pool < 1:
            raise InvalidArgumentError(f"pool должен быть положительным: {pool}")
        if x.ndim < 2:
            raise ShapeMismatchError(op="maxpool2d", shapes=[x.shape])
        height, width = x.shape[-2:]
        out_h, out_w = height // pool, width // pool
        if out_h < 1 or out_w < 1:
            raise ShapeMismatchError(
                op="maxpool2d",
                shapes=[x.shape],
                message=f"Пространственные размеры {height}×{width} меньше окна {pool}",
            )
        self.in_shape = x.shape
        self.pool = pool
        lead = x.shape[:-2]

        cropped = x[..., : out_h * pool, : out_w * pool]
        blocks = cropped.reshape(*lead, out_h, pool, out_w, pool)
        blocks = np.moveaxis(blocks, -3, -2).reshape(*lead, out_h, out_w, pool * pool)
        self.argmax = blocks.argmax(axis=-1)
        return np.take_along_axis(blocks, self.argmax[..., None], axis=-1)[..., 0]

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        pool = self.pool
        lead = self.in_shape[:-2]
        out_h, out_w = grad.shape[-2:]

        routed = np.zeros((*lead, out_h, out_w, pool * pool), dtype=grad.dtype)
        np.put_along_axis(routed, self.argmax[..., None], grad[..., None], axis=-1)
        routed = routed.reshape(*lead, out_h, out_w, pool, pool)
        routed = np.moveaxis(routed, -2, -3).reshape(*lead, out_h * pool, out_w * pool)

        grad_x = np.zeros(self.in_shape, dtype=grad.dtype)
        grad_x[..., : out_h * pool, : out_w * pool] = routed
        return (grad_x,)


class GlobalAvgPool(Function):
    """Среднее по пространственным осям: N×C×H×W → N×C."""

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4:
            raise ShapeMismatchError(op="global_avg_pool", shapes=[x.shape])
        self.in_shape = x.shape
        return x.astype(np.float64).mean(axis=(2, 3)).astype(x.dtype)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        _, _, height, width = self.in_shape
        spread = grad.astype(np.float64)[:, :, None, None] / (height * width)
        return (np.broadcast_to(spread, self.in_shape).astype(grad.dtype),)


class BatchNorm(Function):
    """Batch normalization по оси каналов.

    В train режиме нормирует статистиками батча и (если update_stats)
    обновляет running статистики in-place:
    running = momentum·running + (1 − momentum)·batch.
    В infer режиме использует running статистики.
    """

    def forward(
        self,
        x: np.ndarray,
        gamma: np.ndarray,
        beta: np.ndarray,
        *,
        running_mean: np.ndarray,
        running_var: np.ndarray,
        mode: ForwardMode = ForwardMode.TRAIN,
        update_stats: bool = True,
        eps: float = BN_EPSILON,
        momentum: float = BN_MOMENTUM,
    ) -> np.ndarray:
        channels = gamma.shape[0] if gamma.ndim == 1 else -1
        if (
            x.ndim < 2
            or x.shape[1] != channels
            or beta.shape != gamma.shape
            or running_mean.shape != gamma.shape
            or running_var.shape != gamma.shape
        ):
            raise ShapeMismatchError(op="batchnorm", shapes=[x.shape, gamma.shape, beta.shape])

        self.axes = tuple(axis for axis in range(x.ndim) if axis != 1)
        self.param_view = (1, -1) + (1,) * (x.ndim - 2)
        self.mode = ForwardMode(mode)
        self.x_dtype = x.dtype
        self.p_dtype = gamma.dtype
        self.gamma = gamma.astype(np.float64)
        x64 = x.astype(np.float64)

        if self.mode == ForwardMode.TRAIN:
            if x.shape[0] < 2:
                raise InvalidArgumentError(
                    "batchnorm в train режиме требует батч из ≥ 2 примеров",
                    details={"shape": list(x.shape)},
                )
            mean = x64.mean(axis=self.axes)
            var = x64.var(axis=self.axes)
            if update_stats:
                running_mean[...] = momentum * running_mean.astype(np.float64) + (1.0 - momentum) * mean
                running_var[...] = momentum * running_var.astype(np.float64) + (1.0 - momentum) * var
        else:
            mean = running_mean.astype(np.float64)
            var = running_var.astype(np.float64)

        self.inv_std = 1.0 / np.sqrt(var + eps)
        self.x_hat = (x64 - mean.reshape(self.param_view)) * self.inv_std.reshape(self.param_view)
        out = self.gamma.reshape(self.param_view) * self.x_hat + beta.astype(np.float64).reshape(self.param_view)
        return out.astype(result_dtype(x, gamma, beta))

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        g = grad.astype(np.float64)
        grad_gamma = (g * self.x_hat).sum(axis=self.axes)
        grad_beta = g.sum(axis=self.axes)
        inv_std = self.inv_std.reshape(self.param_view)
        grad_x_hat = g * self.gamma.reshape(self.param_view)

        if self.mode == ForwardMode.TRAIN:
            count = g.size // g.shape[1]
            grad_x = (
                inv_std
                / count
                * (
                    count * grad_x_hat
                    - grad_x_hat.sum(axis=self.axes, keepdims=True)
                    - self.x_hat * (grad_x_hat * self.x_hat).sum(axis=self.axes, keepdims=True)
                )
            )
        else:
            grad_x = grad_x_hat * inv_std

        return (
            grad_x.astype(self.x_dtype),
            grad_gamma.astype(self.p_dtype),
            grad_beta.astype(self.p_dtype),
        )


class Dropout(Function):
    """Inverted dropout: выжившие элементы масштабируются на 1/(1 − rate)."""

    def forward(self, x: np.ndarray, rate: float, rng: Rng) -> np.ndarray:
        keep = rng.random(x.shape) >= rate
        self.scale = np.where(keep, 1.0 / (1.0 - rate), 0.0).astype(x.dtype)
        return x * self.scale

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad * self.scale,)


class SoftmaxCrossEntropy(Function):
    """Softmax + средний negative log-likelihood.

    Градиент по логитам: (probs − onehot) / N.
    """

    def forward(self, logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
        if logits.ndim != 2 or labels.shape != (logits.shape[0],):
            raise ShapeMismatchError(op="softmax_xent", shapes=[logits.shape, labels.shape])
        num_classes = logits.shape[1]
        if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
            raise InvalidArgumentError(
                f"Метки должны лежать в [0, {num_classes})",
                details={"min": int(labels.min()), "max": int(labels.max())},
            )

        z = logits.astype(np.float64)
        z = z - z.max(axis=1, keepdims=True)
        log_norm = np.log(np.exp(z).sum(axis=1, keepdims=True))
        log_probs = z - log_norm
        self.probs = np.exp(log_probs)
        self.labels = labels
        self.dtype = logits.dtype

        rows = np.arange(labels.shape[0])
        loss = -log_probs[rows, labels].mean()
        return np.asarray(loss, dtype=logits.dtype)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        count = self.labels.shape[0]
        delta = self.probs.copy()
        delta[np.arange(count), self.labels] -= 1.0
        grad_logits = delta * (float(grad.reshape(-1)[0]) / count)
        return (grad_logits.astype(self.dtype),)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Поэлементная сумма. Формы должны совпадать."""
    return Add.apply(a, b)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Матричное произведение 2D тензоров."""
    return MatMul.apply(a, b)


def bias_add(x: Tensor, bias: Tensor) -> Tensor:
    return BiasAdd.apply(x, bias)


def tensor_sum(x: Tensor) -> Tensor:
    return Sum.apply(x)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    return Reshape.apply(x, shape=tuple(shape))


def flatten(x: Tensor) -> Tensor:
    """N×... → N×(произведение остальных осей), порядок элементов сохраняется."""
    return reshape(x, (x.shape[0], -1))


def relu(x: Tensor) -> Tensor:
    return ReLU.apply(x)


def conv2d(
    x: Tensor,
    weight: Tensor,
    bias: Tensor | None = None,
    stride: int = 1,
    padding: Padding | str = Padding.SAME,
) -> Tensor:
    """Свёртка (кросс-корреляция) батча N×C×H×W или одного примера C×H×W.

    Args:
        x: Вход
        weight: Ядра O×C×kh×kw
        bias: Смещения O
        stride: Шаг
        padding: "same" (выход ceil(H/stride)) или "valid"

    Returns:
        Выход N×O×H'×W' (или O×H'×W' для входа без батча)

    Raises:
        ShapeMismatchError: Ядро больше паддированного входа или каналы не совпадают

    """
    single = x.ndim == 3
    if single:
        x = reshape(x, (1, *x.shape))
    inputs = (x, weight) if bias is None else (x, weight, bias)
    out = Conv2d.apply(*inputs, stride=stride, padding=Padding(padding))
    if single:
        out = reshape(out, out.shape[1:])
    return out


def maxpool2d(x: Tensor, pool: int = 2) -> Tensor:
    return MaxPool2d.apply(x, pool=pool)


def global_avg_pool(x: Tensor) -> Tensor:
    return GlobalAvgPool.apply(x)


def batchnorm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: Tensor,
    running_var: Tensor,
    mode: ForwardMode | str = ForwardMode.TRAIN,
    update_stats: bool = True,
    eps: float = BN_EPSILON,
    momentum: float = BN_MOMENTUM,
) -> Tensor:
    """Batch normalization; running статистики обновляются in-place в train режиме."""
    return BatchNorm.apply(
        x,
        gamma,
        beta,
        running_mean=running_mean.data,
        running_var=running_var.data,
        mode=ForwardMode(mode),
        update_stats=update_stats,
        eps=eps,
        momentum=momentum,
    )


def dropout(x: Tensor, rate: float, rng: Rng | None, mode: ForwardMode | str = ForwardMode.TRAIN) -> Tensor:
    """Inverted dropout. В infer режиме и при rate = 0 возвращает вход без изменений.

    Raises:
        InvalidArgumentError: rate вне [0, 1) или нет rng в train режиме

    """
    if not 0.0 <= rate < 1.0:
        raise InvalidArgumentError(f"rate dropout должен лежать в [0, 1): {rate}")
    if ForwardMode(mode) == ForwardMode.INFER or rate == 0.0:
        return x
    if rng is None:
        raise InvalidArgumentError("dropout в train режиме требует rng")
    return Dropout.apply(x, rate=rate, rng=rng)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Численно устойчивый softmax по строкам (float64)."""
    z = logits.astype(np.float64)
    z = z - z.max(axis=1, keepdims=True)
    exp = np.exp(z)
    return exp / exp.sum(axis=1, keepdims=True)


def softmax_xent(logits: Tensor, labels: Sequence[int] | np.ndarray) -> tuple[Tensor, Tensor]:
    """Softmax cross-entropy.

    Args:
        logits: N×K логиты
        labels: N индексов классов

    Returns:
        (loss, probs): скалярный средний NLL и N×K вероятности

    Raises:
        InvalidArgumentError: Метка вне [0, K)

    """
    label_array = np.asarray(labels, dtype=np.int64).reshape(-1)
    op = SoftmaxCrossEntropy(logits)
    loss_data = op.forward(logits.data, label_array)
    loss = Tensor(loss_data, creator=op if logits.requires_grad else None, requires_grad=logits.requires_grad)
    probs = Tensor(op.probs.astype(logits.dtype))
    return loss, probs
