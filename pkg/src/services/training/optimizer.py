"""Стохастический градиентный спуск без момента.

p ← p − lr·g для каждого обучаемого тензора. Замороженные тензоры и
буферы batch norm не изменяются.
"""

from collections.abc import Mapping

import numpy as np

from src.models import ParamStore
from src.shared.errors import InvalidArgumentError, NonFiniteError, ShapeMismatchError

Grads = Mapping[str, np.ndarray]


def collect_grads(params: ParamStore) -> dict[str, np.ndarray]:
    """Градиенты обучаемых тензоров после backward (тензоры без градиента пропускаются)."""
    return {name: tensor.grad for name, tensor in params.trainable() if tensor.grad is not None}


def sgd_step(params: ParamStore, grads: Grads, lr: float) -> list[str]:
    """Один шаг SGD на месте.

    Все градиенты проверяются до изменения параметров, поэтому при ошибке
    ни один тензор не меняется. Обновление считается в float64 и приводится
    к dtype параметра.

    Args:
        params: Параметры модели
        grads: Градиенты по именам тензоров
        lr: Шаг обучения, ≥ 0

    Returns:
        Имена обновлённых тензоров

    Raises:
        InvalidArgumentError: lr < 0 или неизвестное имя тензора
        ShapeMismatchError: Форма градиента не совпадает с формой тензора
        NonFiniteError: Градиент содержит NaN/Inf

    """
    if lr < 0 or not np.isfinite(lr):
        raise InvalidArgumentError(f"learning rate должен быть конечным и ≥ 0: {lr}")

    for name, grad in grads.items():
        if name not in params:
            raise InvalidArgumentError(f"Градиент для неизвестного тензора: {name}")
        if grad.shape != params[name].shape:
            raise ShapeMismatchError(op=f"sgd_step:{name}", shapes=[grad.shape, params[name].shape])
        if not np.isfinite(grad).all():
            raise NonFiniteError(where=name, details={"nonfinite": int(np.size(grad) - np.isfinite(grad).sum())})

    updated = []
    for name, grad in grads.items():
        if params.is_frozen(name) or params.is_buffer(name):
            continue
        tensor = params[name]
        step = tensor.data.astype(np.float64) - lr * grad.astype(np.float64)
        tensor.data = step.astype(tensor.dtype)
        updated.append(name)
    return updated
