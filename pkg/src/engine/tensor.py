"""Тензор с обратным режимом дифференцирования.

Tensor хранит numpy массив (float32 по умолчанию), накопленный градиент
и ссылку на Function, которая его породила. backward() обходит граф
в топологическом порядке и раздаёт градиенты входам.
"""

from abc import abstractmethod
from collections.abc import Sequence
from typing import Any, Union

import numpy as np

from src.shared.errors import ShapeMismatchError

ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]


def result_dtype(*arrays: np.ndarray) -> np.dtype:
    """Тип результата операции: float64 только если он есть среди входов."""
    return np.result_type(*(array.dtype for array in arrays))


class Function:
    """Базовый класс дифференцируемой операции.

    Наследники реализуют forward() над numpy массивами и backward(),
    возвращающий градиенты по каждому входу (None если градиента нет).
    """

    def __init__(self, *tensors: "Tensor") -> None:
        self.tensors: tuple[Tensor, ...] | None = tensors

    @abstractmethod
    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        """Прямой проход над данными входных тензоров."""
        raise NotImplementedError

    @abstractmethod
    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        """Градиенты по входам из градиента по выходу."""
        raise NotImplementedError

    @classmethod
    def apply(cls, *tensors: "Tensor", **kwargs: Any) -> "Tensor":
        """Создать операцию, выполнить forward и обернуть результат в Tensor."""
        func = cls(*tensors)
        out_data = func.forward(*(tensor.data for tensor in tensors), **kwargs)
        requires_grad = any(tensor.requires_grad for tensor in tensors)
        return Tensor(
            out_data,
            creator=func if requires_grad else None,
            requires_grad=requires_grad,
        )


class Tensor:
    """Плотный тензор с опциональным градиентом.

    Attributes:
        data: Row-major массив float32 (float64 допускается для проверки градиентов)
        grad: Градиент той же формы или None
        requires_grad: Нужен ли градиент по этому тензору
        creator: Операция, породившая тензор (None для листьев)

    """

    def __init__(
        self,
        data: ArrayLike,
        creator: Function | None = None,
        requires_grad: bool = False,
        dtype: np.dtype | type | None = None,
    ) -> None:
        array = np.asarray(data, dtype=dtype)
        if dtype is None and array.dtype not in (np.float32, np.float64):
            array = array.astype(np.float32)
        self.data: np.ndarray = array
        self.grad: np.ndarray | None = None
        self.creator = creator
        self.requires_grad = requires_grad

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        """Данные тензора (без копирования)."""
        return self.data

    def item(self) -> float:
        """Значение скалярного тензора."""
        if self.data.size != 1:
            raise ShapeMismatchError(op="item", shapes=[self.shape])
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        """Тензор с теми же данными, отвязанный от графа."""
        return Tensor(self.data, requires_grad=False)

    def copy(self) -> "Tensor":
        """Глубокая копия данных (градиент не копируется)."""
        return Tensor(self.data.copy(), requires_grad=self.requires_grad)

    def zero_grad(self) -> None:
        self.grad = None

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.data).all())

    def accumulate_grad(self, grad: np.ndarray) -> None:
        """Прибавить градиент (градиенты нескольких потребителей суммируются)."""
        if grad.shape != self.data.shape:
            raise ShapeMismatchError(op="accumulate_grad", shapes=[grad.shape, self.data.shape])
        grad = grad.astype(self.data.dtype, copy=False)
        if self.grad is None:
            self.grad = grad.copy()
        else:
            self.grad = self.grad + grad

    def backward(self, grad: ArrayLike | None = None) -> None:
        """Обратный проход от этого тензора ко всем листьям графа.

        Без аргумента считается, что d(self)/d(self) = 1.

        Args:
            grad: Градиент по этому тензору

        """
        if not self.requires_grad:
            return

        seed = np.ones_like(self.data) if grad is None else np.asarray(grad, dtype=self.data.dtype)
        self.accumulate_grad(seed)

        ordered: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]

        # Post-order обход: узел попадает в список после всех своих входов
        while stack:
            node, children_done = stack.pop()
            if id(node) in visited:
                continue
            if not children_done:
                stack.append((node, True))
                if node.creator is not None and node.creator.tensors is not None:
                    for parent in node.creator.tensors:
                        if parent.requires_grad and id(parent) not in visited:
                            stack.append((parent, False))
            else:
                visited.add(id(node))
                ordered.append(node)

        for node in reversed(ordered):
            creator = node.creator
            if creator is None or creator.tensors is None or node.grad is None:
                continue
            grads = creator.backward(node.grad)
            for parent, parent_grad in zip(creator.tensors, grads, strict=True):
                if parent.requires_grad and parent_grad is not None:
                    parent.accumulate_grad(parent_grad)

        for node in ordered:
            if node.creator is not None:
                node.creator.tensors = None
                node.creator = None

    def __add__(self, other: "Tensor") -> "Tensor":
        from src.engine.functional import add

        return add(self, other)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from src.engine.functional import matmul

        return matmul(self, other)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"
