"""ParamStore - именованные тензоры параметров модели.

Хранит тензоры в каноническом порядке ModelSpec, флаги заморозки
и пометки буферов (running статистики batch norm).
"""

from collections.abc import Iterable, Iterator, Mapping, Sequence
from math import sqrt

import numpy as np

from src.engine import Rng, Tensor
from src.models.spec import ModelSpec
from src.shared.errors import InvalidArgumentError, ShapeMismatchError


def matches_prefix(name: str, prefix: str) -> bool:
    """Имя попадает под префикс целиком по сегментам (block1 не совпадает с block10)."""
    prefix = prefix.rstrip(".")
    return name == prefix or name.startswith(prefix + ".")


class ParamStore:
    """Отображение имя → Tensor с флагами frozen и buffer.

    Example:
        >>> store = init_params(spec, Rng(0))
        >>> store.freeze(["stem", "block1"])
        >>> store["stem.conv.weight"].shape
        (64, 1, 3, 3)

    """

    def __init__(
        self,
        tensors: Mapping[str, Tensor] | None = None,
        buffers: Iterable[str] = (),
        frozen: Iterable[str] = (),
    ) -> None:
        self._tensors: dict[str, Tensor] = dict(tensors or {})
        self._buffers: set[str] = set(buffers)
        self._frozen: set[str] = set(frozen)

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __contains__(self, name: object) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def names(self) -> list[str]:
        return list(self._tensors)

    def items(self) -> Iterator[tuple[str, Tensor]]:
        return iter(self._tensors.items())

    def add(self, name: str, tensor: Tensor, buffer: bool = False) -> None:
        if name in self._tensors:
            raise InvalidArgumentError(f"Параметр уже существует: {name}")
        self._tensors[name] = tensor
        if buffer:
            self._buffers.add(name)

    def is_buffer(self, name: str) -> bool:
        return name in self._buffers

    def is_frozen(self, name: str) -> bool:
        return name in self._frozen

    def any_frozen(self, prefix: str) -> bool:
        """Заморожен ли хоть один тензор под префиксом (слой batch norm)."""
        return any(matches_prefix(name, prefix) for name in self._frozen)

    def trainable(self) -> Iterator[tuple[str, Tensor]]:
        """Обучаемые тензоры: не буферы и не замороженные."""
        for name, tensor in self._tensors.items():
            if name not in self._buffers and name not in self._frozen:
                yield name, tensor

    def resolve(self, prefixes: Sequence[str]) -> list[str]:
        """Имена тензоров, попадающих под любой из префиксов, в каноническом порядке."""
        return [name for name in self._tensors if any(matches_prefix(name, prefix) for prefix in prefixes)]

    def freeze(self, prefixes: Sequence[str]) -> list[str]:
        """Заморозить тензоры под префиксами. Возвращает замороженные имена."""
        names = self.resolve(prefixes)
        self._frozen.update(names)
        for name in names:
            self._tensors[name].requires_grad = False
        return names

    def unfreeze_all(self) -> None:
        for name in self._frozen:
            if name not in self._buffers:
                self._tensors[name].requires_grad = True
        self._frozen.clear()

    @property
    def frozen(self) -> list[str]:
        return [name for name in self._tensors if name in self._frozen]

    def zero_grad(self) -> None:
        for tensor in self._tensors.values():
            tensor.zero_grad()

    def assign(self, name: str, value: np.ndarray) -> None:
        """Скопировать значение в существующий тензор (форма должна совпадать)."""
        target = self._tensors[name]
        if target.shape != value.shape:
            raise ShapeMismatchError(op=f"assign:{name}", shapes=[value.shape, target.shape])
        target.data = np.array(value, dtype=target.dtype, copy=True)

    def state(self) -> dict[str, np.ndarray]:
        """Снимок данных всех тензоров (без копирования)."""
        return {name: tensor.data for name, tensor in self._tensors.items()}

    def copy(self) -> "ParamStore":
        """Глубокая копия данных, флагов заморозки и буферов."""
        tensors = {
            name: Tensor(tensor.data.copy(), requires_grad=tensor.requires_grad)
            for name, tensor in self._tensors.items()
        }
        return ParamStore(tensors, buffers=self._buffers, frozen=self._frozen)

    def num_parameters(self) -> int:
        """Число обучаемых скаляров (без буферов)."""
        return sum(tensor.size for name, tensor in self._tensors.items() if name not in self._buffers)

    def is_finite(self) -> bool:
        return all(tensor.is_finite() for tensor in self._tensors.values())

    def equals(self, other: "ParamStore") -> bool:
        """Побитовое равенство имён, форм и данных."""
        if self.names() != other.names():
            return False
        return all(
            self[name].data.dtype == other[name].data.dtype
            and self[name].data.tobytes() == other[name].data.tobytes()
            for name in self._tensors
        )


def init_params(spec: ModelSpec, rng: Rng) -> ParamStore:
    """Инициализировать параметры по спецификации.

    Веса свёрток и dense слоёв - He-uniform U(−√(6/fan_in), √(6/fan_in)),
    смещения и beta - нули, gamma - единицы, running_var - единицы.
    Поток случайных чисел каждого тензора выводится из его имени,
    поэтому значения не зависят от порядка слоёв.

    Args:
        spec: Архитектура
        rng: Базовый генератор

    Returns:
        ParamStore в каноническом порядке spec.param_shapes()

    """
    store = ParamStore()
    for param in spec.param_shapes():
        if param.fan_in > 0:
            limit = sqrt(6.0 / param.fan_in)
            data = rng.split(param.name).uniform(-limit, limit, param.shape).astype(np.float32)
        else:
            data = np.full(param.shape, param.fill, dtype=np.float32)
        store.add(param.name, Tensor(data, requires_grad=not param.buffer), buffer=param.buffer)
    return store
