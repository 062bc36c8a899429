"""Детерминированный расщепляемый генератор случайных чисел.

Основан на counter-based генераторе Philox из numpy. Дочерние потоки
выводятся через SeedSequence.spawn_key, поэтому поток для (seed, ключ)
не зависит от порядка, в котором потоки были созданы.
"""

from collections.abc import Sequence

import numpy as np
import xxhash

from src.shared.errors import InvalidArgumentError

SEED_LIMIT = 2**64

SplitKey = int | str


def _key_to_int(key: SplitKey) -> int:
    """Строковые ключи переводятся в 32-битное число через xxh32."""
    if isinstance(key, str):
        return xxhash.xxh32_intdigest(key.encode("utf-8"))
    if key < 0:
        raise InvalidArgumentError(f"Ключ расщепления должен быть неотрицательным: {key}")
    return key


class Rng:
    """Поток случайных чисел, однозначно заданный seed и путём ключей.

    Example:
        >>> rng = Rng(42)
        >>> epoch_rng = rng.split("shuffle").split(3)
        >>> order = epoch_rng.permutation(10)

    """

    def __init__(self, seed: int, path: Sequence[int] = ()) -> None:
        if not 0 <= seed < SEED_LIMIT:
            raise InvalidArgumentError(f"seed должен быть 64-битным беззнаковым: {seed}")
        self.seed = int(seed)
        self.path: tuple[int, ...] = tuple(path)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def split(self, key: SplitKey) -> "Rng":
        """Независимый дочерний поток для ключа."""
        return Rng(self.seed, (*self.path, _key_to_int(key)))

    def random(self, shape: int | tuple[int, ...] | None = None) -> np.ndarray:
        """Равномерные значения на [0, 1) в float64."""
        return self.generator.random(shape)

    def uniform(self, low: float, high: float, shape: int | tuple[int, ...] | None = None) -> np.ndarray:
        return self.generator.uniform(low, high, shape)

    def normal(self, shape: int | tuple[int, ...] | None = None, scale: float = 1.0) -> np.ndarray:
        return self.generator.normal(0.0, scale, shape)

    def integers(self, low: int, high: int, shape: int | tuple[int, ...] | None = None) -> np.ndarray:
        return self.generator.integers(low, high, shape)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, path={self.path})"
