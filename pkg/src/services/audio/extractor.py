"""FeatureExtractor - признаки для списка аудиофайлов.

Кэширует ненормированные log-Mel матрицы по пути, чтобы подгонка
статистик на обучающей части и извлечение признаков не читали файлы дважды.
Кэш ограничен max_cached записями и вытесняет давно не использованные.
"""

from collections import OrderedDict
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from src.core.constants import FEATURE_CACHE_MAX_ENTRIES, N_FRAMES, N_MELS
from src.services.audio.features import FeatureStats, fit_frames, log_mel_spectrogram, normalize
from src.services.audio.wav_io import load_wav
from src.shared.errors import InvalidArgumentError
from src.shared.logging import LogExecutionTime, get_logger

logger = get_logger()


class FeatureExtractor:
    """Извлечение нормированных признаков N × 1 × 40 × 64.

    Args:
        stats: Готовые статистики нормализации (иначе после fit)
        max_cached: Сколько матриц держать в кэше, 0 отключает кэш

    Example:
        >>> extractor = FeatureExtractor()
        >>> extractor.fit(train_paths)
        >>> batch = extractor.extract_many(test_paths)

    """

    def __init__(self, stats: FeatureStats | None = None, max_cached: int = FEATURE_CACHE_MAX_ENTRIES) -> None:
        if max_cached < 0:
            raise InvalidArgumentError(f"max_cached должен быть >= 0: {max_cached}")
        self.stats = stats
        self.max_cached = max_cached
        self._raw: OrderedDict[Path, np.ndarray] = OrderedDict()

    @property
    def cached(self) -> int:
        return len(self._raw)

    def raw(self, path: Path) -> np.ndarray:
        """Ненормированная log-Mel матрица файла (из кэша, если есть)."""
        cached = self._raw.get(path)
        if cached is not None:
            self._raw.move_to_end(path)
            return cached

        matrix = log_mel_spectrogram(load_wav(path).samples)
        if self.max_cached:
            self._raw[path] = matrix
            if len(self._raw) > self.max_cached:
                self._raw.popitem(last=False)
        return matrix

    def fit(self, paths: Sequence[Path]) -> FeatureStats:
        """Подогнать статистики нормализации по файлам обучающей части."""
        with LogExecutionTime("feature_stats", files=len(paths)):
            self.stats = FeatureStats.fit(self.raw(path) for path in paths)
        return self.stats

    def extract(self, path: Path) -> np.ndarray:
        """Признаки одного файла: 40 × 64 float32."""
        matrix = self.raw(path)
        if self.stats is not None:
            matrix = normalize(matrix, self.stats)
        return fit_frames(matrix).astype(np.float32)

    def extract_many(self, paths: Sequence[Path]) -> np.ndarray:
        """Признаки файлов в порядке списка: N × 1 × 40 × 64 float32."""
        batch = np.zeros((len(paths), 1, N_MELS, N_FRAMES), dtype=np.float32)
        with LogExecutionTime("feature_extraction", files=len(paths), cached=self.cached):
            for index, path in enumerate(paths):
                batch[index, 0] = self.extract(path)
        return batch

    def clear_cache(self) -> None:
        self._raw.clear()
