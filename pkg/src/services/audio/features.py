"""Log-Mel признаки для 8 кГц сигналов.

Пайплайн:
    pre-emphasis 0.97 → кадры 200 отсчётов (25 мс) с шагом 80 (10 мс) →
    окно Хэмминга → 256-точечный спектр мощности → 40 треугольных Mel фильтров
    0-4000 Гц (mel(f) = 2595·log10(1 + f/700)) → log(x + 1e-10) →
    нормализация по статистикам обучающей части → pad/crop до 64 кадров
"""

from collections.abc import Iterable
from dataclasses import dataclass
from functools import lru_cache

import librosa
import numpy as np
from scipy.signal import get_window, lfilter

from src.core.constants import (
    F_MAX,
    F_MIN,
    FEATURE_STD_FLOOR,
    FRAME_LENGTH,
    HOP_LENGTH,
    LOG_FLOOR,
    N_FFT,
    N_FRAMES,
    N_MELS,
    PRE_EMPHASIS,
    SAMPLE_RATE,
)
from src.services.audio.wav_io import Waveform
from src.shared.errors import InsufficientDataError, ShapeMismatchError, SignalTooShortError


def hz_to_mel(frequency: float | np.ndarray) -> float | np.ndarray:
    """Mel шкала HTK: 2595·log10(1 + f/700)."""
    return librosa.hz_to_mel(frequency, htk=True)


@lru_cache(maxsize=4)
def mel_filterbank(
    n_mels: int = N_MELS,
    n_fft: int = N_FFT,
    sample_rate: int = SAMPLE_RATE,
    f_min: float = F_MIN,
    f_max: float = F_MAX,
) -> np.ndarray:
    """Треугольные фильтры (n_mels × n_fft/2+1) с пиком 1, в float64."""
    return librosa.filters.mel(
        sr=sample_rate,
        n_fft=n_fft,
        n_mels=n_mels,
        fmin=f_min,
        fmax=f_max,
        htk=True,
        norm=None,
        dtype=np.float64,
    )


@lru_cache(maxsize=1)
def _window() -> np.ndarray:
    return get_window("hamming", FRAME_LENGTH, fftbins=True)


def power_spectrogram(samples: np.ndarray) -> np.ndarray:
    """Спектр мощности кадров: (n_fft/2+1) × число кадров.

    Raises:
        SignalTooShortError: Сигнал короче одного кадра (200 отсчётов)

    """
    if samples.size < FRAME_LENGTH:
        raise SignalTooShortError(
            f"Сигнал из {samples.size} отсчётов короче кадра {FRAME_LENGTH}",
            details={"length": int(samples.size)},
        )
    emphasized = lfilter([1.0, -PRE_EMPHASIS], [1.0], np.asarray(samples, dtype=np.float64))
    frames = librosa.util.frame(np.ascontiguousarray(emphasized), frame_length=FRAME_LENGTH, hop_length=HOP_LENGTH)
    spectrum = np.fft.rfft(frames * _window()[:, None], n=N_FFT, axis=0)
    return np.abs(spectrum) ** 2


def log_mel_spectrogram(samples: np.ndarray) -> np.ndarray:
    """Ненормированная log-Mel матрица 40 × число кадров (float64)."""
    mel = mel_filterbank() @ power_spectrogram(samples)
    return np.log(mel + LOG_FLOOR)


def fit_frames(matrix: np.ndarray, n_frames: int = N_FRAMES) -> np.ndarray:
    """Дополнить нулями справа или обрезать по центру до n_frames столбцов."""
    current = matrix.shape[1]
    if current == n_frames:
        return matrix
    if current < n_frames:
        return np.pad(matrix, ((0, 0), (0, n_frames - current)))
    start = (current - n_frames) // 2
    return matrix[:, start : start + n_frames]


@dataclass(frozen=True)
class FeatureStats:
    """Статистики нормализации по Mel полосам (обучающая часть)."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self) -> None:
        if self.mean.shape != (N_MELS,) or self.std.shape != (N_MELS,):
            raise ShapeMismatchError(op="feature_stats", shapes=[self.mean.shape, self.std.shape])

    @classmethod
    def identity(cls) -> "FeatureStats":
        return cls(mean=np.zeros(N_MELS, dtype=np.float32), std=np.ones(N_MELS, dtype=np.float32))

    @classmethod
    def fit(cls, matrices: Iterable[np.ndarray]) -> "FeatureStats":
        """Среднее и стандартное отклонение каждой полосы по всем кадрам.

        Raises:
            InsufficientDataError: Нет ни одной матрицы

        """
        total = np.zeros(N_MELS, dtype=np.float64)
        total_sq = np.zeros(N_MELS, dtype=np.float64)
        count = 0
        for matrix in matrices:
            total += matrix.sum(axis=1)
            total_sq += (matrix.astype(np.float64) ** 2).sum(axis=1)
            count += matrix.shape[1]
        if count == 0:
            raise InsufficientDataError("Нет данных для статистик нормализации")
        mean = total / count
        var = np.maximum(total_sq / count - mean**2, 0.0)
        std = np.maximum(np.sqrt(var), FEATURE_STD_FLOOR)
        return cls(mean=mean.astype(np.float32), std=std.astype(np.float32))


def normalize(matrix: np.ndarray, stats: FeatureStats) -> np.ndarray:
    return (matrix - stats.mean.astype(np.float64)[:, None]) / stats.std.astype(np.float64)[:, None]


def log_mel(waveform: Waveform, stats: FeatureStats | None = None) -> np.ndarray:
    """Признаки модели: нормированная log-Mel матрица 40 × 64 (float32).

    Args:
        waveform: Сигнал 8 кГц (≥ 200 отсчётов)
        stats: Статистики нормализации (без них нормализация не применяется)

    Returns:
        Матрица N_MELS × N_FRAMES

    Raises:
        SignalTooShortError: Сигнал короче одного кадра

    """
    matrix = log_mel_spectrogram(waveform.samples)
    if stats is not None:
        matrix = normalize(matrix, stats)
    return fit_frames(matrix).astype(np.float32)
