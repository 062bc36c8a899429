"""Смешивание сигнала с шумом при заданном SNR.

Мощность - среднеквадратичное значение по всем отсчётам (без VAD).
Коэффициент шума: a = sqrt(P_s / (P_n · 10^(snr/10))).
"""

from dataclasses import dataclass

import numpy as np

from src.engine import Rng
from src.services.audio.wav_io import Waveform
from src.shared.errors import UndefinedSnrError


@dataclass(frozen=True)
class MixResult:
    """Результат смешивания.

    Attributes:
        mixed: signal_part + noise_part
        signal_part: Сигнал после (возможного) масштабирования пика
        noise_part: a · шум после масштабирования пика
        gain: Коэффициент a
        peak_scale: Множитель против клиппинга (1.0, если не требовался)
        noise_offset: Смещение сегмента шума в исходном потоке

    """

    mixed: np.ndarray
    signal_part: np.ndarray
    noise_part: np.ndarray
    gain: float
    peak_scale: float
    noise_offset: int

    @property
    def achieved_snr_db(self) -> float:
        return measure_snr(self.signal_part, self.noise_part)


def signal_power(samples: np.ndarray) -> float:
    """Средняя мощность по всем отсчётам."""
    return float(np.mean(np.asarray(samples, dtype=np.float64) ** 2))


def measure_snr(signal: np.ndarray, noise: np.ndarray) -> float:
    """10·log10(P_signal / P_noise) в дБ."""
    noise_power = signal_power(noise)
    if noise_power == 0.0:
        raise UndefinedSnrError("Мощность шума равна нулю")
    return 10.0 * float(np.log10(signal_power(signal) / noise_power))


def fit_noise(noise: np.ndarray, length: int, rng: Rng) -> tuple[np.ndarray, int]:
    """Сегмент шума длины length со случайным (seeded) смещением.

    Короткий шум повторяется (tile) до нужной длины.

    Returns:
        (сегмент, смещение)

    """
    if noise.size == 0:
        raise UndefinedSnrError("Шум нулевой длины")
    source = noise
    if noise.size < length:
        repeats = -(-length // noise.size) + 1
        source = np.tile(noise, repeats)
        offset = int(rng.integers(0, noise.size))
    else:
        offset = int(rng.integers(0, noise.size - length + 1))
    return source[offset : offset + length], offset


def mix_at_snr(
    signal: Waveform | np.ndarray,
    noise: Waveform | np.ndarray,
    snr_db: float,
    rng: Rng,
) -> MixResult:
    """Смешать сигнал с шумом так, чтобы SNR равнялся snr_db.

    Если сумма выходит за [−1, 1], сигнал и шум масштабируются одним
    множителем (SNR не меняется), множитель сохраняется в peak_scale.

    Args:
        signal: Чистый сигнал
        noise: Поток шума (любой ненулевой длины)
        snr_db: Целевой SNR в дБ
        rng: Генератор для смещения сегмента шума

    Returns:
        MixResult

    Raises:
        UndefinedSnrError: Нулевой сигнал, шум нулевой длины или нулевой мощности

    """
    clean = np.asarray(signal.samples if isinstance(signal, Waveform) else signal, dtype=np.float64)
    source = np.asarray(noise.samples if isinstance(noise, Waveform) else noise, dtype=np.float64)

    p_signal = signal_power(clean)
    if p_signal == 0.0:
        raise UndefinedSnrError("Сигнал нулевой, SNR не определён")

    segment, offset = fit_noise(source, clean.size, rng)
    p_noise = signal_power(segment)
    if p_noise == 0.0:
        raise UndefinedSnrError("Шум нулевой мощности, SNR не определён")

    gain = float(np.sqrt(p_signal / (p_noise * 10.0 ** (snr_db / 10.0))))
    noise_part = gain * segment
    mixed = clean + noise_part

    peak = float(np.max(np.abs(mixed)))
    peak_scale = 1.0 / peak if peak > 1.0 else 1.0
    if peak_scale != 1.0:
        clean = clean * peak_scale
        noise_part = noise_part * peak_scale
        mixed = clean + noise_part

    return MixResult(
        mixed=mixed,
        signal_part=clean,
        noise_part=noise_part,
        gain=gain,
        peak_scale=peak_scale,
        noise_offset=offset,
    )
