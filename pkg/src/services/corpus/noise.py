"""Синтетические генераторы шумов четырёх сценариев.

- subway: белый шум + периодические импульсы
- babble: сумма 24 случайных тональных всплесков
- car: белый шум через однополюсный ФНЧ
- exhibition: шум со спектром 1/f

Все генераторы возвращают поток с пиком 0.5 (float64).
"""

from collections.abc import Callable

import numpy as np
from scipy.signal import lfilter
from scipy.signal.windows import hann

from src.core.constants import BABBLE_TALKERS, NOISE_STREAM_SECONDS, SAMPLE_RATE
from src.core.enums import NoiseType
from src.engine import Rng
from src.shared.errors import InvalidArgumentError

NOISE_PEAK = 0.5
CAR_POLE = 0.95

NoiseGenerator = Callable[[int, Rng], np.ndarray]


def _to_peak(samples: np.ndarray) -> np.ndarray:
    peak = float(np.max(np.abs(samples)))
    return samples * (NOISE_PEAK / peak) if peak > 0 else samples


def subway_noise(length: int, rng: Rng) -> np.ndarray:
    """Белый шум + импульсы стыков рельсов с периодом 80-160 мс."""
    samples = rng.split("white").normal(length, scale=0.3)
    period = int(rng.split("period").integers(int(0.08 * SAMPLE_RATE), int(0.16 * SAMPLE_RATE)))
    click = np.exp(-np.arange(int(0.01 * SAMPLE_RATE)) / (0.002 * SAMPLE_RATE))
    for start in range(int(rng.split("phase").integers(0, period)), length, period):
        end = min(start + click.size, length)
        samples[start:end] += 2.0 * click[: end - start]
    return _to_peak(samples)


def babble_noise(length: int, rng: Rng, talkers: int = BABBLE_TALKERS) -> np.ndarray:
    """Сумма тональных всплесков: частота 100-1000 Гц, длительность 0.1-0.4 с."""
    samples = np.zeros(length, dtype=np.float64)
    for talker in range(talkers):
        talker_rng = rng.split(talker)
        duration = min(int(talker_rng.uniform(0.1, 0.4) * SAMPLE_RATE), length)
        start = int(talker_rng.integers(0, length - duration + 1))
        frequency = float(talker_rng.uniform(100.0, 1000.0))
        amplitude = float(talker_rng.uniform(0.3, 1.0))
        t = np.arange(duration) / SAMPLE_RATE
        burst = amplitude * hann(duration, sym=False) * np.sin(2 * np.pi * frequency * t)
        samples[start : start + duration] += burst
    return _to_peak(samples)


def car_noise(length: int, rng: Rng) -> np.ndarray:
    """Белый шум через однополюсный ФНЧ y[n] = (1 − p)·x[n] + p·y[n−1]."""
    white = rng.normal(length)
    return _to_peak(lfilter([1.0 - CAR_POLE], [1.0, -CAR_POLE], white))


def exhibition_noise(length: int, rng: Rng) -> np.ndarray:
    """Розовый шум: спектр мощности белого шума умножается на 1/f."""
    spectrum = np.fft.rfft(rng.normal(length))
    frequencies = np.fft.rfftfreq(length, d=1.0 / SAMPLE_RATE)
    shaping = np.ones_like(frequencies)
    shaping[1:] = 1.0 / np.sqrt(frequencies[1:])
    shaping[0] = 0.0
    return _to_peak(np.fft.irfft(spectrum * shaping, n=length))


NOISE_GENERATORS: dict[str, NoiseGenerator] = {
    NoiseType.SUBWAY.value: subway_noise,
    NoiseType.BABBLE.value: babble_noise,
    NoiseType.CAR.value: car_noise,
    NoiseType.EXHIBITION.value: exhibition_noise,
}


def noise_stream(noise_type: NoiseType | str, rng: Rng, seconds: float = NOISE_STREAM_SECONDS) -> np.ndarray:
    """Поток шума заданного типа.

    Raises:
        InvalidArgumentError: Тип шума none или неизвестен

    """
    generator = NOISE_GENERATORS.get(NoiseType(noise_type).value)
    if generator is None:
        raise InvalidArgumentError(f"Нет генератора для шума '{NoiseType(noise_type).value}'")
    return generator(int(seconds * SAMPLE_RATE), rng)
