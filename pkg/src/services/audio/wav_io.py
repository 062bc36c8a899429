"""Чтение и запись WAV файлов (RIFF/WAVE, PCM-16, mono, 8000 Гц).

Использует soundfile (libsndfile). Файлы в других форматах отклоняются
с указанием причины.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import soundfile as sf

from src.core.constants import PCM16_SCALE, SAMPLE_RATE
from src.shared.errors import InvalidArgumentError, MissingArtifactError, UnsupportedAudioError
from src.shared.logging import get_logger

logger = get_logger()

PCM16_MAX = 32767
PCM16_MIN = -32768


@dataclass(frozen=True)
class Waveform:
    """Моно сигнал со значениями в [−1, 1]."""

    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self) -> None:
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise InvalidArgumentError(
                "Waveform должен быть непустым одномерным сигналом",
                details={"shape": list(self.samples.shape)},
            )
        if self.sample_rate != SAMPLE_RATE:
            raise InvalidArgumentError(
                f"Поддерживается только {SAMPLE_RATE} Гц",
                details={"sample_rate": self.sample_rate},
            )

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def __len__(self) -> int:
        return int(self.samples.size)


def load_wav(path: Path | str) -> Waveform:
    """Прочитать WAV файл.

    Args:
        path: Путь к файлу

    Returns:
        Waveform с отсчётами, масштабированными на 1/32768

    Raises:
        MissingArtifactError: Файл не существует
        UnsupportedAudioError: Не RIFF/WAVE, не PCM-16, не моно или не 8000 Гц

    """
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(path=str(path))

    try:
        info = sf.info(str(path))
    except sf.LibsndfileError as e:
        raise UnsupportedAudioError(path=str(path), reason="not a RIFF/WAVE file") from e

    if info.format != "WAV":
        raise UnsupportedAudioError(path=str(path), reason="not a RIFF/WAVE file")
    if info.subtype != "PCM_16":
        raise UnsupportedAudioError(path=str(path), reason="unsupported codec")
    if info.channels != 1:
        raise UnsupportedAudioError(path=str(path), reason="unsupported channel count")
    if info.samplerate != SAMPLE_RATE:
        raise UnsupportedAudioError(path=str(path), reason="unsupported sample rate")

    pcm, _ = sf.read(str(path), dtype="int16", always_2d=False)
    if pcm.size == 0:
        raise UnsupportedAudioError(path=str(path), reason="empty waveform")

    return Waveform(samples=pcm.astype(np.float64) / PCM16_SCALE, sample_rate=SAMPLE_RATE)


def to_pcm16(samples: np.ndarray) -> np.ndarray:
    """Квантовать сигнал в int16 с насыщением."""
    scaled = np.round(np.asarray(samples, dtype=np.float64) * PCM16_SCALE)
    return np.clip(scaled, PCM16_MIN, PCM16_MAX).astype(np.int16)


def save_wav(path: Path | str, samples: np.ndarray, sample_rate: int = SAMPLE_RATE) -> Path:
    """Записать моно PCM-16 WAV файл.

    Args:
        path: Путь к файлу (родительские директории создаются)
        samples: Сигнал в [−1, 1]
        sample_rate: Частота дискретизации (только 8000)

    Returns:
        Путь к записанному файлу

    """
    if sample_rate != SAMPLE_RATE:
        raise InvalidArgumentError(f"Поддерживается только {SAMPLE_RATE} Гц", details={"sample_rate": sample_rate})
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sf.write(str(path), to_pcm16(samples), sample_rate, subtype="PCM_16", format="WAV")
    return path
