"""Синтетический корпус изолированных цифр.

Каждый класс - набор из трёх синусоидальных партиалов (формант-подобный
тон) с огибающей Тьюки и seeded джиттером частот ±2%. Шумная копия каждой
записи смешивается с одним из четырёх синтетических шумов при одном из
SNR уровня обучения. Если смесь клиппирует, обе копии записываются с одним
множителем peak_scale, поэтому разность файлов на диске - ровно шум при
заявленном SNR. Параметры смешивания сохраняются в mixing.csv.

Поток RNG каждой записи выводится из (seed, индекс записи), поэтому
результат не зависит от порядка генерации файлов.
"""

import csv
from collections.abc import Sequence
from itertools import product
from pathlib import Path

import numpy as np
import xxhash
from pydantic import BaseModel, Field
from scipy.signal.windows import tukey

from src.core.constants import (
    ALLOWED_SNRS_DB,
    CLASS_NAMES,
    FREQUENCY_JITTER,
    SAMPLE_RATE,
    TOKEN_MAX_SECONDS,
    TOKEN_MIN_SECONDS,
    TRAIN_SNRS_DB,
)
from src.core.enums import Mode, NoiseType
from src.engine import Rng
from src.services.audio.wav_io import save_wav
from src.services.corpus.manifest import Manifest, UtteranceRecord, write_manifest
from src.services.corpus.mixing import mix_at_snr
from src.services.corpus.noise import noise_stream
from src.shared.errors import InvalidArgumentError
from src.shared.logging import LogExecutionTime, get_logger

logger = get_logger()

MANIFEST_NAME = "manifest.csv"
MIXING_NAME = "mixing.csv"
MIXING_HEADER: tuple[str, ...] = ("path", "gain", "peak_scale", "noise_offset")

# Частоты партиалов (Гц) по классам в порядке CLASS_NAMES.
CLASS_PARTIALS: dict[str, tuple[float, float, float]] = {
    "zero": (320.0, 1250.0, 2600.0),
    "one": (450.0, 900.0, 2300.0),
    "two": (600.0, 1500.0, 2900.0),
    "three": (280.0, 1900.0, 2500.0),
    "four": (700.0, 1100.0, 3100.0),
    "five": (380.0, 1700.0, 3300.0),
    "six": (520.0, 2100.0, 2750.0),
    "seven": (250.0, 1400.0, 3450.0),
    "eight": (650.0, 1800.0, 2450.0),
    "nine": (420.0, 1050.0, 2950.0),
    "oh": (550.0, 2300.0, 3200.0),
}
PARTIAL_AMPLITUDES = np.array([1.0, 0.6, 0.35])
ENVELOPE_TAPER = 0.3
LEVEL_RANGE = (0.3, 0.6)

DEFAULT_NOISE_TYPES: tuple[NoiseType, ...] = (
    NoiseType.SUBWAY,
    NoiseType.BABBLE,
    NoiseType.CAR,
    NoiseType.EXHIBITION,
)


class SynthReport(BaseModel):
    """Итог генерации корпуса."""

    manifest_path: Path = Field(..., description="Путь к manifest.csv")
    clean_files: int = Field(..., ge=0, description="Число чистых файлов")
    noisy_files: int = Field(..., ge=0, description="Число зашумлённых файлов")
    mixing_path: Path = Field(..., description="Путь к mixing.csv (gain, peak_scale, смещение шума)")
    peak_scaled_files: int = Field(..., ge=0, description="Пар, масштабированных против клиппинга")
    digest: str = Field(..., description="xxh64 по содержимому всех файлов в порядке манифеста")


def digit_token(label: int, rng: Rng) -> np.ndarray:
    """Сгенерировать один токен класса label.

    Args:
        label: Номер класса 0..10
        rng: Поток записи

    Returns:
        Сигнал float64 длительностью 0.5-0.8 с с пиком в LEVEL_RANGE

    """
    base = np.array(CLASS_PARTIALS[CLASS_NAMES[label]])
    duration = float(rng.split("duration").uniform(TOKEN_MIN_SECONDS, TOKEN_MAX_SECONDS))
    length = int(duration * SAMPLE_RATE)
    frequencies = base * (1.0 + rng.split("jitter").uniform(-FREQUENCY_JITTER, FREQUENCY_JITTER, 3))
    phases = rng.split("phase").uniform(0.0, 2 * np.pi, 3)

    t = np.arange(length)[:, None] / SAMPLE_RATE
    partials = PARTIAL_AMPLITUDES * np.sin(2 * np.pi * frequencies * t + phases)
    token = partials.sum(axis=1) * tukey(length, ENVELOPE_TAPER)

    level = float(rng.split("level").uniform(*LEVEL_RANGE))
    return token * (level / float(np.max(np.abs(token))))


def _file_digest(paths: Sequence[Path]) -> str:
    digest = xxhash.xxh64()
    for path in paths:
        digest.update(path.read_bytes())
    return digest.hexdigest()


def _write_mixing(path: Path, rows: Sequence[list[str]]) -> Path:
    """mixing.csv: параметры смешивания каждой шумной записи."""
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(MIXING_HEADER)
        writer.writerows(rows)
    return path


def synth_corpus(
    out_dir: Path | str,
    num_per_class: int,
    seed: int,
    noise_types: Sequence[NoiseType] = DEFAULT_NOISE_TYPES,
    snrs_db: Sequence[int] = TRAIN_SNRS_DB,
    limit_per_mode: int | None = None,
) -> SynthReport:
    """Сгенерировать чистый и multi-condition корпус с манифестом.

    Запись r = i·11 + c (i - номер токена, c - класс). Шумная копия записи r
    использует комбинацию (шум, SNR) с индексом r по кругу.

    Args:
        out_dir: Директория корпуса (clean/, noisy/, manifest.csv, mixing.csv)
        num_per_class: Токенов на класс, ≥ 1
        seed: Seed корпуса
        noise_types: Сценарии шума для шумной копии
        snrs_db: Уровни SNR для шумной копии
        limit_per_mode: Обрезать число файлов каждого режима (в порядке записей)

    Returns:
        SynthReport

    Raises:
        InvalidArgumentError: num_per_class < 1, пустые noise_types/snrs_db,
            limit_per_mode < 1, SNR вне допустимого набора

    """
    if num_per_class < 1:
        raise InvalidArgumentError(f"num_per_class должен быть ≥ 1: {num_per_class}")
    if not noise_types or not snrs_db:
        raise InvalidArgumentError("Нужен хотя бы один тип шума и один уровень SNR")
    if unknown := sorted(set(snrs_db) - ALLOWED_SNRS_DB):
        raise InvalidArgumentError(f"Недопустимые уровни SNR: {unknown}")
    if limit_per_mode is not None and limit_per_mode < 1:
        raise InvalidArgumentError(f"limit_per_mode должен быть ≥ 1: {limit_per_mode}")

    out_dir = Path(out_dir)
    root = Rng(seed)
    kinds = [NoiseType(kind) for kind in noise_types]
    streams = {kind: noise_stream(kind, root.split("noise").split(kind.value)) for kind in kinds}
    conditions = list(product(kinds, snrs_db))

    total = num_per_class * len(CLASS_NAMES)
    if limit_per_mode is not None:
        total = min(total, limit_per_mode)

    clean: list[UtteranceRecord] = []
    noisy: list[UtteranceRecord] = []
    mixing_rows: list[list[str]] = []

    with LogExecutionTime("synth_corpus", files=2 * total, seed=seed):
        for r in range(total):
            i, label = divmod(r, len(CLASS_NAMES))
            name = CLASS_NAMES[label]
            record_rng = root.split("record").split(r)
            token = digit_token(label, record_rng.split("token"))

            noise_type, snr_db = conditions[r % len(conditions)]
            mix = mix_at_snr(token, streams[noise_type], snr_db, record_rng.split("mix"))

            clean_path = Path("clean") / f"{name}_{i:04d}.wav"
            save_wav(out_dir / clean_path, mix.signal_part)
            clean.append(UtteranceRecord(path=clean_path.as_posix(), label=label, mode=Mode.CLEAN))

            noisy_path = Path("noisy") / f"{name}_{i:04d}_{noise_type.value}_{snr_db:+d}dB.wav"
            save_wav(out_dir / noisy_path, mix.mixed)
            noisy.append(
                UtteranceRecord(
                    path=noisy_path.as_posix(),
                    label=label,
                    mode=Mode.NOISY,
                    noise_type=noise_type,
                    snr_db=snr_db,
                )
            )
            mixing_rows.append([noisy_path.as_posix(), repr(mix.gain), repr(mix.peak_scale), str(mix.noise_offset)])

        records = clean + noisy
        written = [out_dir / record.path for record in records]
        manifest_path = write_manifest(Manifest(records=records, root=out_dir), out_dir / MANIFEST_NAME)
        mixing_path = _write_mixing(out_dir / MIXING_NAME, mixing_rows)

    report = SynthReport(
        manifest_path=manifest_path,
        clean_files=len(clean),
        noisy_files=len(noisy),
        mixing_path=mixing_path,
        peak_scaled_files=sum(float(row[2]) != 1.0 for row in mixing_rows),
        digest=_file_digest([*written, manifest_path]),
    )
    logger.info(
        "Корпус сгенерирован",
        out_dir=str(out_dir),
        clean_files=report.clean_files,
        noisy_files=report.noisy_files,
        peak_scaled_files=report.peak_scaled_files,
        digest=report.digest,
    )
    return report
