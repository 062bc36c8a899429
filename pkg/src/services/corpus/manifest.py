"""Манифест корпуса: записи высказываний и CSV ввод/вывод.

Формат: UTF-8 CSV с заголовком ровно `path,label,mode,noise_type,snr_db`,
пустой snr_db для чистых записей. Относительные пути отсчитываются
от директории манифеста.
"""

import csv
import os
from collections import Counter
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.core.constants import ALLOWED_SNRS_DB, MANIFEST_HEADER, NUM_CLASSES
from src.core.enums import Mode, NoiseType, Split
from src.shared.errors import InsufficientDataError, ManifestFormatError, MissingArtifactError

ConditionKey = tuple[str, str, int | None]


class UtteranceRecord(BaseModel):
    """Одно размеченное высказывание.

    Инвариант: mode clean ⇔ noise_type none ⇔ snr_db отсутствует.
    """

    model_config = ConfigDict(frozen=True)

    path: str = Field(..., min_length=1, description="Путь к WAV (относительно манифеста или абсолютный)")
    label: int = Field(..., ge=0, lt=NUM_CLASSES, description="Класс 0..10 (0 = zero, 10 = oh)")
    mode: Mode
    noise_type: NoiseType = NoiseType.NONE
    snr_db: int | None = Field(default=None, description="SNR в дБ из {20, 15, 10, 5, -5}")

    @model_validator(mode="after")
    def _check_condition(self) -> "UtteranceRecord":
        clean = self.mode == Mode.CLEAN
        if clean != (self.noise_type == NoiseType.NONE) or clean != (self.snr_db is None):
            raise ValueError("clean запись не имеет шума и SNR, noisy запись имеет оба")
        if self.snr_db is not None and self.snr_db not in ALLOWED_SNRS_DB:
            raise ValueError(f"snr_db {self.snr_db} не входит в {sorted(ALLOWED_SNRS_DB, reverse=True)}")
        return self

    @property
    def condition(self) -> ConditionKey:
        """Ключ условия (mode, noise_type, snr_db) для отчётов."""
        return (self.mode.value, self.noise_type.value, self.snr_db)

    @property
    def stratum(self) -> tuple[int, str, int | None]:
        """Ключ стратификации (label, mode, snr_db)."""
        return (self.label, self.mode.value, self.snr_db)

    def to_row(self) -> list[str]:
        return [
            self.path,
            str(self.label),
            self.mode.value,
            self.noise_type.value,
            "" if self.snr_db is None else str(self.snr_db),
        ]


class Manifest(BaseModel):
    """Упорядоченный набор записей с корнем для относительных путей."""

    model_config = ConfigDict(frozen=True)

    records: list[UtteranceRecord] = Field(default_factory=list)
    root: Path = Field(default=Path("."), description="Директория, от которой отсчитываются пути")
    num_classes: int = Field(default=NUM_CLASSES, ge=2)

    def __len__(self) -> int:
        return len(self.records)

    def resolve(self, record: UtteranceRecord) -> Path:
        path = Path(record.path)
        return path if path.is_absolute() else self.root / path

    def paths(self) -> list[Path]:
        return [self.resolve(record) for record in self.records]

    def labels(self) -> list[int]:
        return [record.label for record in self.records]

    def histogram(self) -> dict[int, int]:
        """Число записей каждого класса (все классы, включая пустые)."""
        counts = Counter(self.labels())
        return {label: counts.get(label, 0) for label in range(self.num_classes)}

    def filter(self, mode: Mode | None = None) -> "Manifest":
        """Подмножество записей заданного режима."""
        records = [record for record in self.records if mode is None or record.mode == mode]
        return self.model_copy(update={"records": records})

    def subset(self, indices: Sequence[int]) -> "Manifest":
        return self.model_copy(update={"records": [self.records[index] for index in indices]})

    def require_nonempty(self, what: str = "manifest") -> "Manifest":
        if not self.records:
            raise InsufficientDataError(f"{what}: нет записей", details={"root": str(self.root)})
        return self


class DatasetManifest(BaseModel):
    """Манифест с меткой части (train/test) для каждой записи.

    Инварианты: len(splits) == len(records); путь не попадает в обе части.
    """

    model_config = ConfigDict(frozen=True)

    manifest: Manifest
    splits: list[Split]

    @model_validator(mode="after")
    def _check_lengths(self) -> "DatasetManifest":
        if len(self.splits) != len(self.manifest.records):
            raise ValueError("Число меток частей не совпадает с числом записей")
        return self

    def part(self, split: Split) -> Manifest:
        indices = [index for index, tag in enumerate(self.splits) if tag == split]
        return self.manifest.subset(indices)

    @property
    def train(self) -> Manifest:
        return self.part(Split.TRAIN)

    @property
    def test(self) -> Manifest:
        return self.part(Split.TEST)

    def test_fraction(self) -> float:
        if not self.splits:
            return 0.0
        return sum(tag == Split.TEST for tag in self.splits) / len(self.splits)


def read_manifest(path: Path | str, num_classes: int = NUM_CLASSES) -> Manifest:
    """Прочитать CSV манифест.

    Args:
        path: Путь к CSV
        num_classes: Число классов задачи

    Returns:
        Manifest с root = директория файла

    Raises:
        MissingArtifactError: Файл не существует
        ManifestFormatError: Неверный заголовок или строка (с номером строки)

    """
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(path=str(path))

    records: list[UtteranceRecord] = []
    with path.open(encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != MANIFEST_HEADER:
            raise ManifestFormatError(
                path=str(path),
                line=1,
                reason=f"заголовок должен быть '{','.join(MANIFEST_HEADER)}'",
            )
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(MANIFEST_HEADER):
                raise ManifestFormatError(path=str(path), line=line, reason=f"ожидалось 5 полей, получено {len(row)}")
            values = dict(zip(MANIFEST_HEADER, row, strict=True))
            if values["snr_db"] == "":
                values.pop("snr_db")
            try:
                record = UtteranceRecord.model_validate(values)
            except ValidationError as e:
                first = e.errors()[0]
                field = ".".join(str(part) for part in first["loc"]) or "record"
                raise ManifestFormatError(path=str(path), line=line, reason=f"{field}: {first['msg']}") from e
            if record.label >= num_classes:
                raise ManifestFormatError(path=str(path), line=line, reason=f"label {record.label} ≥ {num_classes}")
            records.append(record)

    return Manifest(records=records, root=path.parent, num_classes=num_classes)


def write_manifest(manifest: Manifest, path: Path | str) -> Path:
    """Записать CSV манифест.

    Относительные пути пересчитываются относительно директории нового файла,
    разделитель путей - "/".

    Returns:
        Путь к записанному файлу

    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for record in manifest.records:
            row = record.to_row()
            source = Path(record.path)
            if not source.is_absolute():
                row[0] = Path(os.path.relpath(manifest.root / source, path.parent)).as_posix()
            writer.writerow(row)
    return path


def relabel_for_binary(manifest: Manifest) -> Manifest:
    """Заменить метку класса на режим: clean → 0, noisy → 1 (2 класса)."""
    records = [
        record.model_copy(update={"label": 0 if record.mode == Mode.CLEAN else 1}) for record in manifest.records
    ]
    return Manifest(records=records, root=manifest.root, num_classes=2)
