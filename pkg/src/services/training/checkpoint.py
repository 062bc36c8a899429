"""Бинарный формат чекпоинта RNCK.

Раскладка (little-endian):

    b"RNCK" | u32 version=1 | u32 tensor_count
    tensor_count × (u32 name_len | name UTF-8 | u8 dtype=0 | u8 rank | rank × u32 extent | float32 payload)
    u32 metadata_count
    metadata_count × (u32 key_len | key UTF-8 | u32 value_len | value UTF-8)

Метаданные записываются в порядке сортировки ключей, тензоры в порядке
добавления, поэтому save → load → save даёт побайтно одинаковые файлы.
"""

import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import orjson
import xxhash

from src.core.constants import (
    CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
    DTYPE_FLOAT32,
    FEATURE_MEAN_KEY,
    FEATURE_STD_KEY,
)
from src.engine import Tensor
from src.models import ModelSpec, ParamStore
from src.services.audio import FeatureStats
from src.shared.errors import (
    CheckpointFormatError,
    DigestMismatchError,
    MissingArtifactError,
    TruncatedCheckpointError,
)
from src.shared.logging import get_logger

logger = get_logger()

U32 = struct.Struct("<I")
U8 = struct.Struct("<B")

META_SPEC = "model_spec"
META_SPEC_DIGEST = "spec_digest"
META_PAYLOAD_DIGEST = "payload_digest"
META_EPOCH = "epoch"
META_SEED = "seed"
META_CONFIG = "config"


@dataclass
class Checkpoint:
    """Именованные тензоры и метаданные запуска.

    Attributes:
        tensors: Имя → float32 массив (параметры, running статистики, features.*)
        metadata: Строковые пары ключ/значение
        version: Версия формата

    """

    tensors: dict[str, np.ndarray] = field(default_factory=dict)
    metadata: dict[str, str] = field(default_factory=dict)
    version: int = CHECKPOINT_VERSION

    @classmethod
    def from_run(
        cls,
        spec: ModelSpec,
        params: ParamStore,
        stats: FeatureStats | None = None,
        epoch: int = 0,
        seed: int = 0,
        config: dict | None = None,
    ) -> "Checkpoint":
        """Собрать чекпоинт из состояния обучения."""
        tensors = {name: np.ascontiguousarray(data, dtype=np.float32) for name, data in params.state().items()}
        if stats is not None:
            tensors[FEATURE_MEAN_KEY] = np.asarray(stats.mean, dtype=np.float32)
            tensors[FEATURE_STD_KEY] = np.asarray(stats.std, dtype=np.float32)
        metadata = {
            META_SPEC: spec.canonical_json().decode("utf-8"),
            META_SPEC_DIGEST: spec.digest(),
            META_EPOCH: str(epoch),
            META_SEED: str(seed),
        }
        if config is not None:
            metadata[META_CONFIG] = orjson.dumps(config, option=orjson.OPT_SORT_KEYS).decode("utf-8")
        return cls(tensors=tensors, metadata=metadata)

    @property
    def spec(self) -> ModelSpec:
        if META_SPEC not in self.metadata:
            raise CheckpointFormatError(reason="нет спецификации модели в метаданных")
        return ModelSpec.from_json(self.metadata[META_SPEC])

    @property
    def spec_digest(self) -> str | None:
        return self.metadata.get(META_SPEC_DIGEST)

    @property
    def epoch(self) -> int:
        return int(self.metadata.get(META_EPOCH, "0"))

    @property
    def seed(self) -> int:
        return int(self.metadata.get(META_SEED, "0"))

    @property
    def config(self) -> dict:
        return orjson.loads(self.metadata[META_CONFIG]) if META_CONFIG in self.metadata else {}

    @property
    def feature_stats(self) -> FeatureStats | None:
        if FEATURE_MEAN_KEY not in self.tensors or FEATURE_STD_KEY not in self.tensors:
            return None
        return FeatureStats(
            mean=self.tensors[FEATURE_MEAN_KEY].copy(),
            std=self.tensors[FEATURE_STD_KEY].copy(),
        )

    def params(self, spec: ModelSpec | None = None) -> ParamStore:
        """ParamStore по спецификации (тензоры features.* не входят).

        Raises:
            CheckpointFormatError: Тензор спецификации отсутствует или другой формы

        """
        spec = spec or self.spec
        store = ParamStore()
        for shape in spec.param_shapes():
            data = self.tensors.get(shape.name)
            if data is None or tuple(data.shape) != tuple(shape.shape):
                raise CheckpointFormatError(
                    reason=f"тензор '{shape.name}' отсутствует или имеет другую форму",
                    details={"expected": list(shape.shape), "actual": None if data is None else list(data.shape)},
                )
            store.add(shape.name, Tensor(data.copy(), requires_grad=not shape.buffer), buffer=shape.buffer)
        return store


def _encode_str(value: str) -> bytes:
    raw = value.encode("utf-8")
    return U32.pack(len(raw)) + raw


def encode_tensors(tensors: dict[str, np.ndarray]) -> bytes:
    """Секция тензоров (без заголовка)."""
    parts = [U32.pack(len(tensors))]
    for name, data in tensors.items():
        array = np.ascontiguousarray(data, dtype="<f4")
        parts.append(_encode_str(name))
        parts.append(U8.pack(DTYPE_FLOAT32) + U8.pack(array.ndim))
        parts.extend(U32.pack(extent) for extent in array.shape)
        parts.append(array.tobytes(order="C"))
    return b"".join(parts)


def encode_checkpoint(ckpt: Checkpoint) -> bytes:
    """Сериализовать чекпоинт; payload_digest пересчитывается по секции тензоров."""
    tensor_section = encode_tensors(ckpt.tensors)
    metadata = {**ckpt.metadata, META_PAYLOAD_DIGEST: xxhash.xxh64_hexdigest(tensor_section)}
    parts = [CHECKPOINT_MAGIC, U32.pack(ckpt.version), tensor_section, U32.pack(len(metadata))]
    for key in sorted(metadata):
        parts.append(_encode_str(key))
        parts.append(_encode_str(metadata[key]))
    return b"".join(parts)


def save_checkpoint(ckpt: Checkpoint, path: Path | str) -> Path:
    """Атомарно записать чекпоинт (временный файл + rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = encode_checkpoint(ckpt)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)
    logger.debug("Чекпоинт сохранён", path=str(path), tensors=len(ckpt.tensors), size_bytes=len(payload))
    return path


class _Reader:
    """Последовательное чтение буфера с контролем длины."""

    def __init__(self, payload: bytes, path: str) -> None:
        self.payload = payload
        self.offset = 0
        self.path = path

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.payload):
            raise TruncatedCheckpointError(path=self.path, reason="truncated payload")
        chunk = self.payload[self.offset : end]
        self.offset = end
        return chunk

    def u32(self) -> int:
        return U32.unpack(self.take(4))[0]

    def u8(self) -> int:
        return U8.unpack(self.take(1))[0]

    def text(self) -> str:
        raw = self.take(self.u32())
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointFormatError(path=self.path, reason="invalid UTF-8") from e


def decode_checkpoint(payload: bytes, path: str = "<memory>") -> Checkpoint:
    """Разобрать байты чекпоинта с проверкой magic, версии и дайджестов.

    Raises:
        CheckpointFormatError: Неверный magic/версия/dtype, лишние байты
        TruncatedCheckpointError: Файл обрезан
        DigestMismatchError: Дайджест тензоров или спецификации не совпадает

    """
    if len(payload) < len(CHECKPOINT_MAGIC) + U32.size or not payload.startswith(CHECKPOINT_MAGIC):
        raise CheckpointFormatError(path=path, reason="corrupt header")
    reader = _Reader(payload, path)
    reader.take(len(CHECKPOINT_MAGIC))
    version = reader.u32()
    if version != CHECKPOINT_VERSION:
        raise CheckpointFormatError(path=path, reason="corrupt header", details={"version": version})

    tensor_start = reader.offset
    tensors: dict[str, np.ndarray] = {}
    for _ in range(reader.u32()):
        name = reader.text()
        dtype_code = reader.u8()
        if dtype_code != DTYPE_FLOAT32:
            raise CheckpointFormatError(path=path, reason=f"unsupported dtype code {dtype_code}")
        shape = tuple(reader.u32() for _ in range(reader.u8()))
        count = int(np.prod(shape, dtype=np.int64))
        data = np.frombuffer(reader.take(4 * count), dtype="<f4").reshape(shape)
        if name in tensors:
            raise CheckpointFormatError(path=path, reason=f"duplicate tensor '{name}'")
        tensors[name] = data.astype(np.float32)
    tensor_section = payload[tensor_start : reader.offset]

    metadata: dict[str, str] = {}
    for _ in range(reader.u32()):
        key = reader.text()
        metadata[key] = reader.text()
    if reader.offset != len(payload):
        raise CheckpointFormatError(path=path, reason="trailing bytes")

    actual_payload = xxhash.xxh64_hexdigest(tensor_section)
    expected_payload = metadata.pop(META_PAYLOAD_DIGEST, None)
    if expected_payload is not None and expected_payload != actual_payload:
        raise DigestMismatchError(expected=expected_payload, actual=actual_payload, kind="payload")

    ckpt = Checkpoint(tensors=tensors, metadata=metadata, version=version)
    if META_SPEC in metadata and META_SPEC_DIGEST in metadata:
        actual_spec = ckpt.spec.digest()
        if actual_spec != metadata[META_SPEC_DIGEST]:
            raise DigestMismatchError(expected=metadata[META_SPEC_DIGEST], actual=actual_spec, kind="spec")
    return ckpt


def load_checkpoint(path: Path | str, expected_spec_digest: str | None = None) -> Checkpoint:
    """Прочитать чекпоинт.

    Args:
        path: Путь к .rnck файлу
        expected_spec_digest: Дайджест спецификации, с которой должен совпасть чекпоинт

    Returns:
        Checkpoint

    Raises:
        MissingArtifactError: Файла нет
        CheckpointFormatError: Повреждённый заголовок
        TruncatedCheckpointError: Обрезанный файл
        DigestMismatchError: Несовпадение дайджеста

    """
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(path=str(path))
    ckpt = decode_checkpoint(path.read_bytes(), str(path))
    if expected_spec_digest is not None and ckpt.spec_digest != expected_spec_digest:
        raise DigestMismatchError(expected=expected_spec_digest, actual=ckpt.spec_digest, kind="spec")
    logger.debug("Чекпоинт загружен", path=str(path), tensors=len(ckpt.tensors), epoch=ckpt.epoch)
    return ckpt


def require_matching_spec(ckpt: Checkpoint, spec: ModelSpec) -> None:
    """Проверить, что чекпоинт построен для той же архитектуры.

    Raises:
        DigestMismatchError: Дайджест спецификации чекпоинта отличается

    """
    expected = spec.digest()
    if ckpt.spec_digest != expected:
        raise DigestMismatchError(expected=expected, actual=ckpt.spec_digest, kind="spec")
