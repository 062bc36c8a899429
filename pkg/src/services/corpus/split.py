"""Детерминированное стратифицированное разбиение train/test.

Страты - (label, mode, snr_db). Шумная копия и её чистый оригинал
(общий токен источника в имени файла) образуют группу и всегда попадают
в одну часть. Группы класса стратифицируются по набору страт своих
записей: размер тестовой части равен round(G_c · f) групп, внутри класса
он распределяется методом наибольшего остатка. Для корпуса из пар
(clean, noisy) отклонение каждой страты от N_s · f не больше 1.
"""

import math
import re
from collections import defaultdict
from pathlib import PurePosixPath

from src.core.constants import DEFAULT_TEST_FRACTION
from src.core.enums import Mode, Split
from src.engine import Rng
from src.services.corpus.manifest import DatasetManifest, Manifest, UtteranceRecord
from src.shared.errors import InsufficientDataError, InvalidArgumentError, ManifestFormatError
from src.shared.logging import get_logger

logger = get_logger()

Stratum = tuple[int, str, int | None]
Signature = tuple[Stratum, ...]


def _stratum_key(stratum: Stratum) -> str:
    label, mode, snr_db = stratum
    return f"{label}|{mode}|{'' if snr_db is None else snr_db}"


def _stratum_order(stratum: Stratum) -> tuple[int, str, int]:
    label, mode, snr_db = stratum
    return (label, mode, -1000 if snr_db is None else snr_db)


def _signature_key(signature: Signature) -> str:
    return "+".join(_stratum_key(stratum) for stratum in signature)


def source_token(record: UtteranceRecord) -> str:
    """Токен исходного высказывания записи.

    У шумной записи из имени отрезается суффикс `_<noise>_<snr>[dB]`,
    поэтому `noisy/zero_0003_car_+5dB.wav` и `clean/zero_0003.wav`
    получают один токен `0|zero_0003`.
    """
    stem = PurePosixPath(record.path).stem
    if record.mode == Mode.NOISY:
        match = re.fullmatch(rf"(?P<source>.+)_{re.escape(record.noise_type.value)}_[+-]?\d+(?:dB)?", stem)
        if match is not None:
            stem = match["source"]
    return f"{record.label}|{stem}"


def group_records(manifest: Manifest) -> list[list[int]]:
    """Индексы записей, сгруппированные по source_token, в порядке первого вхождения."""
    groups: dict[str, list[int]] = {}
    for index, record in enumerate(manifest.records):
        groups.setdefault(source_token(record), []).append(index)
    return list(groups.values())


def allocate(sizes: list[int], target: int, fraction: float) -> list[int]:
    """Распределить target тестовых единиц по стратам с размерами sizes.

    Каждая страта получает floor(n · fraction), остаток отдаётся стратам
    с наибольшей дробной частью (при равенстве - в порядке страт).
    """
    quotas = [size * fraction for size in sizes]
    allocation = [math.floor(quota) for quota in quotas]
    order = sorted(range(len(sizes)), key=lambda index: -(quotas[index] - allocation[index]))
    extra = target - sum(allocation)
    for index in order:
        if extra <= 0:
            break
        if allocation[index] < sizes[index]:
            allocation[index] += 1
            extra -= 1
    return allocation


def _split_class(
    label: int,
    groups: list[list[int]],
    manifest: Manifest,
    test_fraction: float,
    shuffle: Rng,
) -> list[int]:
    """Индексы тестовых записей одного класса."""
    by_signature: dict[Signature, list[list[int]]] = defaultdict(list)
    for group in groups:
        signature = tuple(sorted({manifest.records[index].stratum for index in group}, key=_stratum_order))
        by_signature[signature].append(group)

    signatures = sorted(by_signature, key=lambda signature: [_stratum_order(stratum) for stratum in signature])
    sizes = [len(by_signature[signature]) for signature in signatures]
    units = sum(sizes)
    target = min(max(math.floor(units * test_fraction + 0.5), 1), units - 1)

    tested: list[int] = []
    for signature, count in zip(signatures, allocate(sizes, target, test_fraction), strict=True):
        members = by_signature[signature]
        order = shuffle.split(_signature_key(signature)).permutation(len(members))
        for position in order[:count]:
            tested.extend(members[int(position)])
    logger.debug("Класс разбит", label=label, groups=units, test_groups=target)
    return tested


def split(manifest: Manifest, test_fraction: float = DEFAULT_TEST_FRACTION, seed: int = 0) -> DatasetManifest:
    """Стратифицированно разбить манифест на train/test.

    Args:
        manifest: Исходный манифест
        test_fraction: Доля тестовой части, 0 < f < 1
        seed: Seed перестановок внутри страт

    Returns:
        DatasetManifest с меткой части для каждой записи в исходном порядке

    Raises:
        InvalidArgumentError: test_fraction вне (0, 1)
        ManifestFormatError: Один путь встречается дважды
        InsufficientDataError: В классе меньше 2 записей

    Note:
        Класс, все записи которого принадлежат одной группе, делится
        по отдельным записям.

    """
    if not 0.0 < test_fraction < 1.0:
        raise InvalidArgumentError(f"test_fraction должен быть в (0, 1): {test_fraction}")
    manifest.require_nonempty()

    seen: dict[str, int] = {}
    for index, record in enumerate(manifest.records):
        if record.path in seen:
            raise ManifestFormatError(
                path=str(manifest.root),
                line=index + 2,
                reason=f"путь '{record.path}' уже встречался в строке {seen[record.path] + 2}",
            )
        seen[record.path] = index

    by_class: dict[int, list[list[int]]] = defaultdict(list)
    for group in group_records(manifest):
        by_class[manifest.records[group[0]].label].append(group)

    splits = [Split.TRAIN] * len(manifest.records)
    shuffle = Rng(seed).split("split")

    for label, groups in sorted(by_class.items()):
        class_size = sum(len(group) for group in groups)
        if class_size < 2:
            raise InsufficientDataError(
                f"В классе {label} меньше 2 записей",
                details={"label": label, "records": class_size},
            )
        if len(groups) < 2:
            logger.warning("Класс из одной группы делится по записям", label=label, records=class_size)
            groups = [[index] for group in groups for index in group]
        for index in _split_class(label, groups, manifest, test_fraction, shuffle):
            splits[index] = Split.TEST

    dataset = DatasetManifest(manifest=manifest, splits=splits)
    logger.info(
        "Манифест разбит",
        records=len(manifest.records),
        test_records=sum(tag == Split.TEST for tag in splits),
        groups=sum(len(groups) for groups in by_class.values()),
        seed=seed,
    )
    return dataset
