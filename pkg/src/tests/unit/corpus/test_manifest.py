"""Тесты манифеста корпуса.

Покрывает:
- инварианты UtteranceRecord (clean ⇔ без шума и SNR)
- чтение/запись CSV с пересчётом относительных путей
- ошибки формата с номером строки
- фильтрацию, гистограмму и binary перемаркировку
"""

import pytest
from pydantic import ValidationError

from src.core.enums import Mode, NoiseType, Split
from src.services.corpus import (
    DatasetManifest,
    Manifest,
    UtteranceRecord,
    read_manifest,
    relabel_for_binary,
    write_manifest,
)
from src.shared.errors import InsufficientDataError, ManifestFormatError, MissingArtifactError
from src.tests.factories import make_manifest

HEADER = "path,label,mode,noise_type,snr_db\n"


def _write(path, body: str) -> None:
    path.write_text(HEADER + body, encoding="utf-8")


class TestUtteranceRecord:
    """Тесты записи высказывания."""

    def test_clean_record(self):
        """Чистая запись без шума и SNR."""
        record = UtteranceRecord(path="a.wav", label=3, mode=Mode.CLEAN)
        assert record.condition == ("clean", "none", None)
        assert record.to_row() == ["a.wav", "3", "clean", "none", ""]

    def test_noisy_record(self):
        """Зашумлённая запись с типом шума и SNR."""
        record = UtteranceRecord(path="b.wav", label=10, mode=Mode.NOISY, noise_type=NoiseType.CAR, snr_db=-5)
        assert record.stratum == (10, "noisy", -5)

    @pytest.mark.parametrize(
        "fields",
        [
            {"mode": "clean", "noise_type": "car"},
            {"mode": "clean", "snr_db": 10},
            {"mode": "noisy", "noise_type": "car"},
            {"mode": "noisy", "snr_db": 10},
            {"mode": "noisy", "noise_type": "car", "snr_db": 7},
            {"mode": "clean", "label": 11},
        ],
    )
    def test_invalid_records(self, fields):
        """Нарушение инварианта условия или диапазонов."""
        with pytest.raises(ValidationError):
            UtteranceRecord(**{"path": "x.wav", "label": 0, **fields})


class TestReadWrite:
    """Тесты CSV ввода/вывода."""

    def test_roundtrip(self, tmp_path):
        """Записанный манифест читается в те же записи."""
        manifest = make_manifest({0: 2, 7: 1}, noisy=((NoiseType.BABBLE, 15),))
        manifest = manifest.model_copy(update={"root": tmp_path})
        path = write_manifest(manifest, tmp_path / "manifest.csv")
        restored = read_manifest(path)
        assert restored.records == manifest.records
        assert restored.root == tmp_path

    def test_paths_relative_to_new_location(self, tmp_path):
        """При записи в поддиректорию пути пересчитываются."""
        manifest = Manifest(records=[UtteranceRecord(path="clean/a.wav", label=0, mode=Mode.CLEAN)], root=tmp_path)
        path = write_manifest(manifest, tmp_path / "runs" / "r1" / "train.csv")
        assert path.read_text(encoding="utf-8").splitlines()[1].startswith("../../clean/a.wav,")
        assert read_manifest(path).paths()[0].resolve() == (tmp_path / "clean" / "a.wav").resolve()

    def test_blank_snr_is_clean(self, tmp_path):
        """Пустой snr_db у чистой записи."""
        path = tmp_path / "m.csv"
        _write(path, "a.wav,1,clean,none,\nb.wav,1,noisy,subway,-5\n")
        manifest = read_manifest(path)
        assert [record.snr_db for record in manifest.records] == [None, -5]

    def test_missing_file(self, tmp_path):
        """Нет файла манифеста."""
        with pytest.raises(MissingArtifactError):
            read_manifest(tmp_path / "nope.csv")


class TestReadErrors:
    """Тесты ошибок формата с номером строки."""

    def test_bad_header(self, tmp_path):
        """Неверный заголовок - строка 1."""
        path = tmp_path / "m.csv"
        path.write_text("file,label\n", encoding="utf-8")
        with pytest.raises(ManifestFormatError) as exc_info:
            read_manifest(path)
        assert exc_info.value.details["line"] == 1

    def test_bad_label_line_number(self, tmp_path):
        """Метка вне диапазона во второй записи - строка 3."""
        path = tmp_path / "m.csv"
        _write(path, "a.wav,1,clean,none,\nb.wav,12,clean,none,\n")
        with pytest.raises(ManifestFormatError) as exc_info:
            read_manifest(path)
        assert exc_info.value.details["line"] == 3
        assert exc_info.value.exit_code == 3

    def test_wrong_field_count(self, tmp_path):
        """Строка из четырёх полей."""
        path = tmp_path / "m.csv"
        _write(path, "a.wav,1,clean,none\n")
        with pytest.raises(ManifestFormatError) as exc_info:
            read_manifest(path)
        assert exc_info.value.details["line"] == 2

    def test_inconsistent_condition(self, tmp_path):
        """Чистая запись с SNR."""
        path = tmp_path / "m.csv"
        _write(path, "a.wav,1,clean,none,10\n")
        with pytest.raises(ManifestFormatError):
            read_manifest(path)

    def test_label_outside_task(self, tmp_path):
        """Метка ≥ num_classes задачи."""
        path = tmp_path / "m.csv"
        _write(path, "a.wav,5,clean,none,\n")
        with pytest.raises(ManifestFormatError):
            read_manifest(path, num_classes=2)


class TestManifestViews:
    """Тесты фильтрации и перемаркировки."""

    def test_filter_by_mode(self):
        """filter оставляет записи одного режима в исходном порядке."""
        manifest = make_manifest({0: 2, 1: 2}, noisy=((NoiseType.CAR, 5),))
        clean = manifest.filter(Mode.CLEAN)
        assert len(clean) == 4
        assert all(record.mode == Mode.CLEAN for record in clean.records)
        assert len(manifest.filter()) == 8

    def test_histogram_includes_empty_classes(self):
        """Гистограмма по всем классам."""
        histogram = make_manifest({2: 3}).histogram()
        assert len(histogram) == 11
        assert histogram[2] == 3
        assert histogram[0] == 0

    def test_relabel_for_binary(self):
        """clean → 0, noisy → 1, два класса."""
        binary = relabel_for_binary(make_manifest({4: 1}, noisy=((NoiseType.SUBWAY, 20),)))
        assert binary.labels() == [0, 1]
        assert binary.num_classes == 2

    def test_require_nonempty(self):
        """Пустой манифест."""
        with pytest.raises(InsufficientDataError):
            Manifest().require_nonempty()

    def test_dataset_manifest_lengths(self):
        """Число меток частей равно числу записей."""
        with pytest.raises(ValidationError):
            DatasetManifest(manifest=make_manifest({0: 2}), splits=[Split.TRAIN])
