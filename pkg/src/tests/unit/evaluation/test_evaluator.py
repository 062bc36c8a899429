"""Тесты оценки модели.

Покрывает:
- точность, матрицу ошибок и WER = 100 − accuracy
- разбивку по условиям и её порядок
- evaluate на синтетическом корпусе (инварианты матрицы, детерминизм)
- ошибки: пустой манифест, метка вне модели
"""

import numpy as np
import pytest

from src.core.constants import BINARY_CLASS_NAMES, CLASS_NAMES
from src.core.enums import Mode, NoiseType
from src.engine import Rng
from src.models import init_params
from src.services.audio import FeatureExtractor
from src.services.corpus import Manifest, read_manifest
from src.services.evaluation import default_class_names, evaluate, evaluate_predictions, wer
from src.shared.errors import InvalidArgumentError
from src.tests.factories import make_tiny_spec

CLEAN = ("clean", "none", None)
SUBWAY_20 = ("noisy", "subway", 20)
SUBWAY_5 = ("noisy", "subway", 5)


@pytest.fixture
def report():
    return evaluate_predictions(
        labels=[0, 1, 1, 2],
        predictions=[0, 1, 2, 2],
        conditions=[CLEAN, SUBWAY_5, SUBWAY_20, CLEAN],
        class_names=["a", "b", "c"],
        run="demo",
    )


class TestEvaluatePredictions:
    """Тесты сборки отчёта из предсказаний."""

    def test_accuracy_and_wer(self, report):
        """3 из 4 верно: accuracy 75, WER 25."""
        assert report.count == 4
        assert report.correct == 3
        assert report.accuracy == pytest.approx(75.0)
        assert report.wer == pytest.approx(25.0)
        assert wer(report) == pytest.approx(100.0 - report.accuracy)

    def test_confusion(self, report):
        """Строки - истина, столбцы - предсказание."""
        assert report.confusion == [[1, 0, 0], [0, 1, 1], [0, 0, 1]]

    def test_conditions_order(self, report):
        """clean раньше noisy, внутри шума SNR по убыванию."""
        keys = [(row.mode, row.noise_type, row.snr_db) for row in report.conditions]
        assert keys == [
            (Mode.CLEAN, NoiseType.NONE, None),
            (Mode.NOISY, NoiseType.SUBWAY, 20),
            (Mode.NOISY, NoiseType.SUBWAY, 5),
        ]
        assert [row.accuracy for row in report.conditions] == [100.0, 0.0, 100.0]

    def test_mode_accuracy(self, report):
        """Точность по режимам."""
        assert report.mode_accuracy(Mode.CLEAN) == pytest.approx(100.0)
        assert report.mode_accuracy(Mode.NOISY) == pytest.approx(50.0)

    def test_mode_accuracy_absent(self):
        """Режима нет в отчёте - None."""
        only_clean = evaluate_predictions([0], [0], [CLEAN], ["a", "b"])
        assert only_clean.mode_accuracy(Mode.NOISY) is None

    def test_unpredicted_class_column(self):
        """Класс без примеров и предсказаний даёт нулевые строку и столбец."""
        result = evaluate_predictions([0, 0], [0, 0], [CLEAN, CLEAN], ["a", "b", "c"])
        assert result.confusion == [[2, 0, 0], [0, 0, 0], [0, 0, 0]]

    def test_condition_weighted_accuracy(self, report):
        """Взвешенная по числу примеров точность условий равна общей."""
        weighted = sum(row.accuracy * row.count for row in report.conditions) / report.count
        assert abs(weighted - report.accuracy) < 1e-9

    def test_marginals(self, report):
        """Суммы столбцов - гистограмма предсказаний."""
        columns = np.array(report.confusion).sum(axis=0)
        np.testing.assert_array_equal(columns, np.bincount([0, 1, 2, 2], minlength=3))

    def test_length_mismatch(self):
        """Разные длины меток и предсказаний."""
        with pytest.raises(InvalidArgumentError):
            evaluate_predictions([0, 1], [0], [CLEAN, CLEAN], ["a", "b"])

    def test_json_roundtrip(self, report):
        """Отчёт сериализуется и восстанавливается без потерь."""
        assert type(report).model_validate_json(report.model_dump_json()) == report


class TestClassNames:
    """Тесты имён классов по умолчанию."""

    def test_defaults(self):
        assert default_class_names(11) == list(CLASS_NAMES)
        assert default_class_names(2) == list(BINARY_CLASS_NAMES)
        assert default_class_names(3) == ["0", "1", "2"]


class TestEvaluate:
    """Тесты оценки модели на корпусе."""

    @pytest.fixture
    def model(self):
        spec = make_tiny_spec(num_classes=11, input_shape=(1, 40, 64))
        return spec, init_params(spec, Rng(3).split("init"))

    def test_matrix_invariants(self, model, corpus_manifest):
        """Сумма матрицы = count, строка i = число примеров класса i."""
        spec, params = model
        manifest = read_manifest(corpus_manifest)
        result = evaluate(spec, params, manifest, FeatureExtractor(), batch_size=16, run="tiny")

        matrix = np.array(result.confusion)
        assert matrix.sum() == result.count == len(manifest)
        np.testing.assert_array_equal(matrix.sum(axis=1), list(manifest.histogram().values()))
        assert result.class_names == list(CLASS_NAMES)
        assert sum(row.count for row in result.conditions) == result.count
        assert result.run == "tiny"

    def test_deterministic(self, model, corpus_manifest):
        """Повторная оценка даёт тот же отчёт."""
        spec, params = model
        manifest = read_manifest(corpus_manifest)
        first = evaluate(spec, params, manifest, FeatureExtractor(), batch_size=7)
        second = evaluate(spec, params, manifest, FeatureExtractor(), batch_size=7)
        assert first == second

    def test_empty_manifest(self, model):
        """Пустой манифест."""
        spec, params = model
        with pytest.raises(InvalidArgumentError) as exc_info:
            evaluate(spec, params, Manifest(records=[]), FeatureExtractor())
        assert exc_info.value.exit_code == 2

    def test_label_outside_model(self, corpus_manifest):
        """Метки корпуса не помещаются в бинарную голову."""
        spec = make_tiny_spec(num_classes=2, input_shape=(1, 40, 64))
        params = init_params(spec, Rng(0).split("init"))
        with pytest.raises(InvalidArgumentError):
            evaluate(spec, params, read_manifest(corpus_manifest), FeatureExtractor())
