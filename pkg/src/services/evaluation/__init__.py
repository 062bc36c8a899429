"""Оценка моделей и отчёты."""

from src.services.evaluation.evaluator import (
    ConditionRow,
    EvalReport,
    default_class_names,
    evaluate,
    evaluate_predictions,
    wer,
)
from src.services.evaluation.reports import (
    ComparisonRow,
    compare,
    emit_report,
    load_report,
    render_confusion_svg,
    render_wer_svg,
)

__all__ = [
    "ComparisonRow",
    "ConditionRow",
    "EvalReport",
    "compare",
    "default_class_names",
    "emit_report",
    "evaluate",
    "evaluate_predictions",
    "load_report",
    "render_confusion_svg",
    "render_wer_svg",
    "wer",
]
