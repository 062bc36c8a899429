"""Файлы отчёта: CSV таблицы, SVG графики (jinja2 шаблоны) и report.json.

Все числа форматируются до рендеринга, поэтому один и тот же отчёт
всегда даёт побайтно одинаковые файлы.
"""

import csv
import math
from collections.abc import Sequence
from pathlib import Path

import orjson
from jinja2 import Environment, FileSystemLoader, StrictUndefined
from pydantic import BaseModel, Field

from src.core.constants import COMPARISON_HEADER, METRICS_HEADER, REPORT_JSON
from src.core.enums import Mode
from src.services.evaluation.evaluator import EvalReport
from src.shared.errors import MissingArtifactError, ReportWriteError
from src.shared.logging import get_logger

logger = get_logger()

TEMPLATES_DIR = Path(__file__).parent / "templates"

METRICS_CSV = "metrics.csv"
CONFUSION_CSV = "confusion.csv"
CONFUSION_SVG = "confusion.svg"
WER_SVG = "wer.svg"
COMPARISON_CSV = "comparison.csv"

CELL_SIZE = 36
BAR_WIDTH = 18
SERIES_COLORS = {"clean": "#4c72b0", "noisy": "#dd8452", "overall": "#55a868"}

_env = Environment(
    loader=FileSystemLoader(TEMPLATES_DIR),
    undefined=StrictUndefined,
    autoescape=True,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)


class ComparisonRow(BaseModel):
    """Строка сводной таблицы запусков."""

    run: str
    count: int = Field(..., ge=0)
    accuracy: float
    wer: float
    clean_accuracy: float | None = None
    noisy_accuracy: float | None = None

    @classmethod
    def from_report(cls, run: str, report: EvalReport) -> "ComparisonRow":
        return cls(
            run=run,
            count=report.count,
            accuracy=report.accuracy,
            wer=report.wer,
            clean_accuracy=report.mode_accuracy(Mode.CLEAN),
            noisy_accuracy=report.mode_accuracy(Mode.NOISY),
        )

    def series(self) -> dict[str, float | None]:
        """WER по сериям графика."""
        return {
            "clean": None if self.clean_accuracy is None else 100.0 - self.clean_accuracy,
            "noisy": None if self.noisy_accuracy is None else 100.0 - self.noisy_accuracy,
            "overall": self.wer,
        }


def _pct(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _heat(fraction: float) -> str:
    """Цвет ячейки: белый (0) → тёмно-синий (1)."""
    red = round(255 - fraction * (255 - 8))
    green = round(255 - fraction * (255 - 48))
    blue = round(255 - fraction * (255 - 107))
    return f"#{red:02x}{green:02x}{blue:02x}"


def render_confusion_svg(report: EvalReport, title: str | None = None) -> str:
    """Тепловая карта матрицы ошибок, насыщенность - доля строки."""
    size = report.num_classes
    origin_x, origin_y = 80, 60
    grid = size * CELL_SIZE
    labels = [
        {
            "name": name,
            "x": origin_x + index * CELL_SIZE + CELL_SIZE // 2,
            "y": origin_y + index * CELL_SIZE + CELL_SIZE // 2,
        }
        for index, name in enumerate(report.class_names)
    ]
    cells = []
    for row_index, row in enumerate(report.confusion):
        total = sum(row)
        for col_index, count in enumerate(row):
            fraction = count / total if total else 0.0
            cells.append(
                {
                    "x": origin_x + col_index * CELL_SIZE,
                    "y": origin_y + row_index * CELL_SIZE,
                    "count": count,
                    "fill": _heat(fraction),
                    "ink": "#ffffff" if fraction > 0.5 else "#000000",
                }
            )
    return _env.get_template("confusion.svg.j2").render(
        title=title or f"Confusion matrix {report.run}".strip(),
        width=origin_x + grid + 20,
        height=origin_y + grid + 30,
        origin_x=origin_x,
        origin_y=origin_y,
        grid=grid,
        cell_size=CELL_SIZE,
        labels=labels,
        cells=cells,
    )


def render_wer_svg(rows: Sequence[ComparisonRow], title: str = "WER (%)") -> str:
    """Сгруппированные столбцы WER: одна группа на запуск, серии clean/noisy/overall."""
    origin_x, top, plot_height = 50, 40, 200
    baseline = top + plot_height
    group_width = len(SERIES_COLORS) * BAR_WIDTH + 30
    values = [value for row in rows for value in row.series().values() if value is not None]
    axis_max = max(10, math.ceil(max(values, default=0.0) / 10.0) * 10)

    groups = []
    for group_index, row in enumerate(rows):
        left = origin_x + 15 + group_index * group_width
        bars = []
        for series_index, (series, value) in enumerate(row.series().items()):
            if value is None:
                continue
            height = round(plot_height * value / axis_max, 2)
            bars.append(
                {
                    "series": series,
                    "x": left + series_index * BAR_WIDTH,
                    "y": round(baseline - height, 2),
                    "height": height,
                    "fill": SERIES_COLORS[series],
                    "label": f"{value:.2f}",
                }
            )
        groups.append({"name": row.run, "center": left + (len(SERIES_COLORS) * BAR_WIDTH) // 2, "bars": bars})

    ticks = [
        {"y": round(baseline - plot_height * step / 5, 2), "label": f"{axis_max * step / 5:g}"} for step in range(6)
    ]
    width = origin_x + 15 + max(len(rows), 1) * group_width + 20
    legend = [
        {"series": series, "fill": fill, "x": origin_x + index * 80}
        for index, (series, fill) in enumerate(SERIES_COLORS.items())
    ]
    return _env.get_template("wer.svg.j2").render(
        title=title,
        width=max(width, origin_x + 80 * len(SERIES_COLORS)),
        height=baseline + 50,
        origin_x=origin_x,
        top=top,
        baseline=baseline,
        bar_width=BAR_WIDTH,
        ticks=ticks,
        groups=groups,
        legend=legend,
    )


def emit_report(report: EvalReport, out_dir: Path | str) -> list[Path]:
    """Записать metrics.csv, confusion.csv, confusion.svg, wer.svg и report.json.

    Raises:
        ReportWriteError: Директория недоступна для записи

    """
    out_dir = Path(out_dir)
    metrics_rows = [
        [
            row.mode.value,
            row.noise_type.value,
            "" if row.snr_db is None else row.snr_db,
            row.count,
            row.correct,
            _pct(row.accuracy),
        ]
        for row in report.conditions
    ]
    comparison = ComparisonRow.from_report(report.run or "run", report)
    files = {
        CONFUSION_SVG: render_confusion_svg(report),
        WER_SVG: render_wer_svg([comparison]),
        REPORT_JSON: orjson.dumps(
            report.model_dump(mode="json"),
            option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2,
        ).decode("utf-8")
        + "\n",
    }
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_csv(out_dir / METRICS_CSV, METRICS_HEADER, metrics_rows)
        _write_csv(out_dir / CONFUSION_CSV, report.class_names, report.confusion)
        for name, text in files.items():
            (out_dir / name).write_text(text, encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(f"Не удалось записать отчёт в {out_dir}: {e}", details={"out_dir": str(out_dir)}) from e

    written = [out_dir / name for name in (METRICS_CSV, CONFUSION_CSV, *files)]
    logger.info("Отчёт записан", out_dir=str(out_dir), files=len(written))
    return written


def load_report(run_dir: Path | str) -> EvalReport:
    """Прочитать report.json из директории запуска."""
    path = Path(run_dir) / REPORT_JSON
    if not path.is_file():
        raise MissingArtifactError(path=str(path))
    return EvalReport.model_validate(orjson.loads(path.read_bytes()))


def compare(run_dirs: Sequence[Path | str], out_dir: Path | str) -> list[ComparisonRow]:
    """Свести отчёты нескольких запусков в comparison.csv и wer.svg.

    Имя запуска - имя его директории.

    Raises:
        MissingArtifactError: В директории запуска нет report.json
        ReportWriteError: out_dir недоступна для записи

    """
    rows = [ComparisonRow.from_report(Path(run_dir).name, load_report(run_dir)) for run_dir in run_dirs]
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_csv(
            out_dir / COMPARISON_CSV,
            COMPARISON_HEADER,
            [
                [
                    row.run,
                    row.count,
                    _pct(row.accuracy),
                    _pct(row.wer),
                    _pct(row.clean_accuracy),
                    _pct(row.noisy_accuracy),
                ]
                for row in rows
            ],
        )
        (out_dir / WER_SVG).write_text(render_wer_svg(rows, title="WER (%) by run"), encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(f"Не удалось записать сравнение в {out_dir}: {e}", details={"out_dir": str(out_dir)}) from e

    logger.info("Сравнение записано", out_dir=str(out_dir), runs=len(rows))
    return rows
