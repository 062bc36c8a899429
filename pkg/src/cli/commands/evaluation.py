"""Подкоманды eval и compare."""

from argparse import Namespace

from src.cli.commands.common import num_classes_for, report_dir_for
from src.core.enums import TaskKind
from src.models import build_model
from src.services.audio import FeatureExtractor
from src.services.corpus import read_manifest, relabel_for_binary
from src.services.evaluation import compare, emit_report, evaluate
from src.services.run_config import effective_seed, load_run_config
from src.services.training import load_checkpoint, require_matching_spec
from src.shared.errors import CheckpointFormatError
from src.shared.logging import run_context


def eval_command(args: Namespace) -> int:
    """eval --ckpt FILE --manifest FILE [--out DIR] [--config FILE]

    Модель восстанавливается из спецификации в чекпоинте; с --config
    спецификация дополнительно сверяется с архитектурой конфигурации,
    а без --out отчёт пишется в report_dir конфигурации.
    """
    ckpt = load_checkpoint(args.ckpt)
    spec = ckpt.spec
    config = None if args.config is None else load_run_config(args.config)
    out = report_dir_for(args.out, config)
    run = out.name or "run"

    if config is not None:
        run = config.run.name
        expected, _ = build_model(
            config.run.architecture,
            (1, config.features.n_mels, config.features.n_frames),
            num_classes_for(config.run.task),
            effective_seed(config),
        )
        require_matching_spec(ckpt, expected)

    stats = ckpt.feature_stats
    if stats is None:
        raise CheckpointFormatError(reason="в чекпоинте нет статистик нормализации признаков")

    with run_context(run, "eval"):
        manifest = read_manifest(args.manifest)
        if spec.num_classes == num_classes_for(TaskKind.BINARY):
            manifest = relabel_for_binary(manifest)
        report = evaluate(spec, ckpt.params(spec), manifest, FeatureExtractor(stats), run=run)
        emit_report(report, out)
    print(f"report_dir: {out}")

    print(f"count: {report.count}")
    print(f"correct: {report.correct}")
    print(f"accuracy: {report.accuracy:.4f}")
    print(f"wer: {report.wer:.4f}")
    return 0


def compare_command(args: Namespace) -> int:
    """compare --runs DIR ... --out DIR"""
    with run_context(args.out.name or "compare", "compare"):
        rows = compare(args.runs, args.out)
    for row in rows:
        print(f"{row.run}: accuracy {row.accuracy:.4f}, wer {row.wer:.4f}")
    return 0
