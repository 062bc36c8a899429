"""resnet-asr - точка входа командной строки.

Подкоманды: synth-corpus, train, pretrain, finetune, eval, compare.
Результаты печатаются в stdout, логи идут в stderr. Коды выхода:
0 - успех, 2 - ошибка использования или конфигурации, 3 - ошибка данных,
4 - численная расходимость.
"""

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from src.cli.commands import (
    compare_command,
    eval_command,
    finetune_command,
    pretrain_command,
    synth_corpus_command,
    train_command,
)
from src.core.config import load_settings
from src.core.constants import TRAIN_SNRS_DB
from src.core.enums import NoiseType
from src.services.corpus.synth import DEFAULT_NOISE_TYPES
from src.shared.errors import AppException, map_exception
from src.shared.logging import get_logger, setup_logging

logger = get_logger()

Handler = Callable[[argparse.Namespace], int]

NOISE_CHOICES = [kind.value for kind in NoiseType if kind != NoiseType.NONE]


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, required=True, help="YAML конфигурация запуска")


def build_parser() -> argparse.ArgumentParser:
    """Собрать парсер со всеми подкомандами."""
    parser = argparse.ArgumentParser(
        prog="resnet-asr",
        description="ResNet transfer learning для распознавания изолированных цифр",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    synth = commands.add_parser("synth-corpus", help="Сгенерировать синтетический корпус цифр")
    synth.add_argument("--out", type=Path, required=True, help="Директория корпуса")
    synth.add_argument("--per-class", type=int, required=True, help="Токенов на класс (≥ 1)")
    synth.add_argument("--seed", type=int, default=0, help="Seed корпуса")
    synth.add_argument(
        "--snrs",
        type=int,
        nargs="+",
        default=list(TRAIN_SNRS_DB),
        help="Уровни SNR (дБ) из {20, 15, 10, 5, -5}",
    )
    synth.add_argument(
        "--noise-types",
        nargs="+",
        choices=NOISE_CHOICES,
        default=[kind.value for kind in DEFAULT_NOISE_TYPES],
        help="Сценарии шума",
    )
    synth.add_argument("--limit-per-mode", type=int, default=None, help="Максимум файлов на режим")
    synth.set_defaults(handler=synth_corpus_command)

    train = commands.add_parser("train", help="Обучить модель с нуля")
    _add_config(train)
    train.add_argument("--resume", action="store_true", help="Продолжить с указателя latest")
    train.set_defaults(handler=train_command)

    pretrain = commands.add_parser("pretrain", help="Предобучить модель-источник на чистых записях")
    _add_config(pretrain)
    pretrain.set_defaults(handler=pretrain_command)

    finetune = commands.add_parser("finetune", help="Перенести параметры и дообучить")
    _add_config(finetune)
    finetune.add_argument("--from", dest="source", type=Path, default=None, help="Чекпоинт источника")
    finetune.add_argument("--freeze", nargs="*", default=None, metavar="PREFIX", help="Префиксы заморозки")
    finetune.add_argument(
        "--feature-extraction",
        action="store_true",
        help="Заморозить всё, кроме выходной головы",
    )
    finetune.set_defaults(handler=finetune_command)

    evaluate = commands.add_parser("eval", help="Оценить чекпоинт на манифесте")
    evaluate.add_argument("--ckpt", type=Path, required=True, help="Чекпоинт (.rnck)")
    evaluate.add_argument("--manifest", type=Path, required=True, help="Манифест для оценки")
    evaluate.add_argument(
        "--out", type=Path, default=None, help="Директория отчёта (по умолчанию report_dir из --config)"
    )
    evaluate.add_argument("--config", type=Path, default=None, help="Сверить архитектуру с конфигурацией")
    evaluate.set_defaults(handler=eval_command)

    comparison = commands.add_parser("compare", help="Свести отчёты нескольких запусков")
    comparison.add_argument("--runs", type=Path, nargs="+", required=True, help="Директории с report.json")
    comparison.add_argument("--out", type=Path, required=True, help="Директория сравнения")
    comparison.set_defaults(handler=compare_command)

    return parser


def _fail(error: AppException) -> int:
    sys.stderr.write(error.to_json_line() + "\n")
    return error.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    """Разобрать аргументы, выполнить подкоманду и вернуть код выхода."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logging(load_settings())
    handler: Handler = args.handler
    try:
        return handler(args)
    except AppException as e:
        logger.error("Команда завершилась с ошибкой: {}", e.message, code=e.code, exit_code=e.exit_code)
        return _fail(e)
    except Exception as e:
        error = map_exception(e)
        logger.opt(exception=e).error("Необработанное исключение", code=error.code, exit_code=error.exit_code)
        return _fail(error)


if __name__ == "__main__":
    sys.exit(main())
