"""Обработчики подкоманд CLI."""

from src.cli.commands.corpus import synth_corpus_command
from src.cli.commands.evaluation import compare_command, eval_command
from src.cli.commands.training import finetune_command, pretrain_command, train_command

__all__ = [
    "compare_command",
    "eval_command",
    "finetune_command",
    "pretrain_command",
    "synth_corpus_command",
    "train_command",
]
