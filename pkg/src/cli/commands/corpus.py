"""Подкоманда synth-corpus."""

from argparse import Namespace

from src.core.enums import NoiseType
from src.services.corpus import synth_corpus
from src.shared.logging import run_context


def synth_corpus_command(args: Namespace) -> int:
    """synth-corpus --out DIR --per-class N --seed S [--snrs ...] [--noise-types ...] [--limit-per-mode N]"""
    with run_context(args.out.name or "corpus", "synth-corpus"):
        report = synth_corpus(
            args.out,
            num_per_class=args.per_class,
            seed=args.seed,
            noise_types=[NoiseType(kind) for kind in args.noise_types],
            snrs_db=args.snrs,
            limit_per_mode=args.limit_per_mode,
        )
    print(f"manifest: {report.manifest_path}")
    print(f"clean_files: {report.clean_files}")
    print(f"noisy_files: {report.noisy_files}")
    print(f"peak_scaled_files: {report.peak_scaled_files}")
    print(f"digest: {report.digest}")
    return 0
