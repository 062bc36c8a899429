"""Подкоманды train, pretrain и finetune."""

from argparse import Namespace
from pathlib import Path

from src.cli.commands.common import (
    PreparedData,
    RunWriter,
    latest_checkpoint_path,
    load_latest,
    prepare_data,
    train_config,
)
from src.core.enums import TrainingMode
from src.core.run_config import RunConfig
from src.models import ModelSpec, ParamStore, build_model
from src.services.audio import FeatureExtractor
from src.services.run_config import effective_seed, load_run_config, require_paths
from src.services.run_guard import acquire_run_dir
from src.services.training import (
    LabeledFeatures,
    TrainResult,
    default_name_map,
    feature_extraction_prefixes,
    fine_tune,
    load_checkpoint,
    require_matching_spec,
    train,
    transfer_init,
)
from src.shared.errors import ConfigError
from src.shared.logging import get_logger, run_context

logger = get_logger()


def _input_shape(config: RunConfig) -> tuple[int, int, int]:
    return (1, config.features.n_mels, config.features.n_frames)


def _build(config: RunConfig, num_classes: int, seed: int) -> tuple[ModelSpec, ParamStore]:
    return build_model(config.run.architecture, _input_shape(config), num_classes, seed)


def _datasets(data: PreparedData, extractor: FeatureExtractor) -> tuple[LabeledFeatures, LabeledFeatures]:
    return (
        LabeledFeatures.from_manifest(data.train, extractor),
        LabeledFeatures.from_manifest(data.test, extractor),
    )


def _report(run_dir: Path, result: TrainResult) -> None:
    last = result.history[-1] if result.history else None
    print(f"run_dir: {run_dir}")
    print(f"checkpoint: {latest_checkpoint_path(run_dir)}")
    if last is not None:
        print(f"epoch: {last.epoch}")
        print(f"loss: {last.loss:.6f}")
        if last.val_accuracy is not None:
            print(f"val_accuracy: {last.val_accuracy:.4f}")


def _load(args: Namespace) -> tuple[RunConfig, int]:
    config = load_run_config(args.config)
    require_paths(config, "manifest", "run_dir")
    return config, effective_seed(config)


def _run_training(config: RunConfig, seed: int, command: str, resume: bool, mode: TrainingMode | None) -> int:
    with run_context(config.run.name, command), acquire_run_dir(config.paths.run_dir, command) as run_dir:
        data = prepare_data(config, run_dir, seed, training_mode=mode)
        spec, params = _build(config, data.num_classes, seed)
        extractor = FeatureExtractor()
        start_epoch = 0

        if resume:
            ckpt = load_latest(run_dir)
            require_matching_spec(ckpt, spec)
            extractor = FeatureExtractor(ckpt.feature_stats)
            params = ckpt.params(spec)
            start_epoch = ckpt.epoch
            logger.info("Продолжение обучения", start_epoch=start_epoch)
        else:
            extractor.fit(data.train.paths())

        writer = RunWriter(run_dir, spec, extractor.stats, seed, config.echo())
        if resume:
            writer.load_history(start_epoch)
        train_set, held_out = _datasets(data, extractor)
        result = train(
            spec,
            params,
            train_set,
            train_config(config, seed),
            held_out=held_out,
            on_epoch_end=writer,
            start_epoch=start_epoch,
        )
        _report(run_dir, result)
    return 0


def train_command(args: Namespace) -> int:
    """train --config FILE [--resume]"""
    config, seed = _load(args)
    return _run_training(config, seed, "train", args.resume, mode=None)


def pretrain_command(args: Namespace) -> int:
    """pretrain --config FILE: обучение на чистой части корпуса."""
    config, seed = _load(args)
    if config.run.training_mode != TrainingMode.CLEAN:
        logger.info("pretrain обучает только на чистых записях", training_mode=config.run.training_mode.value)
    return _run_training(config, seed, "pretrain", resume=False, mode=TrainingMode.CLEAN)


def finetune_command(args: Namespace) -> int:
    """finetune --config FILE [--from CKPT] [--freeze PREFIX ...] [--feature-extraction]"""
    config, seed = _load(args)
    source_path = args.source or config.transfer.source_checkpoint
    if source_path is None:
        raise ConfigError(
            "Не задан чекпоинт источника: --from или transfer.source_checkpoint",
            details={"field": "transfer.source_checkpoint"},
        )

    with run_context(config.run.name, "finetune"), acquire_run_dir(config.paths.run_dir, "finetune") as run_dir:
        source = load_checkpoint(source_path)
        data = prepare_data(config, run_dir, seed)
        spec, params = _build(config, data.num_classes, seed)

        name_map = config.transfer.name_map or default_name_map(source.spec, spec)
        params, transferred = transfer_init(source, params, name_map)

        if args.feature_extraction or config.transfer.feature_extraction:
            freeze = feature_extraction_prefixes(spec)
        else:
            freeze = list(args.freeze) if args.freeze is not None else list(config.transfer.freeze)
        logger.info("Источник загружен", source=str(source_path), transferred=transferred, freeze=freeze)

        extractor = FeatureExtractor()
        extractor.fit(data.train.paths())
        train_set, held_out = _datasets(data, extractor)
        result = fine_tune(
            spec,
            params,
            train_set,
            train_config(config, seed, freeze_prefixes=freeze),
            held_out=held_out,
            on_epoch_end=RunWriter(run_dir, spec, extractor.stats, seed, config.echo()),
        )
        print(f"transferred: {transferred}")
        _report(run_dir, result)
    return 0
