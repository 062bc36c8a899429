"""Корпус: манифест, смешивание с шумом, синтетический корпус, разбиение."""

from src.services.corpus.manifest import (
    DatasetManifest,
    Manifest,
    UtteranceRecord,
    read_manifest,
    relabel_for_binary,
    write_manifest,
)
from src.services.corpus.mixing import MixResult, fit_noise, measure_snr, mix_at_snr, signal_power
from src.services.corpus.noise import NOISE_GENERATORS, noise_stream
from src.services.corpus.split import split
from src.services.corpus.synth import SynthReport, digit_token, synth_corpus

__all__ = [
    "NOISE_GENERATORS",
    "DatasetManifest",
    "Manifest",
    "MixResult",
    "SynthReport",
    "UtteranceRecord",
    "digit_token",
    "fit_noise",
    "measure_snr",
    "mix_at_snr",
    "noise_stream",
    "read_manifest",
    "relabel_for_binary",
    "signal_power",
    "split",
    "synth_corpus",
    "write_manifest",
]
