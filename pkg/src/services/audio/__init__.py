"""Аудио фронтенд: WAV ввод/вывод и log-Mel признаки."""

from src.services.audio.extractor import FeatureExtractor
from src.services.audio.features import (
    FeatureStats,
    fit_frames,
    hz_to_mel,
    log_mel,
    log_mel_spectrogram,
    mel_filterbank,
    normalize,
    power_spectrogram,
)
from src.services.audio.wav_io import Waveform, load_wav, save_wav, to_pcm16

__all__ = [
    "FeatureExtractor",
    "FeatureStats",
    "Waveform",
    "fit_frames",
    "hz_to_mel",
    "load_wav",
    "log_mel",
    "log_mel_spectrogram",
    "mel_filterbank",
    "normalize",
    "power_spectrogram",
    "save_wav",
    "to_pcm16",
]
