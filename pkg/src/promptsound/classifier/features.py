"""Log-mel spectrogram front-end feeding the convolutional classifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import get_window

from ..audio.waveform import Waveform


@dataclass(frozen=True)
class FeatureConfig:
    sample_rate: int = 16000
    window_length: int = 512  # 32 ms at 16 kHz
    hop_length: int = 160  # 10 ms
    mel_bins: int = 64
    log_floor: float = 1e-10
    fmin: float = 0.0
    fmax: float | None = None  # defaults to Nyquist

    def __post_init__(self) -> None:
        if not (self.window_length >= self.hop_length > 0):
            raise ValueError("need window_length >= hop_length > 0")
        if self.mel_bins <= 0:
            raise ValueError("mel_bins must be positive")

    def frame_count(self, n_samples: int) -> int:
        return 1 + (n_samples - self.window_length) // self.hop_length


def _hz_to_mel(freq: np.ndarray | float) -> np.ndarray | float:
    return 2595.0 * np.log10(1.0 + np.asarray(freq) / 700.0)


def _mel_to_hz(mel: np.ndarray | float) -> np.ndarray | float:
    return 700.0 * (10.0 ** (np.asarray(mel) / 2595.0) - 1.0)


def mel_filterbank(cfg: FeatureConfig) -> np.ndarray:
    """Triangular mel filters, shape (mel_bins, n_fft // 2 + 1)."""
    n_fft = cfg.window_length
    fmax = cfg.fmax if cfg.fmax is not None else cfg.sample_rate / 2.0
    mel_points = np.linspace(_hz_to_mel(cfg.fmin), _hz_to_mel(fmax), cfg.mel_bins + 2)
    hz_points = np.asarray(_mel_to_hz(mel_points))
    bin_freqs = np.linspace(0.0, cfg.sample_rate / 2.0, n_fft // 2 + 1)
    filters = np.zeros((cfg.mel_bins, len(bin_freqs)))
    for m in range(cfg.mel_bins):
        left, center, right = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (bin_freqs - left) / max(center - left, 1e-12)
        falling = (right - bin_freqs) / max(right - center, 1e-12)
        filters[m] = np.clip(np.minimum(rising, falling), 0.0, None)
    return filters


def featurize(w: Waveform, cfg: FeatureConfig) -> np.ndarray:
    """Time x mel log-power spectrogram.

    Frames are cut without padding, so the shape is
    (1 + floor((n - window) / hop), mel_bins).
    """
    if w.channels != 1:
        raise ValueError("featurize expects a mono waveform")
    if w.sample_rate != cfg.sample_rate:
        raise ValueError(
            f"waveform at {w.sample_rate} Hz, feature config expects {cfg.sample_rate} Hz"
        )
    x = w.mono
    if len(x) < cfg.window_length:
        raise ValueError(
            f"clip of {len(x)} samples is shorter than one window ({cfg.window_length})"
        )
    frames = np.lib.stride_tricks.sliding_window_view(x, cfg.window_length)[
        :: cfg.hop_length
    ]
    window = get_window("hann", cfg.window_length, fftbins=True)
    spectrum = np.fft.rfft(frames * window, axis=1)
    power = np.abs(spectrum) ** 2
    mel = power @ mel_filterbank(cfg).T
    out = np.log(np.maximum(mel, cfg.log_floor))
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite values in feature output")
    return out


def fit_samples(mono: np.ndarray, n_target: int) -> np.ndarray:
    """Zero-pad or truncate a clip so batches have a fixed shape."""
    if len(mono) < n_target:
        return np.concatenate([mono, np.zeros(n_target - len(mono), dtype=mono.dtype)])
    return mono[:n_target]
