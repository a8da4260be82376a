"""Waveform container and 16-bit PCM WAV file I/O."""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

TARGET_SAMPLE_RATE = 16000


@dataclass(frozen=True)
class Waveform:
    """Audio samples with shape (channels, n_samples)."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        if self.samples.ndim == 1:
            object.__setattr__(self, "samples", self.samples[np.newaxis, :])
        elif self.samples.ndim != 2:
            raise ValueError("samples must be 1-D (mono) or 2-D (channels, n)")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def channels(self) -> int:
        return int(self.samples.shape[0])

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[1])

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate

    @property
    def mono(self) -> np.ndarray:
        """The single channel; only valid on mono waveforms."""
        if self.channels != 1:
            raise ValueError(f"waveform has {self.channels} channels, expected mono")
        return self.samples[0]

    def is_post_processed(self, duration: float, sample_rate: int = TARGET_SAMPLE_RATE) -> bool:
        return (
            self.channels == 1
            and self.sample_rate == sample_rate
            and self.n_samples == round(duration * sample_rate)
        )


def write_wav(path: str | Path, waveform: Waveform) -> None:
    """Write mono 16-bit linear PCM; the file appears atomically."""
    if waveform.channels != 1:
        raise ValueError("only mono waveforms are written to disk")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    clipped = np.clip(waveform.mono, -1.0, 1.0)
    pcm = (clipped * 32767.0).round().astype(np.int16)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".wav.tmp")
    os.close(fd)
    try:
        wavfile.write(tmp, waveform.sample_rate, pcm)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_wav(path: str | Path) -> Waveform:
    """Read a WAV file into float samples in [-1, 1]."""
    rate, data = wavfile.read(str(path))
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    else:  # float32/float64 wav
        samples = data.astype(np.float64)
    if samples.ndim == 2:  # scipy returns (n, channels)
        samples = samples.T
    return Waveform(samples=samples, sample_rate=int(rate))
