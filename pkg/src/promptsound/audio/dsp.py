"""Post-processing applied to every generated clip: mono, 16 kHz, fixed length."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.signal import resample_poly

from .waveform import TARGET_SAMPLE_RATE, Waveform

# Kaiser beta for the anti-aliasing filter; ~130 dB stopband keeps the
# resampler well inside the 60 dB difference-SNR budget.
_KAISER_BETA = 14.0


def downmix_and_resample(w: Waveform, target_rate: int = TARGET_SAMPLE_RATE) -> Waveform:
    """Channel-mean downmix followed by band-limited polyphase resampling.

    A mono input already at the target rate passes through bit-identical.
    """
    if w.n_samples == 0:
        raise ValueError("cannot resample a zero-length waveform")
    if w.channels == 1 and w.sample_rate == target_rate:
        return w
    mono = w.samples.mean(axis=0) if w.channels > 1 else w.samples[0]
    if w.sample_rate != target_rate:
        ratio = Fraction(target_rate, w.sample_rate)
        mono = resample_poly(
            mono,
            up=ratio.numerator,
            down=ratio.denominator,
            window=("kaiser", _KAISER_BETA),
            padtype="line",
        )
    return Waveform(samples=np.asarray(mono, dtype=np.float64), sample_rate=target_rate)


def fit_duration(w: Waveform, duration: float) -> Waveform:
    """Zero-pad the tail or truncate so the length is exactly round(duration * rate)."""
    target = round(duration * w.sample_rate)
    mono = w.mono
    if len(mono) < target:
        mono = np.concatenate([mono, np.zeros(target - len(mono), dtype=mono.dtype)])
    elif len(mono) > target:
        mono = mono[:target]
    return Waveform(samples=mono, sample_rate=w.sample_rate)


def clamp_peak(w: Waveform, peak: float = 1.0) -> Waveform:
    """Rescale only if the waveform exceeds the allowed peak amplitude."""
    observed = float(np.max(np.abs(w.samples))) if w.n_samples else 0.0
    if observed <= peak or observed == 0.0:
        return w
    return Waveform(samples=w.samples * (peak / observed), sample_rate=w.sample_rate)


def post_process(w: Waveform, duration: float, target_rate: int = TARGET_SAMPLE_RATE) -> Waveform:
    """The full chain every backend output passes through before hitting disk."""
    out = clamp_peak(fit_duration(downmix_and_resample(w, target_rate), duration))
    assert out.is_post_processed(duration, target_rate)
    return out


def dominant_frequency(mono: np.ndarray, sample_rate: int) -> float:
    """Frequency of the largest magnitude rFFT bin (diagnostics and tests)."""
    spectrum = np.abs(np.fft.rfft(mono))
    spectrum[0] = 0.0  # ignore DC
    return float(np.argmax(spectrum) * sample_rate / len(mono))
