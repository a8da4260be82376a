from __future__ import annotations

import numpy as np
import pytest

from promptsound.audio import Waveform
from promptsound.classifier import FeatureConfig, featurize, fit_samples, mel_filterbank

CFG = FeatureConfig()  # 16 kHz, 512-sample window, 160-sample hop, 64 mels


def test_shape_for_five_second_clip():
    wave = Waveform(samples=np.random.default_rng(0).standard_normal(80000), sample_rate=16000)
    feats = featurize(wave, CFG)
    assert feats.shape == (497, 64)  # 1 + (80000 - 512) // 160


@pytest.mark.parametrize(
    "n,window,hop,expected",
    [(16000, 512, 160, 1 + (16000 - 512) // 160), (512, 512, 160, 1), (671, 512, 160, 1),
     (672, 512, 160, 2)],
)
def test_frame_arithmetic(n, window, hop, expected):
    cfg = FeatureConfig(window_length=window, hop_length=hop)
    wave = Waveform(samples=np.zeros(n), sample_rate=16000)
    assert featurize(wave, cfg).shape[0] == expected


def test_silence_yields_log_floor_constant():
    wave = Waveform(samples=np.zeros(16000), sample_rate=16000)
    feats = featurize(wave, CFG)
    assert np.allclose(feats, np.log(CFG.log_floor))


def test_scaling_shifts_log_energy_by_constant():
    rng = np.random.default_rng(1)
    x = 0.3 * rng.standard_normal(16000) + 0.2 * np.sin(
        2 * np.pi * 700 * np.arange(16000) / 16000
    )
    feats1 = featurize(Waveform(samples=x, sample_rate=16000), CFG)
    feats2 = featurize(Waveform(samples=2 * x, sample_rate=16000), CFG)
    shift = feats2 - feats1
    assert np.allclose(shift, np.log(4.0), atol=1e-9)
    assert np.array_equal(np.argmax(feats1, axis=1), np.argmax(feats2, axis=1))


def test_clip_shorter_than_window_is_a_range_error():
    wave = Waveform(samples=np.zeros(CFG.window_length - 1), sample_rate=16000)
    with pytest.raises(ValueError, match="shorter than one window"):
        featurize(wave, CFG)


def test_sample_rate_mismatch_rejected():
    wave = Waveform(samples=np.zeros(48000), sample_rate=48000)
    with pytest.raises(ValueError, match="Hz"):
        featurize(wave, CFG)


def test_values_always_finite():
    rng = np.random.default_rng(2)
    wave = Waveform(samples=rng.standard_normal(16000) * 1e-8, sample_rate=16000)
    assert np.all(np.isfinite(featurize(wave, CFG)))


def test_tone_energy_lands_in_expected_mel_region():
    low = Waveform(samples=np.sin(2 * np.pi * 300 * np.arange(16000) / 16000), sample_rate=16000)
    high = Waveform(samples=np.sin(2 * np.pi * 3000 * np.arange(16000) / 16000), sample_rate=16000)
    low_peak = np.argmax(featurize(low, CFG).mean(axis=0))
    high_peak = np.argmax(featurize(high, CFG).mean(axis=0))
    assert low_peak < high_peak


def test_mel_filterbank_shape_and_coverage():
    filters = mel_filterbank(CFG)
    assert filters.shape == (64, 257)
    assert np.all(filters >= 0)
    assert np.all(filters.sum(axis=1) > 0)  # every filter has support


def test_fit_samples_pads_and_truncates():
    assert len(fit_samples(np.ones(10), 16)) == 16
    assert len(fit_samples(np.ones(20), 16)) == 16
    padded = fit_samples(np.ones(10), 16)
    assert np.all(padded[10:] == 0)


def test_invalid_config_rejected():
    with pytest.raises(ValueError):
        FeatureConfig(window_length=100, hop_length=200)
    with pytest.raises(ValueError):
        FeatureConfig(mel_bins=0)
