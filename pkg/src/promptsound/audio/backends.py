"""Text-to-audio backends behind a single synthesize() protocol.

``mock-tone`` is always available and fully deterministic: each class maps
to a fixed sine frequency, so downstream classifiers have a learnable and
verifiable signal. The two real model families are adapters that accept
either a local checkpoint (optional heavy dependencies) or a remote
inference endpoint serving WAV bytes.
"""

from __future__ import annotations

import io
from typing import Protocol

import httpx
import numpy as np
from scipy.io import wavfile

from ..errors import BackendUnavailableError, GenerationError
from ..types import CaptionRecord
from .waveform import TARGET_SAMPLE_RATE, Waveform

MOCK_TONE = "mock-tone"
AUDIOGEN = "audiogen"
STABLE_AUDIO_OPEN = "stable-audio-open"

KNOWN_BACKENDS = (MOCK_TONE, AUDIOGEN, STABLE_AUDIO_OPEN)

# Class-to-pitch mapping of the mock backend.
TONE_BASE_HZ = 300.0
TONE_STEP_HZ = 100.0


class TtaBackend(Protocol):
    backend_id: str

    def synthesize(self, caption: CaptionRecord, duration: float, seed: int) -> Waveform:
        """Raw model output; post-processing happens in the generation pipeline."""
        ...


def tone_frequency(class_index: int) -> float:
    return TONE_BASE_HZ + TONE_STEP_HZ * class_index


def synth_tone(
    class_index: int,
    duration: float,
    seed: int,
    sample_rate: int = TARGET_SAMPLE_RATE,
    tone_amplitude: float = 0.7,
    noise_amplitude: float = 0.02,
) -> Waveform:
    """Pure function of (class_index, seed, duration): seeded phase and noise."""
    rng = np.random.default_rng(seed)
    n = round(duration * sample_rate)
    t = np.arange(n) / sample_rate
    phase = rng.uniform(0.0, 2.0 * np.pi)
    samples = tone_amplitude * np.sin(2.0 * np.pi * tone_frequency(class_index) * t + phase)
    samples = samples + noise_amplitude * rng.standard_normal(n)
    return Waveform(samples=samples, sample_rate=sample_rate)


class MockToneBackend:
    def __init__(self, backend_id: str = MOCK_TONE):
        # The id is overridable so a dry run can stand in for a real backend
        # while keeping that backend's provenance tags and output layout.
        self.backend_id = backend_id

    def synthesize(self, caption: CaptionRecord, duration: float, seed: int) -> Waveform:
        return synth_tone(caption.sound_class.class_index, duration, seed)


class RemoteEndpointBackend:
    """Generic remote inference endpoint returning a WAV body."""

    def __init__(
        self,
        backend_id: str,
        endpoint: str,
        timeout: float = 600.0,
        client: httpx.Client | None = None,
    ):
        self.backend_id = backend_id
        self.endpoint = endpoint.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)

    def synthesize(self, caption: CaptionRecord, duration: float, seed: int) -> Waveform:
        payload = {"prompt": caption.text, "duration": duration, "seed": seed}
        try:
            response = self._client.post(f"{self.endpoint}/generate", json=payload)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise GenerationError(
                f"{self.backend_id}: inference endpoint failed: {exc}"
            ) from exc
        try:
            rate, data = wavfile.read(io.BytesIO(response.content))
        except ValueError as exc:
            raise GenerationError(
                f"{self.backend_id}: endpoint did not return parseable WAV audio: {exc}"
            ) from exc
        samples = np.asarray(data, dtype=np.float64)
        if data.dtype == np.int16:
            samples /= 32768.0
        elif data.dtype == np.int32:
            samples /= 2147483648.0
        if samples.ndim == 2:
            samples = samples.T
        return Waveform(samples=samples, sample_rate=int(rate))


class AudioGenLocalBackend:
    """Local checkpoint adapter for the autoregressive token-based model."""

    backend_id = AUDIOGEN

    def __init__(self, checkpoint: str = "facebook/audiogen-medium", device: str = "cpu"):
        try:
            from audiocraft.models import AudioGen  # type: ignore[import-not-found]
        except ImportError as exc:
            raise BackendUnavailableError(
                "audiogen local checkpoints need the 'audiocraft' package "
                f"(pip install audiocraft): {exc}"
            ) from exc
        try:
            self._model = AudioGen.get_pretrained(checkpoint, device=device)
        except Exception as exc:
            raise BackendUnavailableError(
                f"audiogen checkpoint {checkpoint!r} could not be loaded: {exc}"
            ) from exc

    def synthesize(self, caption: CaptionRecord, duration: float, seed: int) -> Waveform:
        import torch

        torch.manual_seed(seed)
        self._model.set_generation_params(duration=duration)
        try:
            batch = self._model.generate([caption.text])
        except Exception as exc:
            raise GenerationError(f"audiogen inference failed: {exc}") from exc
        samples = batch[0].cpu().numpy().astype(np.float64)
        return Waveform(samples=samples, sample_rate=int(self._model.sample_rate))


class StableAudioOpenLocalBackend:
    """Local checkpoint adapter for the latent-diffusion model (stereo output)."""

    backend_id = STABLE_AUDIO_OPEN

    def __init__(self, checkpoint: str = "stabilityai/stable-audio-open-1.0", device: str = "cpu"):
        try:
            from stable_audio_tools import get_pretrained_model  # type: ignore[import-not-found]
        except ImportError as exc:
            raise BackendUnavailableError(
                "stable-audio-open local checkpoints need the 'stable-audio-tools' "
                f"package: {exc}"
            ) from exc
        try:
            self._model, self._config = get_pretrained_model(checkpoint)
            self._model = self._model.to(device)
            self._device = device
        except Exception as exc:
            raise BackendUnavailableError(
                f"stable-audio-open checkpoint {checkpoint!r} could not be loaded: {exc}"
            ) from exc

    def synthesize(self, caption: CaptionRecord, duration: float, seed: int) -> Waveform:
        from stable_audio_tools.inference.generation import (  # type: ignore[import-not-found]
            generate_diffusion_cond,
        )

        sample_rate = int(self._config["sample_rate"])
        try:
            audio = generate_diffusion_cond(
                self._model,
                conditioning=[
                    {
                        "prompt": caption.text,
                        "seconds_start": 0,
                        "seconds_total": duration,
                    }
                ],
                sample_size=int(duration * sample_rate),
                seed=seed,
                device=self._device,
            )
        except Exception as exc:
            raise GenerationError(f"stable-audio-open inference failed: {exc}") from exc
        samples = audio[0].cpu().numpy().astype(np.float64)
        peak = np.max(np.abs(samples))
        if peak > 0:
            samples = samples / max(peak, 1.0)
        return Waveform(samples=samples, sample_rate=sample_rate)


def make_backend(
    backend_id: str,
    endpoint: str | None = None,
    checkpoint: str | None = None,
    device: str = "cpu",
) -> TtaBackend:
    """Resolve a backend id to an adapter; remote endpoint wins over checkpoint."""
    if backend_id == MOCK_TONE:
        return MockToneBackend()
    if backend_id not in KNOWN_BACKENDS:
        raise BackendUnavailableError(f"unknown backend id: {backend_id!r}")
    if endpoint:
        return RemoteEndpointBackend(backend_id, endpoint)
    if backend_id == AUDIOGEN:
        return AudioGenLocalBackend(**({"checkpoint": checkpoint} if checkpoint else {}), device=device)
    return StableAudioOpenLocalBackend(
        **({"checkpoint": checkpoint} if checkpoint else {}), device=device
    )
