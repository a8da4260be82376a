from .backends import (
    AUDIOGEN,
    KNOWN_BACKENDS,
    MOCK_TONE,
    STABLE_AUDIO_OPEN,
    MockToneBackend,
    RemoteEndpointBackend,
    make_backend,
    synth_tone,
    tone_frequency,
)
from .dsp import clamp_peak, dominant_frequency, downmix_and_resample, fit_duration, post_process
from .generate import (
    BatchReport,
    GenerationJob,
    generate,
    job_for_caption,
    job_seed,
    output_path,
    run_generation_batch,
    verify_audio_tree,
)
from .waveform import TARGET_SAMPLE_RATE, Waveform, read_wav, write_wav

__all__ = [
    "AUDIOGEN",
    "KNOWN_BACKENDS",
    "MOCK_TONE",
    "STABLE_AUDIO_OPEN",
    "MockToneBackend",
    "RemoteEndpointBackend",
    "make_backend",
    "synth_tone",
    "tone_frequency",
    "clamp_peak",
    "dominant_frequency",
    "downmix_and_resample",
    "fit_duration",
    "post_process",
    "BatchReport",
    "GenerationJob",
    "generate",
    "job_for_caption",
    "job_seed",
    "output_path",
    "run_generation_batch",
    "verify_audio_tree",
    "TARGET_SAMPLE_RATE",
    "Waveform",
    "read_wav",
    "write_wav",
]
