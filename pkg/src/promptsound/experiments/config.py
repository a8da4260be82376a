"""Experiment configuration: one YAML file describes one results-table row.

A config names the dataset, the composition mode (baseline, replacement,
augmentation, prompt mix, model mix), the prompt strategies and generation
backends involved, and all training/feature knobs. Every output artifact
carries the config fingerprint so rows stay traceable to their settings.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from ..classifier.features import FeatureConfig
from ..classifier.training import TrainConfig
from ..datasets.types import BENCHMARK_SPECS, DatasetSpec
from ..errors import ConfigError
from ..llm.backends import ENV_MODEL
from ..types import CaptionStrategy

MODES = ("baseline", "replace", "augment", "prompt-mix", "model-mix")

BACKEND_DISPLAY_NAMES = {
    "stable-audio-open": "Stable Audio",
    "audiogen": "AudioGen",
    "mock-tone": "Mock Tone",
}


@dataclass(frozen=True)
class LlmSettings:
    model_id: str = "gpt-4"
    temperature: float = 1.0
    k_examples: int = 5
    batch_size: int = 20
    max_rounds: int = 5
    requests_per_minute: float | None = None
    endpoint: str | None = None


@dataclass(frozen=True)
class TtaSettings:
    endpoints: dict = field(default_factory=dict)  # backend_id -> url
    checkpoints: dict = field(default_factory=dict)  # backend_id -> path/name
    parallelism: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    dataset_id: str
    metadata_path: Path
    audio_root: Path
    mode: str
    strategies: tuple[CaptionStrategy, ...] = ()
    backends: tuple[str, ...] = ()
    multiplier: int = 1
    include_real: bool = False
    out_dir: Path = Path("runs")
    generated_root: Path = Path("generated")
    cache_dir: Path | None = None
    corpus_path: Path | None = None
    llm: LlmSettings = field(default_factory=LlmSettings)
    tta: TtaSettings = field(default_factory=TtaSettings)
    train: TrainConfig = field(default_factory=TrainConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    rng_seed: int = 0
    dataset_spec: DatasetSpec | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        n_s, n_b = len(self.strategies), len(self.backends)
        if self.mode == "baseline":
            if n_s or n_b:
                raise ConfigError("baseline mode does not take strategies or backends")
        elif self.mode in ("replace", "augment"):
            if n_s != 1 or n_b != 1:
                raise ConfigError(f"{self.mode} mode needs exactly 1 strategy and 1 backend")
            if self.mode == "replace" and self.include_real:
                raise ConfigError("replace mode excludes real data; use augment")
        elif self.mode == "prompt-mix":
            if n_s < 2 or n_b != 1:
                raise ConfigError("prompt-mix needs >= 2 strategies and exactly 1 backend")
        elif self.mode == "model-mix":
            if n_b < 2 or n_s != 1:
                raise ConfigError("model-mix needs >= 2 backends and exactly 1 strategy")
        if len(set(self.strategies)) != n_s:
            raise ConfigError("duplicate strategies")
        if len(set(self.backends)) != n_b:
            raise ConfigError("duplicate backends")
        if self.multiplier < 1:
            raise ConfigError("multiplier must be >= 1")
        if CaptionStrategy.EXE in self.strategies and self.corpus_path is None:
            raise ConfigError("the EXE strategy needs paths.corpus")

    @property
    def spec(self) -> DatasetSpec:
        if self.dataset_spec is not None:
            return self.dataset_spec
        try:
            return BENCHMARK_SPECS[self.dataset_id]
        except KeyError:
            raise ConfigError(
                f"dataset {self.dataset_id!r} is not a known benchmark; "
                "add a dataset.spec block to the config"
            ) from None

    @property
    def trains_on_synthetic_only(self) -> bool:
        if self.mode == "baseline":
            return False
        return not self.uses_real_in_training

    @property
    def uses_real_in_training(self) -> bool:
        return self.mode == "augment" or (
            self.mode in ("prompt-mix", "model-mix") and self.include_real
        )

    def label(self) -> str:
        """Row label following the result tables' naming scheme."""
        if self.mode == "baseline":
            return "Baseline"
        parts = ", ".join(s.value for s in self.strategies)
        if self.uses_real_in_training:
            parts += " w/ ORG"
        if self.multiplier > 1:
            parts += f" x{self.multiplier}"
        backends = " + ".join(BACKEND_DISPLAY_NAMES.get(b, b) for b in self.backends)
        return f"{parts} / {backends}"

    def to_canonical_dict(self) -> dict:
        return {
            "name": self.name,
            "dataset_id": self.dataset_id,
            "mode": self.mode,
            "strategies": [s.value for s in self.strategies],
            "backends": list(self.backends),
            "multiplier": self.multiplier,
            "include_real": self.include_real,
            "llm": {
                "model_id": self.llm.model_id,
                "temperature": self.llm.temperature,
                "k_examples": self.llm.k_examples,
                "batch_size": self.llm.batch_size,
                "max_rounds": self.llm.max_rounds,
            },
            "train": {
                "max_epochs": self.train.max_epochs,
                "early_stop_patience": self.train.early_stop_patience,
                "batch_size": self.train.batch_size,
                "learning_rate": self.train.learning_rate,
                "optimizer": self.train.optimizer,
                "validation_fraction": self.train.validation_fraction,
            },
            "features": {
                "sample_rate": self.features.sample_rate,
                "window_length": self.features.window_length,
                "hop_length": self.features.hop_length,
                "mel_bins": self.features.mel_bins,
            },
            "rng_seed": self.rng_seed,
        }

    def fingerprint(self) -> str:
        canonical = json.dumps(self.to_canonical_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def with_overrides(
        self,
        out_dir: Path | None = None,
        rng_seed: int | None = None,
    ) -> "ExperimentConfig":
        cfg = self
        if out_dir is not None:
            cfg = replace(cfg, out_dir=Path(out_dir))
        if rng_seed is not None:
            cfg = replace(
                cfg,
                rng_seed=rng_seed,
                train=replace(cfg.train, rng_seed=rng_seed),
            )
        return cfg


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"missing {where}.{key}")
    return mapping[key]


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    base = path.parent

    def resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else (base / p)

    dataset = _require(raw, "dataset", path.name)
    paths = raw.get("paths", {})
    llm_raw = raw.get("llm", {})
    tta_raw = raw.get("tta", {})
    train_raw = raw.get("train", {})
    features_raw = raw.get("features", {})
    seed = int(raw.get("rng_seed", 0))

    spec = None
    if "spec" in dataset:
        spec_raw = dataset["spec"]
        spec = DatasetSpec(
            dataset_id=dataset["id"],
            n_classes=int(spec_raw["n_classes"]),
            n_folds=int(spec_raw["n_folds"]),
            expected_total=int(spec_raw["expected_total"]),
            clip_duration=float(spec_raw["clip_duration"]),
        )

    try:
        return ExperimentConfig(
            name=raw.get("name", path.stem),
            dataset_id=_require(dataset, "id", "dataset"),
            metadata_path=resolve(_require(dataset, "metadata", "dataset")),
            audio_root=resolve(_require(dataset, "audio_root", "dataset")),
            mode=_require(raw, "mode", path.name),
            strategies=tuple(CaptionStrategy.parse(s) for s in raw.get("strategies", [])),
            backends=tuple(raw.get("backends", [])),
            multiplier=int(raw.get("multiplier", 1)),
            include_real=bool(raw.get("include_real", False)),
            out_dir=resolve(paths.get("out", f"runs/{raw.get('name', path.stem)}")),
            generated_root=resolve(paths.get("generated_root", "generated")),
            cache_dir=resolve(paths["cache_dir"]) if "cache_dir" in paths else None,
            corpus_path=resolve(paths["corpus"]) if "corpus" in paths else None,
            llm=LlmSettings(
                model_id=llm_raw.get("model_id", os.environ.get(ENV_MODEL, "gpt-4")),
                temperature=float(llm_raw.get("temperature", 1.0)),
                k_examples=int(llm_raw.get("k_examples", 5)),
                batch_size=int(llm_raw.get("batch_size", 20)),
                max_rounds=int(llm_raw.get("max_rounds", 5)),
                requests_per_minute=llm_raw.get("requests_per_minute"),
                endpoint=llm_raw.get("endpoint"),
            ),
            tta=TtaSettings(
                endpoints=dict(tta_raw.get("endpoints", {})),
                checkpoints=dict(tta_raw.get("checkpoints", {})),
                parallelism=int(tta_raw.get("parallelism", 1)),
            ),
            train=TrainConfig(
                max_epochs=int(train_raw.get("max_epochs", 200)),
                early_stop_patience=int(train_raw.get("early_stop_patience", 10)),
                batch_size=int(train_raw.get("batch_size", 32)),
                learning_rate=float(train_raw.get("learning_rate", 1e-3)),
                optimizer=train_raw.get("optimizer", "adam"),
                rng_seed=seed,
                validation_fraction=float(train_raw.get("validation_fraction", 0.1)),
                num_threads=int(train_raw.get("num_threads", 0)),
            ),
            features=FeatureConfig(
                sample_rate=int(features_raw.get("sample_rate", 16000)),
                window_length=int(features_raw.get("window_length", 512)),
                hop_length=int(features_raw.get("hop_length", 160)),
                mel_bins=int(features_raw.get("mel_bins", 64)),
            ),
            rng_seed=seed,
            dataset_spec=spec,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
