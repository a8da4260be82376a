"""Fold training with early stopping on a held-out validation split.

The validation set is carved from the training entries (stratified, after
the fold split) because the test fold must never influence training. The
weights returned are always the ones with the best validation loss seen.
"""

from __future__ import annotations

import copy
import logging
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn

from ..audio.waveform import Waveform, read_wav
from ..datasets.types import DatasetSpec, ManifestEntry
from ..errors import ProtocolError
from .features import FeatureConfig, featurize, fit_samples
from .model import Cnn10, build_model

logger = logging.getLogger("promptsound.classifier")


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 200
    early_stop_patience: int = 10
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    rng_seed: int = 0
    validation_fraction: float = 0.1
    num_threads: int = 0  # 0 = leave torch's default; 1 = bit-reproducible runs

    def __post_init__(self) -> None:
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be >= 1")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")


@dataclass
class EpochRecord:
    fold: int
    epoch: int
    train_loss: float
    val_loss: float
    elapsed: float


@dataclass
class TrainingLog:
    fold: int
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0

    @property
    def epochs_run(self) -> int:
        return len(self.epochs)

    def write(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            fh.write("fold,epoch,train_loss,val_loss,elapsed\n")
            for rec in self.epochs:
                fh.write(
                    f"{rec.fold},{rec.epoch},{rec.train_loss:.6f},"
                    f"{rec.val_loss:.6f},{rec.elapsed:.3f}\n"
                )


class EarlyStopper:
    """Stop when validation loss has not improved for `patience` epochs.

    Improvement is strict; a flat validation loss therefore stops training
    at epoch patience + 1.
    """

    def __init__(self, patience: int):
        if patience < 1:
            raise ValueError("patience must be >= 1")
        self.patience = patience
        self.best_loss = float("inf")
        self.best_epoch = 0
        self.epochs_since_improvement = 0

    def update(self, epoch: int, val_loss: float) -> bool:
        """Record one epoch; returns True when this epoch improved."""
        if val_loss < self.best_loss:
            self.best_loss = val_loss
            self.best_epoch = epoch
            self.epochs_since_improvement = 0
            return True
        self.epochs_since_improvement += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.epochs_since_improvement >= self.patience


def stratified_validation_split(
    entries: list[ManifestEntry], fraction: float, rng_seed: int
) -> tuple[list[ManifestEntry], list[ManifestEntry]]:
    """Per-class split; every class with >= 2 entries contributes >= 1 to validation."""
    rng = random.Random(rng_seed)
    by_class: dict[int, list[ManifestEntry]] = {}
    for entry in entries:
        by_class.setdefault(entry.sound_class.class_index, []).append(entry)
    train: list[ManifestEntry] = []
    val: list[ManifestEntry] = []
    for class_index in sorted(by_class):
        members = sorted(by_class[class_index], key=lambda e: e.clip_id)
        rng.shuffle(members)
        if len(members) < 2:
            train.extend(members)
            continue
        n_val = max(1, int(round(fraction * len(members))))
        n_val = min(n_val, len(members) - 1)
        val.extend(members[:n_val])
        train.extend(members[n_val:])
    return train, val


def load_clip_features(
    entry: ManifestEntry, spec: DatasetSpec, feature_cfg: FeatureConfig
) -> np.ndarray:
    """Read a clip, force the dataset's fixed duration, featurize."""
    wave = read_wav(entry.path)
    if wave.channels != 1 or wave.sample_rate != feature_cfg.sample_rate:
        raise ValueError(
            f"{entry.path}: expected mono {feature_cfg.sample_rate} Hz audio "
            f"(got {wave.channels} ch @ {wave.sample_rate} Hz)"
        )
    mono = fit_samples(wave.mono, round(spec.clip_duration * feature_cfg.sample_rate))
    return featurize(Waveform(samples=mono, sample_rate=feature_cfg.sample_rate), feature_cfg)


def load_dataset_tensors(
    entries: list[ManifestEntry], spec: DatasetSpec, feature_cfg: FeatureConfig
) -> tuple[torch.Tensor, torch.Tensor]:
    features = np.stack([load_clip_features(e, spec, feature_cfg) for e in entries])
    labels = np.array([e.sound_class.class_index for e in entries], dtype=np.int64)
    return torch.from_numpy(features).float(), torch.from_numpy(labels)


def _epoch_loss(model: nn.Module, x: torch.Tensor, y: torch.Tensor, batch_size: int) -> float:
    criterion = nn.CrossEntropyLoss(reduction="sum")
    model.eval()
    total = 0.0
    with torch.no_grad():
        for start in range(0, len(x), batch_size):
            xb = x[start : start + batch_size]
            yb = y[start : start + batch_size]
            total += float(criterion(model(xb), yb))
    return total / len(x)


def train_fold(
    train_entries: list[ManifestEntry],
    cfg: TrainConfig,
    feature_cfg: FeatureConfig,
    spec: DatasetSpec,
    fold: int = 0,
    model: Cnn10 | None = None,
) -> tuple[Cnn10, TrainingLog]:
    """Train a classifier from scratch on one fold's training entries."""
    classes = {e.sound_class.class_index for e in train_entries}
    if len(classes) < 2:
        raise ProtocolError(
            f"training set has {len(classes)} class(es); at least 2 are required"
        )
    if cfg.num_threads:
        torch.set_num_threads(cfg.num_threads)
    torch.manual_seed(cfg.rng_seed)

    fit_entries, val_entries = stratified_validation_split(
        train_entries, cfg.validation_fraction, cfg.rng_seed
    )
    if not val_entries:
        raise ProtocolError("validation split is empty; training set too small")

    x_train, y_train = load_dataset_tensors(fit_entries, spec, feature_cfg)
    x_val, y_val = load_dataset_tensors(val_entries, spec, feature_cfg)

    if model is None:
        model = build_model(spec.n_classes)
    if cfg.optimizer.lower() != "adam":
        raise ValueError(f"unsupported optimizer {cfg.optimizer!r}")
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    criterion = nn.CrossEntropyLoss()

    stopper = EarlyStopper(cfg.early_stop_patience)
    log = TrainingLog(fold=fold)
    best_state = copy.deepcopy(model.state_dict())
    order_rng = torch.Generator().manual_seed(cfg.rng_seed)
    started = time.monotonic()

    for epoch in range(1, cfg.max_epochs + 1):
        model.train()
        permutation = torch.randperm(len(x_train), generator=order_rng)
        running = 0.0
        for start in range(0, len(permutation), cfg.batch_size):
            idx = permutation[start : start + cfg.batch_size]
            optimizer.zero_grad()
            loss = criterion(model(x_train[idx]), y_train[idx])
            loss.backward()
            optimizer.step()
            running += float(loss.detach()) * len(idx)
        train_loss = running / len(x_train)
        val_loss = _epoch_loss(model, x_val, y_val, cfg.batch_size)
        log.epochs.append(
            EpochRecord(fold, epoch, train_loss, val_loss, time.monotonic() - started)
        )
        if stopper.update(epoch, val_loss):
            best_state = copy.deepcopy(model.state_dict())
        logger.debug(
            "fold=%d epoch=%d train_loss=%.4f val_loss=%.4f", fold, epoch, train_loss, val_loss
        )
        if stopper.should_stop:
            break

    log.best_epoch = stopper.best_epoch
    model.load_state_dict(best_state)
    model.eval()
    return model, log
