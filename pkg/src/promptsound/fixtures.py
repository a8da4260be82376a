"""Deterministic fixture data for offline runs, CI and the test suite.

Two kinds of fixtures live here:

* a small tone-conditioned dataset whose "real" clips are sine tones at the
  same class-to-frequency mapping the mock generation backend uses, so a
  classifier trained on mock-generated audio is evaluated on compatible
  real audio;
* benchmark-shaped metadata tables that reproduce the published totals,
  class counts and fold sizes of the two real datasets without shipping
  any of their audio, for structural property checks at full scale.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path

from .audio.backends import synth_tone
from .audio.waveform import write_wav
from .datasets.metadata import ESC50_HEADER, US8K_HEADER
from .datasets.types import DatasetSpec

TOY_CLASS_NAMES = ("hum", "buzz", "chime", "whistle", "drone", "beep", "ring", "horn")


@dataclass(frozen=True)
class ToyDataset:
    spec: DatasetSpec
    metadata_path: Path
    audio_root: Path


def build_toy_dataset(
    root: str | Path,
    n_classes: int = 4,
    clips_per_class: int = 8,
    n_folds: int = 2,
    duration: float = 2.0,
    dataset_id: str = "toy",
    seed: int = 1234,
) -> ToyDataset:
    """Materialize a tone-conditioned fixture dataset in the esc50 table format."""
    if clips_per_class % n_folds != 0:
        raise ValueError("clips_per_class must divide evenly across folds")
    root = Path(root)
    audio_root = root / "audio"
    audio_root.mkdir(parents=True, exist_ok=True)
    spec = DatasetSpec(
        dataset_id=dataset_id,
        n_classes=n_classes,
        n_folds=n_folds,
        expected_total=n_classes * clips_per_class,
        clip_duration=duration,
    )
    rng = random.Random(seed)
    metadata_path = root / "metadata.csv"
    with metadata_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ESC50_HEADER)
        serial = 0
        for class_index in range(n_classes):
            name = (
                TOY_CLASS_NAMES[class_index]
                if class_index < len(TOY_CLASS_NAMES)
                else f"tone{class_index}"
            )
            for i in range(clips_per_class):
                fold = (i % n_folds) + 1
                filename = f"{fold}-{serial:06d}-A-{class_index}.wav"
                writer.writerow([filename, fold, class_index, name, "False", serial, "A"])
                tone = synth_tone(class_index, duration, seed=rng.getrandbits(48))
                write_wav(audio_root / filename, tone)
                serial += 1
    return ToyDataset(spec=spec, metadata_path=metadata_path, audio_root=audio_root)


_CORPUS_SUBJECTS = (
    "water dripping into a metal basin",
    "a crowd murmuring in a station hall",
    "gravel crunching under slow footsteps",
    "a door swinging on dry hinges",
    "rain drumming on a canvas tent",
    "a distant train crossing a bridge",
    "paper being torn into strips",
    "wind rattling loose window frames",
    "a kettle rising to a boil",
    "birds calling across a wet field",
    "a cart rolling over cobblestones",
    "chains dragging across concrete",
)

_CORPUS_OPENERS = (
    "Someone records", "In the distance,", "Up close,", "Throughout the clip,",
    "Softly at first,",
)


def write_toy_corpus(path: str | Path) -> Path:
    """Small caption table in the exemplar corpus format, for offline runs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["file_name"] + [f"caption_{i}" for i in range(1, 6)])
        for i, subject in enumerate(_CORPUS_SUBJECTS):
            captions = [
                f"{opener} {subject} continues steadily before fading out."
                for opener in _CORPUS_OPENERS
            ]
            writer.writerow([f"toy_{i:02d}.wav"] + captions)
    return path


# Published category names of the 50-class benchmark, in target-index order.
ESC50_CATEGORIES = (
    "dog", "rooster", "pig", "cow", "frog", "cat", "hen", "insects", "sheep",
    "crow", "rain", "sea_waves", "crackling_fire", "crickets",
    "chirping_birds", "water_drops", "wind", "pouring_water", "toilet_flush",
    "thunderstorm", "crying_baby", "sneezing", "clapping", "breathing",
    "coughing", "footsteps", "laughing", "brushing_teeth", "snoring",
    "drinking_sipping", "door_wood_knock", "mouse_click", "keyboard_typing",
    "door_wood_creaks", "can_opening", "washing_machine", "vacuum_cleaner",
    "clock_alarm", "clock_tick", "glass_breaking", "helicopter", "chainsaw",
    "siren", "car_horn", "engine", "train", "church_bells", "airplane",
    "fireworks", "hand_saw",
)

# Published structure of the 10-class urban dataset: per-class totals and
# per-fold sizes (they sum to 8732 each).
US8K_CLASSES = (
    ("air_conditioner", 1000),
    ("car_horn", 429),
    ("children_playing", 1000),
    ("dog_bark", 1000),
    ("drilling", 1000),
    ("engine_idling", 1000),
    ("gun_shot", 374),
    ("jackhammer", 1000),
    ("siren", 929),
    ("street_music", 1000),
)
US8K_FOLD_SIZES = (873, 888, 925, 990, 936, 823, 838, 806, 816, 837)


def write_esc50_style_metadata(path: str | Path) -> Path:
    """2000-row metadata: 50 classes x 5 folds x 8 clips per cell."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ESC50_HEADER)
        serial = 100000
        for target, category in enumerate(ESC50_CATEGORIES):
            for fold in range(1, 6):
                for take_index in range(8):
                    take = chr(ord("A") + take_index)
                    filename = f"{fold}-{serial}-{take}-{target}.wav"
                    writer.writerow(
                        [filename, fold, target, category, str(target < 10), serial, take]
                    )
                serial += 1
    return path


def write_us8k_style_metadata(path: str | Path, seed: int = 97) -> Path:
    """8732-row metadata with the published class and fold marginals.

    The joint (class, fold) assignment is a deterministic shuffle; only the
    marginals of the real dataset are reproduced, which is what the
    distribution-mirroring checks compare against.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    class_column: list[int] = []
    for class_id, (_, total) in enumerate(US8K_CLASSES):
        class_column.extend([class_id] * total)
    random.Random(seed).shuffle(class_column)
    fold_column: list[int] = []
    for fold, size in enumerate(US8K_FOLD_SIZES, start=1):
        fold_column.extend([fold] * size)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(US8K_HEADER)
        for i, (class_id, fold) in enumerate(zip(class_column, fold_column)):
            fs_id = 200000 + i
            writer.writerow(
                [
                    f"{fs_id}-{class_id}-0-0.wav",
                    fs_id,
                    0.0,
                    4.0,
                    1,
                    fold,
                    class_id,
                    US8K_CLASSES[class_id][0],
                ]
            )
    return path
