#!/usr/bin/env python3
"""Regenerate the full experiment grid under experiments/grid/.

One YAML per results-table row: replacement and augmentation for every
(strategy, backend, dataset), the x2/x3/x4 scaling runs, every prompt-mix
combination, the model mixes, and the two baselines. Paths assume the
layout documented in the README (data/esc50, data/us8k, data/clotho).
"""

from __future__ import annotations

from itertools import combinations
from pathlib import Path

import yaml

GRID_DIR = Path(__file__).parent / "grid"

DATASETS = {
    "esc50": {"metadata": "../../data/esc50/meta/esc50.csv", "audio_root": "../../data/esc50/audio"},
    "us8k": {"metadata": "../../data/us8k/metadata/UrbanSound8K.csv", "audio_root": "../../data/us8k/audio"},
}
STRATEGIES = ["BSC", "STR", "EXE"]
BACKENDS = ["stable-audio-open", "audiogen"]
BACKEND_SHORT = {"stable-audio-open": "sa", "audiogen": "ag"}
CORPUS = "../../data/clotho/clotho_captions.csv"


def config(name: str, dataset: str, mode: str, strategies=None, backends=None,
           multiplier: int = 1, include_real: bool = False) -> dict:
    cfg: dict = {
        "name": name,
        "dataset": {"id": dataset, **DATASETS[dataset]},
        "mode": mode,
        "paths": {
            "out": f"../../runs/{name}",
            "generated_root": "../../generated",
            "cache_dir": "../../.cache/llm",
        },
        "rng_seed": 0,
    }
    if strategies:
        cfg["strategies"] = list(strategies)
        if "EXE" in strategies:
            cfg["paths"]["corpus"] = CORPUS
    if backends:
        cfg["backends"] = list(backends)
    if multiplier != 1:
        cfg["multiplier"] = multiplier
    if include_real:
        cfg["include_real"] = True
    return cfg


def grid() -> list[dict]:
    configs = []
    for dataset in DATASETS:
        configs.append(config(f"{dataset}-baseline", dataset, "baseline"))
        for backend in BACKENDS:
            short = BACKEND_SHORT[backend]
            for strategy in STRATEGIES:
                slug = strategy.lower()
                configs.append(
                    config(f"{dataset}-{short}-{slug}-x1", dataset, "replace",
                           [strategy], [backend])
                )
                configs.append(
                    config(f"{dataset}-{short}-{slug}-x1-org", dataset, "augment",
                           [strategy], [backend])
                )
            # Scaling sweep uses the exemplar strategy only.
            for multiplier in (2, 3, 4):
                configs.append(
                    config(f"{dataset}-{short}-exe-x{multiplier}", dataset, "replace",
                           ["EXE"], [backend], multiplier=multiplier)
                )
                configs.append(
                    config(f"{dataset}-{short}-exe-x{multiplier}-org", dataset, "augment",
                           ["EXE"], [backend], multiplier=multiplier)
                )
            for size in (2, 3):
                for mix in combinations(STRATEGIES, size):
                    slug = "-".join(s.lower() for s in mix)
                    configs.append(
                        config(f"{dataset}-{short}-mix-{slug}", dataset, "prompt-mix",
                               list(mix), [backend])
                    )
            configs.append(
                config(f"{dataset}-{short}-mix-bsc-str-exe-org", dataset, "prompt-mix",
                       STRATEGIES, [backend], include_real=True)
            )
        for strategy in ("EXE", "STR"):
            slug = strategy.lower()
            configs.append(
                config(f"{dataset}-modelmix-{slug}", dataset, "model-mix",
                       [strategy], BACKENDS)
            )
            configs.append(
                config(f"{dataset}-modelmix-{slug}-org", dataset, "model-mix",
                       [strategy], BACKENDS, include_real=True)
            )
    return configs


def main() -> None:
    GRID_DIR.mkdir(exist_ok=True)
    configs = grid()
    for cfg in configs:
        path = GRID_DIR / f"{cfg['name']}.yaml"
        path.write_text(yaml.safe_dump(cfg, sort_keys=False), encoding="utf-8")
    print(f"wrote {len(configs)} configs to {GRID_DIR}")


if __name__ == "__main__":
    main()
