"""Result rows, tables mirroring the benchmark layouts, and chart data."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import yaml

from ..errors import ConfigError


@dataclass
class ResultsRow:
    name: str
    label: str
    dataset_id: str
    mode: str
    strategies: tuple[str, ...]
    backends: tuple[str, ...]
    multiplier: int
    pooled_accuracy: float
    mean_fold_accuracy: float
    fingerprint: str

    @classmethod
    def from_report(cls, cfg, report) -> "ResultsRow":
        return cls(
            name=cfg.name,
            label=cfg.label(),
            dataset_id=cfg.dataset_id,
            mode=cfg.mode,
            strategies=tuple(s.value for s in cfg.strategies),
            backends=tuple(cfg.backends),
            multiplier=cfg.multiplier,
            pooled_accuracy=report.pooled_accuracy,
            mean_fold_accuracy=report.mean_fold_accuracy,
            fingerprint=cfg.fingerprint(),
        )

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(self), indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ResultsRow":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        payload["strategies"] = tuple(payload["strategies"])
        payload["backends"] = tuple(payload["backends"])
        return cls(**payload)


def collect_rows(run_dirs: list[str | Path]) -> list[ResultsRow]:
    rows = []
    for run_dir in run_dirs:
        row_path = Path(run_dir) / "row.json"
        if row_path.exists():
            rows.append(ResultsRow.load(row_path))
    return rows


def emit_report(
    rows: list[ResultsRow], out_dir: str | Path, charts: bool = False
) -> list[Path]:
    """Write the delimited results table, chart-ready series, optional charts."""
    if not rows:
        raise ValueError("no result rows to report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    table_path = out_dir / "results_table.csv"
    with table_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "name", "label", "dataset", "mode", "strategies", "backends",
                "multiplier", "pooled_accuracy", "mean_fold_accuracy", "fingerprint",
            ]
        )
        for row in sorted(rows, key=lambda r: (r.dataset_id, r.mode, r.label)):
            writer.writerow(
                [
                    row.name,
                    row.label,
                    row.dataset_id,
                    row.mode,
                    "+".join(row.strategies),
                    "+".join(row.backends),
                    row.multiplier,
                    f"{row.pooled_accuracy:.4f}",
                    f"{row.mean_fold_accuracy:.4f}",
                    row.fingerprint,
                ]
            )
    written.append(table_path)

    # Label-by-dataset pivot, the shape the benchmark tables use.
    datasets = sorted({r.dataset_id for r in rows})
    labels = sorted({r.label for r in rows})
    accuracy = {(r.label, r.dataset_id): r.pooled_accuracy for r in rows}
    pivot_path = out_dir / "results_pivot.csv"
    with pivot_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label"] + datasets)
        for label in labels:
            writer.writerow(
                [label]
                + [
                    f"{accuracy[(label, d)]:.4f}" if (label, d) in accuracy else ""
                    for d in datasets
                ]
            )
    written.append(pivot_path)

    # Multiplier-vs-accuracy series per backend for the scaling experiment.
    scaling = [r for r in rows if r.mode in ("replace", "augment") and len(r.backends) == 1]
    series_path = out_dir / "scaling_series.csv"
    with series_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "backend", "mode", "strategy", "multiplier", "accuracy"])
        for row in sorted(scaling, key=lambda r: (r.dataset_id, r.backends, r.mode, r.multiplier)):
            writer.writerow(
                [
                    row.dataset_id,
                    row.backends[0],
                    row.mode,
                    "+".join(row.strategies),
                    row.multiplier,
                    f"{row.pooled_accuracy:.4f}",
                ]
            )
    written.append(series_path)

    if charts:
        written.extend(_render_charts(rows, scaling, out_dir))
    return written


def _render_charts(rows: list[ResultsRow], scaling: list[ResultsRow], out_dir: Path) -> list[Path]:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise ConfigError(
            "chart rendering needs matplotlib (pip install promptsound[charts])"
        ) from exc
    written = []
    charts_dir = out_dir / "charts"
    charts_dir.mkdir(exist_ok=True)
    for dataset in sorted({r.dataset_id for r in rows}):
        subset = sorted(
            (r for r in rows if r.dataset_id == dataset), key=lambda r: r.pooled_accuracy
        )
        fig, ax = plt.subplots(figsize=(8, 0.5 * len(subset) + 1.5))
        ax.barh([r.label for r in subset], [r.pooled_accuracy for r in subset])
        ax.set_xlabel("accuracy")
        ax.set_xlim(0, 1)
        ax.set_title(f"{dataset}: accuracy by configuration")
        fig.tight_layout()
        path = charts_dir / f"{dataset}_accuracy.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

        per_backend: dict[tuple[str, str], list[ResultsRow]] = {}
        for r in scaling:
            if r.dataset_id == dataset:
                per_backend.setdefault((r.backends[0], r.mode), []).append(r)
        if per_backend:
            fig, ax = plt.subplots(figsize=(6, 4))
            for (backend, mode), members in sorted(per_backend.items()):
                members = sorted(members, key=lambda r: r.multiplier)
                ax.plot(
                    [m.multiplier for m in members],
                    [m.pooled_accuracy for m in members],
                    marker="o",
                    label=f"{backend} ({mode})",
                )
            ax.set_xlabel("multiplier")
            ax.set_ylabel("accuracy")
            ax.set_ylim(0, 1)
            ax.set_title(f"{dataset}: dataset scaling")
            ax.legend(fontsize=8)
            fig.tight_layout()
            path = charts_dir / f"{dataset}_scaling.png"
            fig.savefig(path, dpi=120)
            plt.close(fig)
            written.append(path)
    return written


def check_expected(rows: list[ResultsRow], expected_path: str | Path) -> list[dict]:
    """Compare full-scale run rows against the pinned regression targets."""
    payload = yaml.safe_load(Path(expected_path).read_text(encoding="utf-8"))
    tolerance = float(payload["tolerance"])
    by_key = {(r.dataset_id, r.label): r for r in rows}
    outcomes = []
    for target in payload["targets"]:
        key = (target["dataset"], target["label"])
        row = by_key.get(key)
        expected = float(target["accuracy"])
        outcome = {
            "dataset": key[0],
            "label": key[1],
            "expected": expected,
            "tolerance": tolerance,
            "actual": row.pooled_accuracy if row else None,
            "status": "missing",
        }
        if row is not None:
            outcome["status"] = (
                "ok" if abs(row.pooled_accuracy - expected) <= tolerance else "out-of-tolerance"
            )
        outcomes.append(outcome)
    return outcomes
