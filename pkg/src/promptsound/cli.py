"""Command-line front end for the experiment pipeline.

Each experiment is one config file; the subcommands run one pipeline stage
or the whole chain. `run` exits zero only when every requested fold
completed evaluation.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import __version__
from .errors import PromptSoundError
from .experiments.config import ExperimentConfig, load_config
from .experiments.report import check_expected, collect_rows, emit_report
from .experiments.runner import ExperimentRunner
from .fixtures import build_toy_dataset, write_toy_corpus


def _pipeline_options(f):
    options = [
        click.option("--config", "config_path", required=True,
                     type=click.Path(exists=True, dir_okay=False), help="Experiment config file."),
        click.option("--mock-llm", is_flag=True, help="Use the deterministic offline LLM."),
        click.option("--mock-tta", is_flag=True,
                     help="Substitute tone synthesis for the configured audio backends."),
        click.option("--fixed-attributes", is_flag=True,
                     help="Use the fixed attribute schema instead of deriving one."),
        click.option("--folds", "folds_text", default=None,
                     help="Comma-separated fold subset, e.g. 1,2."),
        click.option("--out", "out_dir", default=None, type=click.Path(),
                     help="Override the config's output directory."),
        click.option("--seed", "seed", default=None, type=int, help="Override the RNG seed."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _build(config_path, mock_llm, mock_tta, fixed_attributes, out_dir, seed):
    cfg = load_config(config_path).with_overrides(
        out_dir=Path(out_dir) if out_dir else None, rng_seed=seed
    )
    runner = ExperimentRunner(
        cfg, mock_llm=mock_llm, mock_tta=mock_tta, fixed_attributes=fixed_attributes
    )
    return cfg, runner


def _parse_folds(folds_text: str | None, cfg: ExperimentConfig) -> list[int] | None:
    if folds_text is None:
        return None
    try:
        folds = sorted({int(f) for f in folds_text.split(",") if f.strip()})
    except ValueError:
        raise click.BadParameter(f"--folds must be integers, got {folds_text!r}") from None
    bad = [f for f in folds if not 1 <= f <= cfg.spec.n_folds]
    if bad:
        raise click.BadParameter(f"fold(s) {bad} outside 1..{cfg.spec.n_folds}")
    return folds


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )


@main.command()
@_pipeline_options
def captions(config_path, mock_llm, mock_tta, fixed_attributes, folds_text, out_dir, seed):
    """Generate caption sets for the configured strategies."""
    cfg, runner = _build(config_path, mock_llm, mock_tta, fixed_attributes, out_dir, seed)
    if cfg.mode == "baseline":
        click.echo("baseline mode has no captions to generate")
        return
    try:
        produced = runner.caption_stage()
    except PromptSoundError as exc:
        raise click.ClickException(str(exc)) from exc
    for strategy, records in produced.items():
        click.echo(f"{strategy.value}: {len(records)} captions")


@main.command()
@_pipeline_options
def generate(config_path, mock_llm, mock_tta, fixed_attributes, folds_text, out_dir, seed):
    """Generate audio for every caption (captions stage runs first if needed)."""
    cfg, runner = _build(config_path, mock_llm, mock_tta, fixed_attributes, out_dir, seed)
    if cfg.mode == "baseline":
        click.echo("baseline mode has nothing to generate")
        return
    try:
        produced = runner.caption_stage()
        runner.generation_stage(produced)
    except PromptSoundError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo("generation complete")


@main.command()
@_pipeline_options
def assemble(config_path, mock_llm, mock_tta, fixed_attributes, folds_text, out_dir, seed):
    """Build and persist the training manifest for the configured mode."""
    cfg, runner = _build(config_path, mock_llm, mock_tta, fixed_attributes, out_dir, seed)
    try:
        produced = runner.caption_stage() if cfg.mode != "baseline" else {}
        manifest = runner.assemble_stage(produced)
    except PromptSoundError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"assembled {len(manifest)} entries -> {cfg.out_dir / 'manifests'}")


@main.command()
@_pipeline_options
def train(config_path, mock_llm, mock_tta, fixed_attributes, folds_text, out_dir, seed):
    """Train and evaluate folds (results cached per fold for resumption)."""
    cfg, runner = _build(config_path, mock_llm, mock_tta, fixed_attributes, out_dir, seed)
    folds = _parse_folds(folds_text, cfg)
    try:
        produced = runner.caption_stage() if cfg.mode != "baseline" else {}
        manifest = runner.assemble_stage(produced)
        report = runner.evaluate_stage(manifest, folds)
    except PromptSoundError as exc:
        raise click.ClickException(str(exc)) from exc
    for result in report.fold_results:
        click.echo(
            f"fold {result.fold}: accuracy {result.accuracy:.4f} "
            f"({result.n_correct}/{result.n_test}, {result.epochs_run} epochs)"
        )


@main.command()
@_pipeline_options
def evaluate(config_path, mock_llm, mock_tta, fixed_attributes, folds_text, out_dir, seed):
    """Assemble the evaluation report from cached fold results."""
    cfg, runner = _build(config_path, mock_llm, mock_tta, fixed_attributes, out_dir, seed)
    folds = _parse_folds(folds_text, cfg)
    try:
        produced = runner.caption_stage() if cfg.mode != "baseline" else {}
        manifest = runner.assemble_stage(produced)
        report = runner.evaluate_stage(manifest, folds)
    except PromptSoundError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(
        f"{cfg.label()}: pooled accuracy {report.pooled_accuracy:.4f}, "
        f"mean of folds {report.mean_fold_accuracy:.4f}"
    )


@main.command()
@_pipeline_options
def run(config_path, mock_llm, mock_tta, fixed_attributes, folds_text, out_dir, seed):
    """Run the whole pipeline; exit 0 only if all requested folds completed."""
    cfg, runner = _build(config_path, mock_llm, mock_tta, fixed_attributes, out_dir, seed)
    folds = _parse_folds(folds_text, cfg)
    try:
        report, row = runner.run(folds)
    except PromptSoundError as exc:
        raise click.ClickException(str(exc)) from exc
    requested = set(folds or range(1, cfg.spec.n_folds + 1))
    completed = {r.fold for r in report.fold_results}
    click.echo(
        f"{row.label} [{row.fingerprint}]: pooled accuracy {report.pooled_accuracy:.4f} "
        f"over folds {sorted(completed)}"
    )
    if not requested.issubset(completed):
        missing = sorted(requested - completed)
        raise click.ClickException(f"fold(s) {missing} did not complete")


@main.command()
@click.argument("run_dirs", nargs=-1, required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Report directory.")
@click.option("--charts", is_flag=True, help="Render bar/scaling charts (needs matplotlib).")
@click.option("--check-expected", "expected_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Compare rows against a pinned expected-values file.")
@click.option("--strict", is_flag=True, help="Exit non-zero if any pinned target misses.")
def report(run_dirs, out_dir, charts, expected_path, strict):
    """Aggregate finished runs into result tables and chart data."""
    rows = collect_rows(list(run_dirs))
    if not rows:
        raise click.ClickException("no row.json found under the given run directories")
    try:
        written = emit_report(rows, out_dir, charts=charts)
    except (ValueError, PromptSoundError) as exc:
        raise click.ClickException(str(exc)) from exc
    for path in written:
        click.echo(f"wrote {path}")
    if expected_path:
        outcomes = check_expected(rows, expected_path)
        for outcome in outcomes:
            click.echo(
                f"[{outcome['status']}] {outcome['dataset']} / {outcome['label']}: "
                f"expected {outcome['expected']:.2f} +- {outcome['tolerance']:.2f}, "
                f"actual {outcome['actual'] if outcome['actual'] is not None else 'n/a'}"
            )
        if strict and any(o["status"] != "ok" for o in outcomes):
            raise click.ClickException("expected-value check failed")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Fixture directory.")
@click.option("--classes", default=4, show_default=True)
@click.option("--clips-per-class", default=8, show_default=True)
@click.option("--folds", default=2, show_default=True)
@click.option("--duration", default=2.0, show_default=True)
@click.option("--seed", default=1234, show_default=True)
def fixture(out_dir, classes, clips_per_class, folds, duration, seed):
    """Materialize the tone-conditioned fixture dataset and a toy corpus."""
    out = Path(out_dir)
    toy = build_toy_dataset(
        out,
        n_classes=classes,
        clips_per_class=clips_per_class,
        n_folds=folds,
        duration=duration,
        seed=seed,
    )
    corpus_path = write_toy_corpus(out / "corpus.csv")
    click.echo(
        json.dumps(
            {
                "metadata": str(toy.metadata_path),
                "audio_root": str(toy.audio_root),
                "corpus": str(corpus_path),
                "classes": toy.spec.n_classes,
                "folds": toy.spec.n_folds,
                "total": toy.spec.expected_total,
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
