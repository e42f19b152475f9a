"""Command-line surface.

Exit codes: 0 success, 1 metric precondition violated mid-run, 2 input or
configuration error. Every command is deterministic given its flags.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__, boxmetrics, maskmetrics
from .baselines import GaussianSpec, center_gaussian
from .dataio import ManifestError, load_manifest, write_scoremap
from .evaluate import EvalConfig, evaluate, load_box_records, load_mask_records, _grid_for
from .hparams import (
    filter_converged,
    kendall_tau,
    read_results_csv,
    sample_trials,
    space_for,
    trials_to_jsonl,
)
from .lemma import check_lemma_exhaustive

EXIT_PRECONDITION = 1
EXIT_INPUT = 2


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _config_from_flags(grid, exact_thresholds, connectivity, normalize, resize_order,
                       delta, threads) -> EvalConfig:
    deltas = tuple(float(x) for x in delta.split(","))
    return EvalConfig(grid_spacing=grid, exact_thresholds=exact_thresholds,
                      connectivity=connectivity, normalization=normalize,
                      resize_order=resize_order, deltas=deltas, threads=threads)


def _eval_options(f):
    opts = [
        click.option("--manifest", required=True, type=click.Path(), help="split manifest file"),
        click.option("--scoremaps", required=True, type=click.Path(), help="score-map directory"),
        click.option("--delta", default="0.5", show_default=True,
                      help="comma-separated IoU thresholds"),
        click.option("--grid", default=0.001, show_default=True, type=float,
                      help="threshold grid spacing"),
        click.option("--exact-thresholds", is_flag=True,
                      help="use the distinct score values as thresholds"),
        click.option("--connectivity", default=8, show_default=True, type=click.Choice(["4", "8"]),
                      callback=lambda c, p, v: int(v)),
        click.option("--normalize", default="minmax", show_default=True,
                      type=click.Choice(["minmax", "max", "none"])),
        click.option("--resize-order", default="calibrate-first", show_default=True,
                      type=click.Choice(["calibrate-first", "resize-first"])),
        click.option("--threads", default=1, show_default=True, type=int),
        click.option("--output", default=None, type=click.Path(), help="optional CSV output"),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


@click.group()
@click.version_option(__version__)
def main():
    """Threshold-independent evaluation for weakly-supervised localization."""


@main.command("evaluate")
@click.option("--metric", required=True, type=click.Choice(["maxboxacc", "maxboxaccv2", "pxap"]))
@_eval_options
def evaluate_cmd(metric, manifest, scoremaps, delta, grid, exact_thresholds, connectivity,
                 normalize, resize_order, threads, output):
    """Evaluate one metric over a manifest."""
    config = _config_from_flags(grid, exact_thresholds, connectivity, normalize,
                                resize_order, delta, threads)
    try:
        m = load_manifest(manifest)
    except (ManifestError, OSError) as e:
        _fail(EXIT_INPUT, str(e))
    try:
        report, curve = evaluate(m, scoremaps, metric, config)
    except (FileNotFoundError, ValueError) as e:
        _fail(EXIT_INPUT, str(e))
    click.echo(report.render(), nl=False)
    if output:
        csv = (maskmetrics.pr_curve_to_csv(curve) if metric == "pxap"
               else boxmetrics.curve_to_csv(curve))
        Path(output).write_text(csv)


@main.command("curve")
@click.option("--kind", required=True, type=click.Choice(["boxacc", "pr"]))
@_eval_options
def curve_cmd(kind, manifest, scoremaps, delta, grid, exact_thresholds, connectivity,
              normalize, resize_order, threads, output):
    """Emit a full BoxAcc-vs-tau or precision-recall curve as CSV."""
    config = _config_from_flags(grid, exact_thresholds, connectivity, normalize,
                                resize_order, delta, threads)
    try:
        m = load_manifest(manifest)
        if kind == "boxacc":
            records = load_box_records(m, scoremaps, config)
            g = _grid_for(records, config)
            curve = boxmetrics.box_acc(records, g, deltas=config.deltas,
                                       connectivity=config.connectivity, threads=config.threads)
            csv = boxmetrics.curve_to_csv(curve)
        else:
            records = load_mask_records(m, scoremaps, config)
            g = (maskmetrics.exact_grid(records) if config.exact_thresholds
                 else _grid_for(records, config))
            curve = maskmetrics.px_pr_curve(records, g, threads=config.threads)
            csv = maskmetrics.pr_curve_to_csv(curve)
    except (ManifestError, FileNotFoundError, ValueError, OSError) as e:
        _fail(EXIT_INPUT, str(e))
    if output:
        Path(output).write_text(csv)
    else:
        click.echo(csv, nl=False)


@main.command("sample-hparams")
@click.option("--method", required=True,
              type=click.Choice(["CAM", "HaS", "ACoL", "SPG", "ADL", "CutMix"]))
@click.option("--n", default=30, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--output", default=None, type=click.Path())
def sample_hparams_cmd(method, n, seed, output):
    """Sample hyperparameter trial configs (one JSON object per line)."""
    try:
        trials = sample_trials(space_for(method), n, seed)
    except ValueError as e:
        _fail(EXIT_INPUT, str(e))
    text = trials_to_jsonl(trials)
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command("rank-transfer")
@click.argument("results_a", type=click.Path(exists=True))
@click.argument("results_b", type=click.Path(exists=True))
@click.option("--include-nonconverged", is_flag=True,
              help="keep trials whose final loss exceeds the convergence limit")
def rank_transfer_cmd(results_a, results_b, include_nonconverged):
    """Kendall tau between two trial-result CSVs, joined on trial_id."""
    try:
        a = read_results_csv(Path(results_a).read_text())
        b = read_results_csv(Path(results_b).read_text())
    except (KeyError, ValueError) as e:
        _fail(EXIT_INPUT, f"bad results CSV: {e}")
    by_id_a = {r.trial_id: r for r in a}
    by_id_b = {r.trial_id: r for r in b}
    shared = sorted(set(by_id_a) & set(by_id_b))
    if not include_nonconverged:
        shared = [t for t in shared if by_id_a[t].converged and by_id_b[t].converged]
    if len(shared) < 2:
        _fail(EXIT_INPUT, "fewer than two shared (converged) trials")
    tau = kendall_tau([by_id_a[t].metric_value for t in shared],
                      [by_id_b[t].metric_value for t in shared])
    click.echo(f"n_trials {len(shared)}")
    click.echo(f"kendall_tau {tau:.6f}")


@main.command("lemma")
@click.option("--max-cues", default=5, show_default=True, type=int)
@click.option("--posterior-grid", default=9, show_default=True, type=int)
@click.option("--non-strict", is_flag=True,
              help="use the non-strict ratio condition at the equality boundary")
def lemma_cmd(max_cues, posterior_grid, non_strict):
    """Exhaustively check the perfect-threshold / posterior-ratio equivalence."""
    report = check_lemma_exhaustive(max_cues=max_cues, posterior_grid=posterior_grid,
                                    strict=not non_strict)
    click.echo(f"worlds_checked {report.worlds_checked}")
    click.echo(f"disagreements {report.disagreements}")
    for ce in report.counterexamples:
        click.echo(f"counterexample posteriors={ce['posteriors']} fg_labels={ce['fg_labels']}")


@main.command("center-baseline")
@click.option("--manifest", required=True, type=click.Path())
@click.option("--output-dir", required=True, type=click.Path())
@click.option("--sigma", default=1.0, show_default=True, type=float)
def center_baseline_cmd(manifest, output_dir, sigma):
    """Write a center-gaussian score map per manifest entry."""
    try:
        m = load_manifest(manifest)
    except (ManifestError, OSError) as e:
        _fail(EXIT_INPUT, str(e))
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for e in m.entries:
        s = center_gaussian(GaussianSpec(height=e.height, width=e.width, sigma=sigma))
        write_scoremap(out / f"{e.image_id}.wsm", s)
    click.echo(f"wrote {len(m.entries)} score maps to {out}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve_cmd(host, port):
    """Run the HTTP evaluation service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
