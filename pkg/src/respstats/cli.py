"""Command-line pipeline front-end.

Emits plot-ready JSON/CSV rather than rendered figures. All randomness
is controlled by --seed, and rerunning any subcommand with identical
flags produces byte-identical output files regardless of --threads.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import asymptote, dimensionality, gpd, kurtosis, matrix, synthetic
from .errors import RespstatsError

EXIT_CODES = "exit codes: 2 usage, 3 file/format, 4 degenerate or out-of-range data, 5 non-convergence"


def _fail(exc: RespstatsError):
    click.echo(f"error: {exc}", err=True)
    sys.exit(exc.exit_code)


def handles_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RespstatsError as exc:
            _fail(exc)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)

    return wrapper


def parse_sizes(text: str) -> list[int]:
    """Size lists as '100,1000,5000' or ranges as 'start:stop:step'
    (stop inclusive when hit exactly)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise click.BadParameter(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (int(p) for p in parts)
        if step <= 0 or stop < start:
            raise click.BadParameter(f"bad range {text!r}")
        return list(range(start, stop + 1, step))
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"bad size list {text!r}") from exc


def _write_json(payload, output: str):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output == "-":
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _write_csv(rows, output: str):
    if output == "-":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerows(rows)
    else:
        with open(output, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)


input_option = click.option(
    "--input", "-i", "input_path", required=True, type=click.Path(), help="Input matrix file."
)
format_option = click.option(
    "--format", "fmt", type=click.Choice(["auto", "csv", "binary"]), default="auto",
    help="Input matrix format (auto sniffs the binary magic).",
)
output_option = click.option(
    "--output", "-o", "output", default="-", help="Output path ('-' for stdout)."
)
seed_option = click.option("--seed", type=int, default=0, show_default=True, help="Base RNG seed.")


def _load(input_path, fmt):
    return matrix.load_matrix(input_path, None if fmt == "auto" else fmt)


@click.group(help=f"Response-matrix statistics pipeline. {EXIT_CODES}.")
@click.version_option()
def main():
    pass


@main.command(help="Kurtosis summary along one axis (selectivity or sparseness).")
@input_option
@format_option
@click.option("--axis", type=click.Choice(["neuron", "image"]), default="neuron", show_default=True)
@click.option("--normalized", is_flag=True, help="Divide each neuron by its mean response first.")
@click.option("--histogram-bins", type=int, default=30, show_default=True)
@output_option
@handles_errors
def stats(input_path, fmt, axis, normalized, histogram_bins, output):
    m = _load(input_path, fmt)
    if axis == "neuron":
        summary = kurtosis.selectivity_kurtosis(m)
        if normalized:
            # per-neuron normalization cannot change a column's kurtosis
            summary = dataclasses.replace(summary, normalized=True)
    else:
        summary = kurtosis.sparseness_kurtosis(m, normalized=normalized)
    _write_json(summary.to_json(histogram_bins=histogram_bins), output)


@main.command(help="Kurtosis vs dataset size with repeated subsampling.")
@input_option
@format_option
@click.option("--image-sizes", default=None, help="Sizes for the selectivity sweep (list or a:b:c).")
@click.option("--neuron-sizes", default=None, help="Sizes for the sparseness sweep (list or a:b:c).")
@click.option("--repeats", type=int, default=10, show_default=True)
@click.option("--normalized", is_flag=True)
@click.option("--threads", type=int, default=1, show_default=True)
@seed_option
@output_option
@handles_errors
def grid(input_path, fmt, image_sizes, neuron_sizes, repeats, normalized, threads, seed, output):
    m = _load(input_path, fmt)
    img = parse_sizes(image_sizes) if image_sizes else [m.n_stimuli]
    neu = parse_sizes(neuron_sizes) if neuron_sizes else [m.n_neurons]
    result = kurtosis.kurtosis_grid(
        m, img, neu, repeats=repeats, seed=seed, normalized=normalized, threads=threads
    )
    _write_csv(result.to_csv_rows(), output)


@main.command(help="Generalized-Pareto tail fits along one axis.")
@input_option
@format_option
@click.option("--axis", type=click.Choice(["neuron", "image"]), default="neuron", show_default=True)
@click.option("--normalized", is_flag=True, help="Normalize per neuron (dead neurons removed first).")
@click.option("--tail-fraction", type=float, default=gpd.DEFAULT_TAIL_FRACTION, show_default=True)
@click.option("--min-exceedances", type=int, default=gpd.DEFAULT_MIN_EXCEEDANCES, show_default=True)
@click.option("--histogram-out", default=None, help="Optional CSV histogram of tail indices.")
@click.option("--histogram-bins", type=int, default=30, show_default=True)
@seed_option
@output_option
@handles_errors
def tail(input_path, fmt, axis, normalized, tail_fraction, min_exceedances,
         histogram_out, histogram_bins, seed, output):
    m = _load(input_path, fmt)
    if normalized:
        m, _ = matrix.remove_dead_neurons(m)
    summary = gpd.tail_summary(
        m, axis=axis, normalized=normalized, tail_fraction=tail_fraction,
        min_count=min_exceedances, seed=seed,
    )
    _write_json(summary.to_json(), output)
    if histogram_out:
        _write_csv(summary.histogram_rows(bins=histogram_bins), histogram_out)


@main.command(help="Eigenvalue rank curves of the matrix and its reshuffled null.")
@input_option
@format_option
@click.option("--no-center", is_flag=True, help="Skip column mean-centering before PCA.")
@seed_option
@output_option
@handles_errors
def spectrum(input_path, fmt, no_center, seed, output):
    m = _load(input_path, fmt)
    est = dimensionality.estimate_id(m, seed=seed, center=not no_center)
    rows = [["rank", "original_eigenvalue", "shuffled_eigenvalue"]]
    orig = est.original_spectrum.eigenvalues
    shuf = est.shuffled_spectrum.eigenvalues
    for r in range(len(orig)):
        rows.append([r + 1, repr(float(orig[r])), repr(float(shuf[r]))])
    _write_csv(rows, output)


@main.command(help="Single intrinsic-dimensionality estimate with the reshuffle null.")
@input_option
@format_option
@click.option("--n-shuffles", type=int, default=1, show_default=True)
@click.option("--no-center", is_flag=True)
@click.option("--clean/--no-clean", default=True, show_default=True,
              help="Remove dead neurons before estimating.")
@seed_option
@output_option
@handles_errors
def iddim(input_path, fmt, n_shuffles, no_center, clean, seed, output):
    m = _load(input_path, fmt)
    removed = []
    if clean:
        m, removed = matrix.remove_dead_neurons(m)
    est = dimensionality.estimate_id(m, seed=seed, n_shuffles=n_shuffles, center=not no_center)
    _write_json(
        {
            "dimensionality": est.dimensionality,
            "n_components": est.original_spectrum.n_components,
            "seed": seed,
            "removed_dead_neurons": removed,
        },
        output,
    )


@main.command(help="Intrinsic-dimensionality surface over an (image, neuron) size grid.")
@input_option
@format_option
@click.option("--image-sizes", required=True, help="Image counts (list or a:b:c).")
@click.option("--neuron-sizes", required=True, help="Neuron counts (list or a:b:c).")
@click.option("--repeats", type=int, default=10, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@seed_option
@output_option
@handles_errors
def surface(input_path, fmt, image_sizes, neuron_sizes, repeats, threads, seed, output):
    m = _load(input_path, fmt)
    result = dimensionality.id_surface(
        m, parse_sizes(image_sizes), parse_sizes(neuron_sizes),
        repeats=repeats, seed=seed, threads=threads,
    )
    _write_csv(result.to_csv_rows(), output)


@main.command(help="Two-stage asymptotic dimensionality from a surface CSV, both fit orders.")
@click.option("--surface", "-s", "surface_path", required=True, type=click.Path(),
              help="Surface CSV produced by the surface subcommand.")
@click.option("--order", type=click.Choice(["neuron_then_image", "image_then_neuron", "both"]),
              default="both", show_default=True)
@click.option("--epsilon", type=float, default=0.02, show_default=True,
              help="Relative-RMSE restart target.")
@click.option("--max-restarts", type=int, default=200, show_default=True)
@seed_option
@output_option
@click.option("--table/--no-table", default=True, show_default=True,
              help="Also print a plain-text report table to stderr.")
@handles_errors
def extrapolate(surface_path, order, epsilon, max_restarts, seed, output, table):
    with open(surface_path, newline="", encoding="utf-8") as fh:
        surf = dimensionality.surface_from_csv_rows(list(csv.reader(fh)))
    cfg = asymptote.FitConfig(epsilon=epsilon, max_restarts=max_restarts, seed=seed)
    orders = (
        [asymptote.NEURON_THEN_IMAGE, asymptote.IMAGE_THEN_NEURON] if order == "both" else [order]
    )
    results = [asymptote.extrapolate_surface(surf, o, cfg) for o in orders]
    _write_json({res.order: res.to_json() for res in results}, output)
    if table:
        click.echo(asymptote.extrapolation_table(results), err=True)


@main.command(help="Generate a synthetic matrix with a known ground truth.")
@click.option("--kind", type=click.Choice(list(synthetic.KINDS)), required=True)
@click.option("--rows", type=int, required=True)
@click.option("--cols", type=int, required=True)
@click.option("--k", type=float, default=0.0, show_default=True, help="gpd_tail shape.")
@click.option("--sigma", type=float, default=1.0, show_default=True, help="gpd_tail scale.")
@click.option("--theta", type=float, default=0.0, show_default=True, help="gpd_tail threshold.")
@click.option("--scale", type=float, default=1.0, show_default=True, help="iid_* scale.")
@click.option("--rank", type=int, default=1, show_default=True, help="planted_rank rank.")
@click.option("--noise", type=float, default=0.0, show_default=True, help="planted_rank noise.")
@seed_option
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--out-format", type=click.Choice(["binary", "csv"]), default="binary", show_default=True)
@handles_errors
def synth(kind, rows, cols, k, sigma, theta, scale, rank, noise, seed, out_path, out_format):
    params = {}
    if kind == "gpd_tail":
        params = {"k": k, "sigma": sigma, "theta": theta}
    elif kind.startswith("iid_"):
        params = {"scale": scale}
    elif kind == "planted_rank":
        params = {"rank": rank, "noise": noise}
    spec = synthetic.SyntheticSpec(kind=kind, shape=(rows, cols), seed=seed, params=params)
    matrix.save_matrix(synthetic.generate(spec), out_path, out_format)


@main.command(help="Divide each neuron by its mean response.")
@input_option
@format_option
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--out-format", type=click.Choice(["binary", "csv"]), default="binary", show_default=True)
@handles_errors
def normalize(input_path, fmt, out_path, out_format):
    m = matrix.normalize_per_neuron(_load(input_path, fmt))
    matrix.save_matrix(m, out_path, out_format)


@main.command(help="Remove neurons that do not respond to any stimulus.")
@input_option
@format_option
@click.option("--tol", type=float, default=0.0, show_default=True,
              help="Absolute response magnitude treated as silent.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--out-format", type=click.Choice(["binary", "csv"]), default="binary", show_default=True)
@handles_errors
def clean(input_path, fmt, tol, out_path, out_format):
    m, removed = matrix.remove_dead_neurons(_load(input_path, fmt), tol=tol)
    matrix.save_matrix(m, out_path, out_format)
    click.echo(json.dumps({"removed_columns": removed}), err=True)


if __name__ == "__main__":
    main()
