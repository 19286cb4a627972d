"""Figure construction for the three belltomo CSV kinds.

scan: counts versus analyzer angle, one errorbar series per input file with
its theory curve overlaid. sweep: per input series, a column of two stacked
panels (average fidelity on top, average concurrence below) against sigma.
comparison: a single two-panel column with all series overlaid, keyed by
scenario_id. Concurrence panels carry a horizontal guide at 1/sqrt(2), the
threshold above which a CHSH violation is guaranteed.

Outputs are regenerated deterministically: fixed figure sizes, a fixed SVG
hash salt and no date metadata. Data points are plotted exactly as read.
"""
import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from figs.schema import read_per_sigma_csv, read_scan_csv

KINDS = ("scan", "sweep", "comparison")
CHSH_LIMIT = 1.0 / math.sqrt(2.0)
_RC = {"svg.hashsalt": "figs", "figure.max_open_warning": 0}


@dataclass(frozen=True)
class FigureSpec:
    """One rendering job: kind, input CSVs, output image, optional labels.

    labels are free-form; the first one, when present, becomes the title.
    """

    kind: str
    input_paths: tuple[str, ...]
    output_path: str
    labels: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}, expected one of {KINDS}")
        if not self.input_paths:
            raise ValueError("input_paths must not be empty")
        if not self.output_path:
            raise ValueError("output_path must not be empty")


def _series_name(path):
    return os.path.splitext(os.path.basename(path))[0]


def _check_inputs(spec):
    for path in spec.input_paths:
        if not os.path.isfile(path):
            raise FileNotFoundError(f"input CSV not found: {path}")


def _add_chsh_line(ax):
    ax.axhline(CHSH_LIMIT, color="0.4", linestyle="--", linewidth=1.0, label="CHSH threshold 1/√2")


def _build_scan(spec):
    fig = plt.figure(figsize=(7.0, 4.5))
    ax = fig.subplots()
    for path in spec.input_paths:
        table = read_scan_csv(path)
        name = _series_name(path)
        ax.errorbar(
            table.theta, table.mean_count, yerr=table.std_count,
            fmt="o", markersize=4, capsize=3, label=name,
        )
        ax.plot(table.theta, table.theory_count, "-", linewidth=1.2, label=f"{name} theory")
    ax.set_xlabel("analyzer angle θ (rad)")
    ax.set_ylabel("coincidence counts")
    ax.legend()
    return fig


def _sweep_panel(ax, sigma, mean, std, label):
    ax.errorbar(sigma, mean, yerr=std, fmt="o-", markersize=4, capsize=3, linewidth=1.0, label=label)


def _build_sweep(spec):
    columns = []
    for path in spec.input_paths:
        columns.extend(read_per_sigma_csv(path))
    fig = plt.figure(figsize=(0.5 + 4.0 * len(columns), 7.0))
    axes = fig.subplots(2, len(columns), sharex=True, squeeze=False)
    for col, series in enumerate(columns):
        ax_f, ax_c = axes[0][col], axes[1][col]
        _sweep_panel(ax_f, series.sigma, series.f_mean, series.f_std, series.scenario_id)
        _sweep_panel(ax_c, series.sigma, series.c_mean, series.c_std, series.scenario_id)
        _add_chsh_line(ax_c)
        ax_f.set_title(series.scenario_id)
        ax_f.set_ylabel("average fidelity")
        ax_c.set_ylabel("average concurrence")
        ax_c.set_xlabel("σ (rad)")
    return fig


def _build_comparison(spec):
    fig = plt.figure(figsize=(7.0, 7.0))
    axes = fig.subplots(2, 1, sharex=True)
    ax_f, ax_c = axes
    for path in spec.input_paths:
        for series in read_per_sigma_csv(path):
            _sweep_panel(ax_f, series.sigma, series.f_mean, series.f_std, series.scenario_id)
            _sweep_panel(ax_c, series.sigma, series.c_mean, series.c_std, series.scenario_id)
    _add_chsh_line(ax_c)
    ax_f.set_ylabel("average fidelity")
    ax_c.set_ylabel("average concurrence")
    ax_c.set_xlabel("σ (rad)")
    ax_f.legend()
    ax_c.legend()
    return fig


_BUILDERS = {"scan": _build_scan, "sweep": _build_sweep, "comparison": _build_comparison}


def build_figure(spec):
    """Construct the matplotlib Figure for a spec without saving it."""
    _check_inputs(spec)
    fig = _BUILDERS[spec.kind](spec)
    if spec.labels:
        fig.suptitle(spec.labels[0])
    fig.set_layout_engine("tight")
    return fig


def render(spec, raster=False):
    """Render a FigureSpec to spec.output_path; SVG by default, PNG on raster.

    Returns the output path. The SVG writer gets a fixed hash salt and no
    date metadata so repeated runs are byte-identical.
    """
    with plt.rc_context(_RC):
        fig = build_figure(spec)
        try:
            if raster:
                fig.savefig(spec.output_path, format="png", dpi=150)
            else:
                fig.savefig(spec.output_path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return spec.output_path
