"""Figure rendering from the experiment CSV artifacts.

Four figure kinds, all read from the CSVs written by the `besovlab
reproduce` command (this package never imports besovlab itself):

* decay       initial v-distance vs 2^n, log-log, guide slope -1/2
              (from nonuniform.csv)
* lowerbound  evolved single-block distance vs t per n, guide slope 1
              (from nonuniform.csv)
* slopes      drift / remainder norms vs t with re-fitted exponents
              (from prop2.csv or prop3.csv)
* blocks      block-energy spectrogram of the key terms
              (from blocks.csv: column j plus one column per n)

The only numerics performed here is the log-log least-squares re-fit used
for slope annotations; it must agree with the fit recorded by the producer
(manifest.json) to 1e-9, which the test suite checks against committed
reference artifacts.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIGURE_KINDS = ("decay", "lowerbound", "slopes", "blocks")
FIGSIZE = (6.4, 4.2)


class MissingColumnError(KeyError):
    """The CSV lacks a column the figure kind requires."""


class EmptyCsvWarning(UserWarning):
    """The CSV has a header but no data rows; an empty figure is emitted."""


@dataclass
class PlotSpec:
    """One figure request: input CSV, figure kind, output image path."""

    csv_path: str
    kind: str
    out_path: str
    logx: bool = True
    logy: bool = True
    _columns: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {FIGURE_KINDS}")


def read_columns(path: str) -> dict[str, list[str]]:
    """CSV as a dict of raw string columns, keyed by header name."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MissingColumnError(f"{path}: no header row")
        cols: dict[str, list[str]] = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in reader.fieldnames:
                cols[name].append(row[name])
    return cols


def require(cols: dict, names: list[str], path: str) -> None:
    missing = [n for n in names if n not in cols]
    if missing:
        raise MissingColumnError(
            f"{path}: missing column(s) {', '.join(missing)}"
        )


def fit_power_law(xs, ys) -> tuple[float, float]:
    """Least-squares line in log-log; returns (exponent, intercept).

    Mirrors the producer's fit so the annotated slope can be compared
    against the recorded FitResult.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValueError("power-law fit needs at least 3 points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("power-law fit needs positive data")
    exponent, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(exponent), float(intercept)


def _guide_line(ax, xs, ys, slope, label):
    """Reference power-law guide anchored at the first data point."""
    xs = np.asarray(xs, dtype=float)
    anchor = ys[0]
    ax.plot(xs, anchor * (xs / xs[0]) ** slope, "k--", lw=0.8,
            label=label, zorder=1)


def _empty_figure(ax, path):
    warnings.warn(f"{path}: no data rows; emitting an empty figure",
                  EmptyCsvWarning, stacklevel=3)
    ax.text(0.5, 0.5, "no data", ha="center", va="center",
            transform=ax.transAxes)


def _group_by_n(cols):
    ns = [int(v) for v in cols["n"]]
    groups: dict[int, list[int]] = {}
    for i, n in enumerate(ns):
        groups.setdefault(n, []).append(i)
    return groups


def _render_decay(ax, cols, spec):
    require(cols, ["n", "init_distance_v"], spec.csv_path)
    groups = _group_by_n(cols)
    xs, ys = [], []
    for n in sorted(groups):
        xs.append(2.0**n)
        ys.append(float(cols["init_distance_v"][groups[n][0]]))
    ax.plot(xs, ys, "o-", label="initial distance in v")
    fits = {}
    if len(xs) >= 3:
        exponent, _ = fit_power_law(xs, ys)
        fits["init_distance_log2_slope"] = exponent
        ax.annotate(f"fitted slope {exponent:+.4f}", xy=(0.05, 0.08),
                    xycoords="axes fraction")
    _guide_line(ax, xs, ys, -0.5, "guide slope -1/2")
    ax.set_xlabel(r"$2^n$")
    ax.set_ylabel("initial distance")
    ax.set_title("Initial-distance decay")
    return fits


def _render_lowerbound(ax, cols, spec):
    require(cols, ["n", "t", "evolved_block_distance"], spec.csv_path)
    groups = _group_by_n(cols)
    for n in sorted(groups):
        rows = [i for i in groups[n] if float(cols["t"][i]) > 0]
        ts = [float(cols["t"][i]) for i in rows]
        ds = [float(cols["evolved_block_distance"][i]) for i in rows]
        ax.plot(ts, ds, "o-", label=f"n = {n}")
    all_rows = [i for i in range(len(cols["t"])) if float(cols["t"][i]) > 0]
    if all_rows:
        ts = sorted({float(cols["t"][i]) for i in all_rows})
        d0 = min(float(cols["evolved_block_distance"][i]) for i in all_rows)
        _guide_line(ax, ts, [d0 * 0.8] * len(ts), 1.0, "guide slope 1")
    ax.set_xlabel("t")
    ax.set_ylabel("single-block distance")
    ax.set_title("Evolved-distance lower bound")
    return {}


_SLOPE_COLUMNS = {
    "drift_sm2": "prop2_sm2_exponent",
    "drift_sm1": "prop2_sm1_exponent",
    "approx_remainder": "prop3_remainder_exponent",
}


def _render_slopes(ax, cols, spec):
    require(cols, ["n", "t"], spec.csv_path)
    present = [c for c in _SLOPE_COLUMNS if c in cols]
    if not present:
        raise MissingColumnError(
            f"{spec.csv_path}: none of {', '.join(_SLOPE_COLUMNS)} present"
        )
    fits = {}
    lines = []
    # fit on the reference corpus rows (n = -1) so the annotation matches
    # the producer's recorded exponents
    rows = [i for i in range(len(cols["t"]))
            if float(cols["t"][i]) > 0 and int(cols["n"][i]) == -1]
    for name in present:
        ts = [float(cols["t"][i]) for i in rows]
        ys = [float(cols[name][i]) for i in rows]
        pairs = [(t, y) for t, y in zip(ts, ys) if y > 0]
        if len(pairs) < 3:
            continue
        ts, ys = zip(*pairs)
        ax.plot(ts, ys, "o-", label=name)
        exponent, _ = fit_power_law(ts, ys)
        fits[_SLOPE_COLUMNS[name]] = exponent
        lines.append(f"{name}: {exponent:+.4f}")
    if lines:
        ax.annotate("\n".join(lines), xy=(0.05, 0.78), xycoords="axes fraction")
        ts = sorted({float(cols["t"][i]) for i in rows})
        floor = min(min((float(cols[c][i]) for i in rows
                         if float(cols[c][i]) > 0), default=1.0)
                    for c in present)
        _guide_line(ax, ts, [floor] * len(ts), 1.0, "guide slope 1")
        _guide_line(ax, ts, [floor * 0.5] * len(ts), 2.0, "guide slope 2")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title("Drift and remainder slopes")
    return fits


def _render_blocks(ax, cols, spec):
    require(cols, ["j"], spec.csv_path)
    series = [name for name in cols if name != "j"]
    if not series:
        raise MissingColumnError(f"{spec.csv_path}: no block-energy columns")
    js = [int(v) for v in cols["j"]]
    width = 0.8 / max(1, len(series))
    for k, name in enumerate(series):
        energies = [float(v) for v in cols[name]]
        pos = [j + (k - (len(series) - 1) / 2) * width for j in js]
        ax.bar(pos, energies, width=width, label=name)
    if spec.logy:
        ax.set_yscale("log")
    spec.logx = False  # block index axis is linear
    ax.set_xlabel("block index j")
    ax.set_ylabel("weighted block energy")
    ax.set_title("Key-term block energies")
    return {}


_RENDERERS = {
    "decay": _render_decay,
    "lowerbound": _render_lowerbound,
    "slopes": _render_slopes,
    "blocks": _render_blocks,
}


def render(spec: PlotSpec) -> dict[str, float]:
    """Render one figure to <out>.png and <out>.svg.

    Returns the re-fitted exponents used for annotations (may be empty),
    keyed by the producer's fit names.
    """
    cols = read_columns(spec.csv_path)
    n_rows = len(next(iter(cols.values()))) if cols else 0
    fig, ax = plt.subplots(figsize=FIGSIZE)
    try:
        if n_rows == 0:
            _empty_figure(ax, spec.csv_path)
            fits = {}
        else:
            fits = _RENDERERS[spec.kind](ax, cols, spec)
            if spec.logx:
                ax.set_xscale("log")
            if spec.logy and spec.kind != "blocks":
                ax.set_yscale("log")
            if ax.get_legend_handles_labels()[0]:
                ax.legend(fontsize=8)
        fig.tight_layout()
        base = spec.out_path
        for suffix in (".png", ".svg"):
            target = base if base.endswith(suffix) else base + suffix
            if base.endswith(".png") or base.endswith(".svg"):
                target = base.rsplit(".", 1)[0] + suffix
            fig.savefig(target, dpi=120)
    finally:
        plt.close(fig)
    return fits
