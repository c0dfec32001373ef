"""Figure renderers for the three experiment CSV shapes.

Style choices (colors, markers, panel layout) are our own; the axes, scales
and series structure follow the source figures: log-x step trajectories,
log-y medians over n, and normalized runtimes against the truncation point.
Rendering is deterministic for a fixed matplotlib version: identical CSV
bytes yield identical image bytes.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .io import read_median, read_normalized, read_trace

_DPI = 150


def _save(fig, out_path: str):
    if out_path.lower().endswith(".pdf"):
        # strip the creation timestamp so repeated renders are byte-identical
        fig.savefig(out_path, metadata={"CreationDate": None})
    else:
        fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)


def _label_from(path: str) -> str:
    stem = os.path.splitext(os.path.basename(path))[0]
    return stem.removeprefix("trace_") or stem


def _level_changes(rows):
    """Drop rows that repeat the previous fitness levels, keep first and last.

    The trace is a step function; only level changes carry geometry.  This
    makes a densely sampled trace render byte-identically to a compacted one
    (extra collinear vertices would otherwise perturb rasterization).
    """
    kept = [rows[0]]
    for r in rows[1:-1]:
        prev = kept[-1]
        if (r["om"], r["distortion"], r["total"]) != (prev["om"], prev["distortion"], prev["total"]):
            kept.append(r)
    if len(rows) > 1:
        kept.append(rows[-1])
    return kept


def render_trajectory(trace_paths, out_path: str, cutoff: float | None = None):
    """One panel per trace: total, OneMax part and distortion vs generation.

    Step plot (post) over the level changes, so a compacted trace renders
    identically to a dense one.  The x-axis is logarithmic; generation 0 is
    drawn at x=1.  When ``cutoff`` is given and a trace ends there, the end
    is annotated with a cutoff marker instead of a target marker.
    """
    traces = [(path, _level_changes(read_trace(path))) for path in trace_paths]
    fig, axes = plt.subplots(
        1, len(traces), figsize=(5.0 * len(traces), 3.6), sharey=True, squeeze=False
    )
    for ax, (path, rows) in zip(axes[0], traces):
        xs = [max(r["generation"], 1) for r in rows]
        for key, color in (("total", "tab:blue"), ("om", "tab:green"), ("distortion", "tab:red")):
            ax.plot(
                xs,
                [r[key] for r in rows],
                drawstyle="steps-post",
                color=color,
                label=key,
                linewidth=1.2,
            )
        final = rows[-1]
        censored = cutoff is not None and final["generation"] >= cutoff
        if censored:
            ax.axvline(max(final["generation"], 1), color="gray", linestyle="--", linewidth=1.0)
            ax.annotate(
                "cutoff",
                (max(final["generation"], 1), final["total"]),
                textcoords="offset points",
                xytext=(-30, 6),
                color="gray",
            )
        else:
            ax.plot([max(final["generation"], 1)], [final["total"]], "k*", markersize=9)
        ax.set_xscale("log")
        ax.set_xlabel("generation")
        ax.set_title(_label_from(path))
        ax.legend(loc="center left", fontsize=8)
    axes[0][0].set_ylabel("fitness")
    fig.tight_layout()
    _save(fig, out_path)
    return fig


def render_median(median_path: str, out_path: str):
    """Median generations vs n, one line per (algorithm, distribution), log-y.

    Cells with censored runs are additionally marked with an x at the cutoff.
    """
    rows = read_median(median_path)
    series: dict[tuple[str, str], list[dict]] = {}
    for r in rows:
        series.setdefault((r["algorithm"], r["distribution"]), []).append(r)
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for (algorithm, distribution) in sorted(series):
        cells = sorted(series[(algorithm, distribution)], key=lambda r: r["n"])
        ax.plot(
            [c["n"] for c in cells],
            [c["median_generations"] for c in cells],
            marker="o",
            markersize=4,
            linewidth=1.2,
            label=f"{algorithm}, {distribution}",
        )
        censored = [c for c in cells if c["censored"] > 0]
        if censored:
            ax.scatter(
                [c["n"] for c in censored],
                [c["cutoff"] for c in censored],
                marker="x",
                s=45,
                color="black",
                zorder=5,
            )
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("median generations")
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, out_path)
    return fig


def render_normalized(normalized_path: str, out_path: str, logy: bool = False):
    """Normalized runtime vs truncation point, one line per p."""
    rows = read_normalized(normalized_path)
    series: dict[float, list[dict]] = {}
    for r in rows:
        series.setdefault(r["p"], []).append(r)
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for p in sorted(series):
        cells = sorted(series[p], key=lambda r: r["cutoff_d"])
        ax.plot(
            [c["cutoff_d"] for c in cells],
            [c["normalized"] for c in cells],
            marker="s",
            markersize=4,
            linewidth=1.2,
            label=f"p = {p:g}",
        )
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("truncation point d")
    ax.set_ylabel("generations * p * Pr[D >= d]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, out_path)
    return fig
