"""Static charts of the stage tables. Every function returns a matplotlib Figure."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.figure import Figure

from .ingest import WEEKDAY_NAMES

# one color per motif type 0..6; type 0 (disconnected) is gray
TYPE_COLORS = ("#9e9e9e", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
WEEKDAY_COLORS = plt.get_cmap("tab10").colors[:7]

RC = {
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 7,
    "ytick.labelsize": 7,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "mobmotif",
    "svg.fonttype": "none",
}


def _shade(ax, highlight):
    if highlight:
        start, length = highlight
        if length:
            ax.axvspan(start - 0.5, start + length - 0.5, color="0.85", zorder=0, lw=0)


def distribution_change(smoothed: np.ndarray, highlight=None) -> Figure:
    """Smoothed percent change of D_1..D_6, one line per motif type."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(7, 3.2))
        days = np.arange(len(smoothed))
        _shade(ax, highlight)
        for m in range(1, 7):
            ax.plot(days, smoothed[:, m - 1], color=TYPE_COLORS[m], lw=1.2, label=f"motif {m}")
        ax.axhline(0, color="k", lw=0.5)
        ax.set_xlabel("day")
        ax.set_ylabel("change vs. weekday baseline (%), 7-day mean")
        ax.legend(ncol=6, loc="lower left", frameon=False)
        fig.tight_layout()
    return fig


def distribution_panels(raw: np.ndarray, weekdays: np.ndarray, smoothed: np.ndarray, highlight=None) -> Figure:
    """Per-type panels: weekday and weekend raw change, plus the smoothed curve."""
    with plt.rc_context(RC):
        fig, axes = plt.subplots(2, 3, figsize=(9, 5), sharex=True)
        days = np.arange(len(raw))
        weekend = weekdays >= 5
        for m, ax in zip(range(1, 7), axes.flat):
            _shade(ax, highlight)
            y = raw[:, m - 1]
            ax.plot(days[~weekend], y[~weekend], "o", ms=2.5, color="0.3", label="weekday")
            ax.plot(days[weekend], y[weekend], "s", ms=2.5, color="tab:orange", label="weekend")
            ax.plot(days, smoothed[:, m - 1], color=TYPE_COLORS[m], lw=1.2, label="7-day mean")
            ax.axhline(0, color="k", lw=0.5)
            ax.set_title(f"motif {m}")
        axes[0, 0].legend(frameon=False)
        for ax in axes[1]:
            ax.set_xlabel("day")
        for ax in axes[:, 0]:
            ax.set_ylabel("change (%)")
        fig.tight_layout()
    return fig


def distribution_bars(distribution: np.ndarray, days: tuple[int, ...]) -> Figure:
    """Relative occurrence of the six motif types on selected days."""
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, len(days), figsize=(3.2 * len(days), 2.8), squeeze=False)
        for ax, d in zip(axes[0], days):
            ax.bar(range(1, 7), distribution[d], color=TYPE_COLORS[1:])
            ax.set_xticks(range(1, 7))
            ax.set_xlabel("motif type")
            ax.set_title(f"day {d}")
        axes[0, 0].set_ylabel("relative occurrence")
        fig.tight_layout()
    return fig


def persistence_diagrams(points: list[dict], t_days: int, include_censored: bool = False) -> Figure:
    """Birth vs. death per motif type; marker area ~ multiplicity, color = type converted to."""
    with plt.rc_context(RC):
        fig, axes = plt.subplots(2, 3, figsize=(9, 6), sharex=True, sharey=True)
        biggest = max((p["multiplicity"] for p in points), default=1)
        for m, ax in zip(range(1, 7), axes.flat):
            ax.plot([0, t_days], [0, t_days], color="k", lw=0.5)
            for target in range(7):
                sel = [p for p in points if p["type"] == m and not p["censored"] and p["death_target"] == target]
                if sel:
                    ax.scatter(
                        [p["birth"] for p in sel],
                        [p["death"] for p in sel],
                        s=[4 + 60 * p["multiplicity"] / biggest for p in sel],
                        color=TYPE_COLORS[target],
                        alpha=0.6,
                        lw=0,
                        label=f"to {target}",
                    )
            if include_censored:
                sel = [p for p in points if p["type"] == m and p["censored"]]
                if sel:
                    ax.scatter(
                        [p["birth"] for p in sel], [p["death"] for p in sel],
                        s=8, facecolors="none", edgecolors="k", lw=0.5, label="censored",
                    )
            ax.set_title(f"motif {m}")
            ax.set_xlim(-1, t_days + 1)
            ax.set_ylim(-1, t_days + 1)
        for ax in axes[1]:
            ax.set_xlabel("birth day")
        for ax in axes[:, 0]:
            ax.set_ylabel("death day")
        handles = [
            plt.Line2D([], [], marker="o", ls="", color=TYPE_COLORS[t], label=f"to motif {t}") for t in range(7)
        ]
        fig.legend(handles=handles, loc="lower center", ncol=7, frameon=False)
        fig.tight_layout(rect=(0, 0.05, 1, 1))
    return fig


def conversion_trends(frac: np.ndarray, weekdays: np.ndarray, highlight=None) -> Figure:
    """Rows: from-type 0..6. Column 0: all days colored by weekday; columns 1-7: one weekday each.

    Each line is one day's conversion profile (fraction converting to each type).
    Days inside the highlight window are drawn in red.
    """
    n_days = len(frac)
    marked = set()
    if highlight and highlight[1]:
        marked = set(range(highlight[0] - 1, highlight[0] + highlight[1]))
    with plt.rc_context(RC):
        fig, axes = plt.subplots(7, 8, figsize=(16, 14), sharex=True, sharey=True)
        x = np.arange(7)
        for i in range(7):
            for d in range(n_days):
                w = int(weekdays[d])
                y = frac[d, i]
                if np.isnan(y).all():
                    continue
                axes[i, 0].plot(x, y, color=WEEKDAY_COLORS[w], lw=0.6, alpha=0.6)
                hot = d in marked
                axes[i, w + 1].plot(
                    x, y, color="tab:red" if hot else "0.5", lw=1.0 if hot else 0.6, alpha=0.9 if hot else 0.5
                )
            axes[i, 0].set_ylabel(f"from motif {i}")
        axes[0, 0].set_title("all days")
        for w in range(7):
            axes[0, w + 1].set_title(WEEKDAY_NAMES[w])
        for ax in axes[-1]:
            ax.set_xticks(x)
            ax.set_xlabel("to motif")
        fig.tight_layout()
    return fig


def attribute_panels(values: dict[str, np.ndarray], ylabel: str, highlight=None) -> Figure:
    """Median volume and distance per motif type over time."""
    labels = {"volume": "travel volume (trips)", "distance_km": "distance (km)"}
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, 2, figsize=(10, 3.2))
        for ax, (attr, arr) in zip(axes, values.items()):
            _shade(ax, highlight)
            days = np.arange(len(arr))
            for m in range(1, 7):
                ax.plot(days, arr[:, m - 1], color=TYPE_COLORS[m], lw=1.1, label=f"motif {m}")
            ax.set_title(labels.get(attr, attr))
            ax.set_xlabel("day")
            ax.set_ylabel(ylabel)
        axes[0].legend(ncol=2, frameon=False)
        fig.tight_layout()
    return fig


def global_panels(metrics: dict[str, np.ndarray], highlight=None) -> Figure:
    names = [
        ("giant_component", "giant component (nodes)"),
        ("diameter", "diameter (hops)"),
        ("modularity", "modularity"),
        ("density", "density"),
        ("avg_degree", "average degree"),
    ]
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, 5, figsize=(15, 2.8))
        for ax, (key, label) in zip(axes, names):
            _shade(ax, highlight)
            ax.plot(metrics["day"], metrics[key], color="k", lw=1.0, marker="o", ms=2)
            ax.set_title(label)
            ax.set_xlabel("day")
        fig.tight_layout()
    return fig


def save(fig: Figure, path) -> None:
    with plt.rc_context(RC):
        fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
