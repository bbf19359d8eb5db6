"""Figures rendered next to a saved report: per-layer speedups and the
multiply-count ratio of each fast variant against the baseline.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .bench import BASELINE_VARIANT, VARIANTS, BenchRecord

_COLORS = {name: f"C{i}" for i, name in enumerate(VARIANTS)}


def _grouped_bars(ax, layers, series, ylabel):
    width = 0.8 / max(len(series), 1)
    idx = {name: i for i, name in enumerate(layers)}
    for pos, (variant, values) in enumerate(series.items()):
        xs = [idx[layer] + pos * width for layer in values]
        ax.bar(
            xs,
            list(values.values()),
            width=width,
            label=variant,
            color=_COLORS.get(variant),
        )
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(layers))])
    ax.set_xticklabels(layers, rotation=75, ha="right", fontsize=7)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)


def render_report_figures(
    records: Sequence[BenchRecord], out_path: Path
) -> list[Path]:
    """Write <stem>_speedup.png and <stem>_mac_ratio.png next to the
    report file.  Returns the created paths; empty when no fast-variant
    records exist to plot.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fast = [r for r in records if r.variant != BASELINE_VARIANT and r.layer != "TOTAL"]
    if not fast:
        return []
    base_macs = {
        r.layer: r.macs
        for r in records
        if r.variant == BASELINE_VARIANT and r.layer != "TOTAL"
    }
    layers = list(dict.fromkeys(r.layer for r in fast))
    speedups: dict[str, dict[str, float]] = {}
    ratios: dict[str, dict[str, float]] = {}
    for rec in fast:
        speedups.setdefault(rec.variant, {})[rec.layer] = rec.speedup
        if base_macs.get(rec.layer):
            ratios.setdefault(rec.variant, {})[rec.layer] = (
                rec.macs / base_macs[rec.layer]
            )

    out_path = Path(out_path)
    width = max(6.0, 0.35 * len(layers) + 2.0)
    made = []

    fig, ax = plt.subplots(figsize=(width, 4.5))
    _grouped_bars(ax, layers, speedups, "wall-clock speedup vs im2row")
    ax.axhline(1.0, color="gray", linewidth=0.8, linestyle="--")
    fig.tight_layout()
    path = out_path.with_name(out_path.stem + "_speedup.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    made.append(path)

    fig, ax = plt.subplots(figsize=(width, 4.5))
    _grouped_bars(ax, layers, ratios, "GEMM multiplies vs im2row")
    fig.tight_layout()
    path = out_path.with_name(out_path.stem + "_mac_ratio.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    made.append(path)
    return made
