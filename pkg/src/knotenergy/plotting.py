"""Figure rendering and plot-script emission for sweep tables.

The CSV is the source of truth; the PNG is rendered directly from the
in-memory table, and the optional plot script is a standalone
matplotlib program that re-reads the CSV (never parsed back by this
package).
"""

from __future__ import annotations

import math

from .energy import SweepTable

_SCRIPT_TEMPLATE = '''#!/usr/bin/env python3
"""Render the alpha-sweep figure from {csv_path!r} (columns: alpha,curve,value,beta,n)."""
import csv
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

series = defaultdict(lambda: ([], []))
with open({csv_path!r}, newline="") as fh:
    for row in csv.DictReader(fh):
        xs, ys = series[row["curve"]]
        xs.append(float(row["alpha"]))
        ys.append(float(row["value"]))

fig, ax = plt.subplots(figsize=(6.0, 3.8))
for name, (xs, ys) in series.items():
    ax.plot(xs, ys, label=name)
ax.set_xlabel("alpha")
ax.set_ylabel("scaled energy")
ax.legend()
fig.tight_layout()
fig.savefig({png_path!r}, dpi=150)
'''


def render_sweep_figure(table: SweepTable, path) -> None:
    """Write a PNG of scaled energy vs alpha, one line per curve."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    for cid in table.curve_ids:
        alphas, values = table.column(cid)
        pts = [(a, v) for a, v in zip(alphas, values) if not math.isnan(v)]
        if pts:
            ax.plot([a for a, _ in pts], [v for _, v in pts], label=cid)
    ax.set_xlabel("alpha")
    ax.set_ylabel("scaled energy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_plot_script(csv_path: str, script_path, png_path: str | None = None) -> None:
    """Emit a standalone matplotlib script for the sweep CSV."""
    png = png_path or str(csv_path).rsplit(".", 1)[0] + ".png"
    with open(script_path, "w", encoding="utf-8") as fh:
        fh.write(_SCRIPT_TEMPLATE.format(csv_path=str(csv_path), png_path=png))
