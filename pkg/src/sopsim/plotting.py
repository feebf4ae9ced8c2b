"""Render sweep/figure CSV output as a log-scale outage plot.

One PNG per CSV, written alongside the delimited output.  Curves are
grouped by (scheme, method, variant); simulated rows are drawn as markers
over the analytic lines, mirroring the usual outage-curve presentation.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

__all__ = ["render_csv_plot", "parse_csv_rows"]


def parse_csv_rows(text: str) -> tuple[list[dict], dict]:
    """Parse an emitted CSV back into row dicts plus the `#` metadata."""
    meta = {}
    body_lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
        elif line.strip():
            body_lines.append(line)
    reader = csv.DictReader(io.StringIO("\n".join(body_lines)))
    return list(reader), meta


def render_csv_plot(csv_text: str, png_path: str, title: Optional[str] = None) -> None:
    rows, _ = parse_csv_rows(csv_text)
    if not rows:
        raise ValueError("no rows to plot")
    axis_col = next(k for k in rows[0] if k.startswith("axis_value"))
    axis_label = (
        "average destination SNR (dB)" if axis_col.endswith("db") else "secrecy rate (bpcu)"
    )

    curves = defaultdict(list)
    for row in rows:
        if not row["status"].startswith(("ok", "low_confidence")):
            continue
        if not row["value"]:
            continue
        key = (row["scheme"], row["method"], row["variant"])
        curves[key].append((float(row[axis_col]), float(row["value"])))

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for (scheme, method, variant), pts in sorted(curves.items()):
        pts.sort()
        xs = [x for x, _ in pts]
        ys = [max(y, 1e-300) for _, y in pts]
        label = " ".join(filter(None, (scheme, method, variant)))
        if method == "simulated":
            ax.semilogy(xs, ys, linestyle="none", marker="o", markersize=4, label=label)
        else:
            ax.semilogy(xs, ys, label=label)
    ax.set_xlabel(axis_label)
    ax.set_ylabel("secrecy outage probability")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
