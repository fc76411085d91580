"""Figure rendering for sweep reports.

Renders the same rows that go into the delimited output: one curve per
(metric, method) pair, with conventional styling for this kind of report --
analytic curves solid, deep-fade asymptotes dashed, Monte Carlo estimates as
markers with confidence-interval error bars, probabilities on a log axis.
Uses the non-interactive Agg backend so rendering works headless; figures are
written to files, never shown.
"""

from __future__ import annotations

import math
from collections import OrderedDict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import ParameterError

__all__ = ["render_rows"]

_METHOD_STYLE = {
    "analytic": dict(linestyle="-", marker=""),
    "asymptotic": dict(linestyle="--", marker=""),
    "quadrature": dict(linestyle=":", marker=""),
    "mc": dict(linestyle="", marker="o", markersize=4),
}


def render_rows(
    rows,
    path: str,
    *,
    x_label: str = "average SNR (dB)",
    y_label: str = "probability",
    title: str | None = None,
    logy: bool = True,
) -> str:
    """Render sweep rows to an image file; returns the path written.

    The file format follows the extension (png, pdf, svg, ...).
    """
    if not rows:
        raise ParameterError("nothing to plot: no rows")
    groups: "OrderedDict[tuple[str, str], list]" = OrderedDict()
    for r in sorted(rows, key=lambda r: r.sort_key):
        groups.setdefault((r.metric, r.method), []).append(r)

    metrics = list(OrderedDict.fromkeys(metric for metric, _ in groups))
    colors = plt.cm.tab10.colors
    color_of = {m: colors[i % len(colors)] for i, m in enumerate(metrics)}

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for (metric, method), rs in groups.items():
        xs = [r.x for r in rs]
        ys = [r.value for r in rs]
        style = dict(_METHOD_STYLE.get(method, dict(linestyle="-.")))
        style["color"] = color_of[metric]
        label = f"{metric} ({method})"
        if method == "mc" and any(
            not math.isnan(r.ci_low) and not math.isnan(r.ci_high) for r in rs
        ):
            lo = [max(r.value - r.ci_low, 0.0) for r in rs]
            hi = [max(r.ci_high - r.value, 0.0) for r in rs]
            ax.errorbar(xs, ys, yerr=[lo, hi], label=label, capsize=2.5, **style)
        else:
            ax.plot(xs, ys, label=label, **style)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
