"""Deterministic SVG figures: scalogram heatmap, climatology and coefficients."""

from __future__ import annotations

import io
from typing import TYPE_CHECKING

import matplotlib as mpl
import numpy as np
from matplotlib.cm import ScalarMappable
from matplotlib.colors import Normalize
from matplotlib.figure import Figure
from matplotlib.patches import Rectangle

from src.utils import MONTH_NAMES

if TYPE_CHECKING:
    from src.task.dwt import Decomposition
    from src.task.periods import ClimatologyProfile
    from src.task.scalogram import ScalogramMatrix
    from src.task.shrinkage import ShrinkageReport

SVG_RC = {"svg.hashsalt": "wavelet-rainfall-periods", "svg.fonttype": "none"}
PALETTE = "gray"  # black = lowest |W|, white = highest


def _svg_string(fig: Figure) -> str:
    buf = io.StringIO()
    with mpl.rc_context(SVG_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def _log2_edges(scales: np.ndarray) -> np.ndarray:
    centres = np.log2(scales)
    if len(centres) == 1:
        return np.array([centres[0] - 0.5, centres[0] + 0.5])
    mids = (centres[1:] + centres[:-1]) / 2
    first = centres[0] - (mids[0] - centres[0])
    last = centres[-1] + (centres[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def render_heatmap_svg(m: ScalogramMatrix, palette: str = PALETTE) -> str:
    """Render |W| as a scale x translation heatmap.

    Cell (i, j) is a rectangle with id `cell-i-j`; luminance increases with |W|.

    Raises:
        ValueError: for an empty matrix or non-finite values.

    """
    values = np.asarray(m.values, dtype=float)
    if values.size == 0:
        msg = "cannot render an empty scalogram"
        raise ValueError(msg)
    if not np.all(np.isfinite(values)):
        msg = "cannot render non-finite scalogram values"
        raise ValueError(msg)

    magnitude = np.abs(values)
    norm = Normalize(0.0, float(magnitude.max()) or 1.0)
    cmap = mpl.colormaps[palette]
    y_edges = _log2_edges(np.asarray(m.grid.scales, dtype=float))
    b = np.asarray(m.grid.translations, dtype=float)

    fig = Figure(figsize=(10, 4))
    ax = fig.add_subplot()
    for i in range(magnitude.shape[0]):
        for j in range(magnitude.shape[1]):
            ax.add_patch(
                Rectangle(
                    (b[j] - 0.5, y_edges[i]),
                    1.0,
                    y_edges[i + 1] - y_edges[i],
                    facecolor=cmap(norm(magnitude[i, j])),
                    edgecolor="none",
                    linewidth=0,
                    gid=f"cell-{i}-{j}",
                ),
            )
    ax.set_xlim(b.min() - 0.5, b.max() + 0.5)
    ax.set_ylim(y_edges[0], y_edges[-1])
    ax.set_yticks(np.log2(m.grid.scales), [f"{a:g}" for a in m.grid.scales])
    ax.set_xlabel("Translation b (month)")
    ax.set_ylabel("Scale a (month)")
    ax.set_title(f"Scalogram |W(a, b)|, {m.wavelet}")
    fig.colorbar(ScalarMappable(norm=norm, cmap=cmap), ax=ax, label="|W|")
    return _svg_string(fig)


def render_climatology_svg(profile: ClimatologyProfile) -> str:
    """Render the 12-month climatology as a line chart with its peaks marked."""
    months = np.arange(1, 13)
    values = np.asarray(profile.values, dtype=float)

    fig = Figure(figsize=(8, 4))
    ax = fig.add_subplot()
    ax.plot(months, values, color="black", marker="o", gid="climatology")
    if profile.peak_months:
        peaks = np.asarray(profile.peak_months)
        ax.plot(
            peaks,
            values[peaks - 1],
            linestyle="none",
            marker="^",
            markersize=10,
            color="tab:blue",
            gid="peaks",
        )
    ax.set_xticks(months, [name[:3] for name in MONTH_NAMES])
    ax.set_xlabel("Month")
    ax.set_ylabel(f"Rainfall, {profile.aggregation.value} (mm)")
    ax.set_title("Rainfall period over one year")
    return _svg_string(fig)


def render_coefficients_svg(
    original: Decomposition,
    thresholded: Decomposition,
    report: ShrinkageReport,
) -> str:
    """Render detail coefficients per level before and after thresholding.

    The dashed lines mark the level's threshold +/- lambda.
    """
    fig = Figure(figsize=(10, 2.2 * original.depth))
    axes = fig.subplots(original.depth, 1, squeeze=False)[:, 0]
    for ax, row in zip(axes, report.levels):
        before = original.detail(row.level)
        after = thresholded.detail(row.level)
        k = np.arange(1, len(before) + 1)
        ax.plot(k, before, color="0.6", linewidth=0.8, label="original")
        ax.plot(k, after, color="black", linewidth=0.8, label="thresholded")
        for sign in (1, -1):
            ax.axhline(sign * row.lam, color="tab:red", linestyle="--", linewidth=0.6)
        ax.set_ylabel(f"d{row.level}")
    axes[0].legend(loc="upper right")
    axes[0].set_title("Detail coefficients and thresholds")
    axes[-1].set_xlabel("Coefficient index")
    return _svg_string(fig)
