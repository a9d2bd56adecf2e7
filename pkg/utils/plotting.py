"""
SVG line plots of CSV columns
"""

import logging
from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

logger = logging.getLogger(__name__)

# Fixed element ids keep the SVG byte-identical between runs
matplotlib.rcParams["svg.hashsalt"] = "kpp-front-lab"
matplotlib.rcParams["svg.fonttype"] = "none"


def plot_polyline(
    path: Union[str, Path],
    x: Sequence[float],
    series: dict,
    xlabel: str,
    ylabel: str,
    title: str = "",
) -> Path:
    """
    Write an axis-labeled polyline plot as SVG

    Args:
        path: Target .svg file
        x: Abscissae shared by all series
        series: Label -> ordinates (non-finite points break the line)
        xlabel: Abscissa label
        ylabel: Ordinate label
        title: Optional title

    Returns:
        The written path
    """
    path = Path(path)
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    x = np.asarray(x, dtype=float)
    for label, values in series.items():
        ax.plot(x, np.asarray(values, dtype=float), linewidth=1.2, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=8)
    ax.grid(True, linewidth=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    logger.debug(f"Wrote plot {path}")
    return path


def plot_points(
    path: Union[str, Path],
    x: Sequence[float],
    y: Sequence[float],
    xlabel: str,
    ylabel: str,
    title: str = "",
) -> Path:
    """Markers joined by a thin line, for short sequences such as amplitudes"""
    path = Path(path)
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(np.asarray(x, dtype=float), np.asarray(y, dtype=float), marker="o", markersize=3, linewidth=0.8)
    ax.axhline(0.0, color="grey", linewidth=0.5)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, linewidth=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    logger.debug(f"Wrote plot {path}")
    return path
