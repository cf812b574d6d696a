"""Static matplotlib renderings written next to the delimited reports.

Everything here draws to files; there is no interactive display.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .geometry import LineConfiguration, distance, pair_indices
from .signed_graph import SignedCompleteGraph

__all__ = [
    "render_configuration",
    "render_signed_graph",
    "render_deviation_matrix",
]


def render_configuration(config: LineConfiguration, path, length: float = 6.0, radius: float | None = None) -> None:
    """3-D view of the lines as segments of the given length, centered on
    their moment points; linewidth hints at the cylinder radius."""
    fig = plt.figure(figsize=(7, 7))
    ax = fig.add_subplot(projection="3d")
    half = length / 2.0
    lw = 2.0 if radius is None else max(0.5, 12.0 * radius / max(config.target_distance, 1e-9))
    for k, line in enumerate(config.lines, start=1):
        a = line.point_at(-half)
        b = line.point_at(half)
        ax.plot([a[0], b[0]], [a[1], b[1]], [a[2], b[2]], lw=lw, label=f"line {k}")
        mid = line.moment_point
        ax.text(mid[0], mid[1], mid[2], str(k))
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_title(config.label or f"{config.n} lines, target distance {config.target_distance:g}")
    ax.set_box_aspect((1, 1, 1))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_signed_graph(g: SignedCompleteGraph, path, title: str = "") -> None:
    """Circular layout; solid edges are positive, dashed negative."""
    n = g.n
    angles = [math.pi / 2 + 2 * math.pi * k / n for k in range(n)]
    xs = np.cos(angles)
    ys = np.sin(angles)
    fig, ax = plt.subplots(figsize=(6, 6))
    for i, j, s in g.edges():
        style = "-" if s > 0 else "--"
        color = "tab:blue" if s > 0 else "tab:red"
        ax.plot([xs[i - 1], xs[j - 1]], [ys[i - 1], ys[j - 1]], style, color=color, lw=1.5)
    ax.scatter(xs, ys, s=120, color="black", zorder=3)
    for k in range(n):
        ax.annotate(str(k + 1), (1.12 * xs[k], 1.12 * ys[k]), ha="center", va="center")
    ax.set_xlim(-1.3, 1.3)
    ax.set_ylim(-1.3, 1.3)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_deviation_matrix(config: LineConfiguration, path) -> None:
    """Heatmap of |pairwise distance - target| over the line pairs."""
    n = config.n
    dev = np.zeros((n, n))
    for i, j in pair_indices(n):
        d = distance(config.lines[i - 1], config.lines[j - 1])
        dev[i - 1, j - 1] = dev[j - 1, i - 1] = abs(d - config.target_distance)
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(dev, cmap="viridis")
    ax.set_xticks(range(n), [str(k + 1) for k in range(n)])
    ax.set_yticks(range(n), [str(k + 1) for k in range(n)])
    ax.set_title("pairwise |distance - target|")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
