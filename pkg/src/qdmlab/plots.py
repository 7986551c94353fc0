"""Standalone SVG scatter plots (hand-generated markup, deterministic)."""

from __future__ import annotations

import numpy as np

DIGIT_COLORS = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]

VIEW = 480
MARGIN = 32


def write_scatter_svg(groups, path, radius: float = 3.0) -> None:
    """Scatter plot of labeled 2-D point groups.

    ``groups`` is a sequence of (name, points (N, 2), color) tuples.
    Fixed viewBox, one circle per point; coordinates are affinely mapped
    into the drawing area from the joint bounding box.
    """
    all_pts = np.vstack([np.atleast_2d(pts) for _, pts, _ in groups if len(pts)])
    lo = all_pts.min(axis=0)
    hi = all_pts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)

    def to_canvas(p):
        x = MARGIN + (p[0] - lo[0]) / span[0] * (VIEW - 2 * MARGIN)
        y = VIEW - MARGIN - (p[1] - lo[1]) / span[1] * (VIEW - 2 * MARGIN)
        return x, y

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW} {VIEW}">',
        f'<rect width="{VIEW}" height="{VIEW}" fill="white"/>',
    ]
    for name, pts, color in groups:
        lines.append(f'<g fill="{color}" fill-opacity="0.6" data-name="{name}">')
        for p in np.atleast_2d(pts):
            x, y = to_canvas(p)
            lines.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}"/>')
        lines.append("</g>")
    legend_y = MARGIN / 2
    for i, (name, _, color) in enumerate(groups):
        x = MARGIN + i * 90
        lines.append(f'<circle cx="{x}" cy="{legend_y}" r="4" fill="{color}"/>')
        lines.append(
            f'<text x="{x + 8}" y="{legend_y + 4}" font-size="12" font-family="sans-serif">{name}</text>'
        )
    lines.append("</svg>")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
