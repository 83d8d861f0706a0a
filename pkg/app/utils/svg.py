# app/utils/svg.py
"""
SVG Rendering

Self-contained SVG text for impulse-response grids: one small panel per
(response, shock) pair with the point path as a polyline, the bootstrap
band as a filled polygon, a zero line and labeled axes. Output depends
only on the numbers passed in.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np

from macro.var import IrfResult

PANEL_WIDTH = 260
PANEL_HEIGHT = 190
MARGIN_LEFT = 62
MARGIN_TOP = 34
MARGIN_BOTTOM = 34
MARGIN_RIGHT = 14
HEADER_HEIGHT = 44

POINT_COLOR = "#1f77b4"
BAND_COLOR = "#aec7e8"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
        .replace("'", "&#39;")
    )


def _format_tick(value: float) -> str:
    if value == 0:
        return "0"
    magnitude = abs(value)
    if magnitude >= 1000 or magnitude < 0.01:
        return f"{value:.1e}"
    return f"{value:.3g}"


def _panel(
    origin_x: float,
    origin_y: float,
    title: str,
    point: np.ndarray,
    lower: Optional[np.ndarray],
    upper: Optional[np.ndarray],
) -> List[str]:
    plot_left = origin_x + MARGIN_LEFT
    plot_right = origin_x + PANEL_WIDTH - MARGIN_RIGHT
    plot_top = origin_y + MARGIN_TOP
    plot_bottom = origin_y + PANEL_HEIGHT - MARGIN_BOTTOM
    horizons = len(point)

    values = [point] + [band for band in (lower, upper) if band is not None]
    y_min = min(0.0, min(float(np.min(v)) for v in values))
    y_max = max(0.0, max(float(np.max(v)) for v in values))
    if y_max == y_min:
        y_max, y_min = y_max + 1.0, y_min - 1.0
    pad = 0.08 * (y_max - y_min)
    y_min, y_max = y_min - pad, y_max + pad

    def x_to_px(h: int) -> float:
        if horizons == 1:
            return (plot_left + plot_right) / 2
        return plot_left + h * (plot_right - plot_left) / (horizons - 1)

    def y_to_px(y: float) -> float:
        return plot_bottom - (y - y_min) / (y_max - y_min) * (plot_bottom - plot_top)

    lines: List[str] = ["<g>"]
    lines.append(
        f'<text x="{(plot_left + plot_right) / 2:.1f}" y="{origin_y + 20:.1f}" text-anchor="middle" '
        f'font-size="13" font-family="Arial">{_escape(title)}</text>'
    )

    if lower is not None and upper is not None:
        outline = [(x_to_px(h), y_to_px(float(upper[h]))) for h in range(horizons)]
        outline += [(x_to_px(h), y_to_px(float(lower[h]))) for h in reversed(range(horizons))]
        points = " ".join(f"{x:.2f},{y:.2f}" for x, y in outline)
        lines.append(f'<polygon fill="{BAND_COLOR}" fill-opacity="0.6" stroke="none" points="{points}"/>')

    zero = y_to_px(0.0)
    lines.append(
        f'<line x1="{plot_left:.2f}" y1="{zero:.2f}" x2="{plot_right:.2f}" y2="{zero:.2f}" '
        f'stroke="#7f7f7f" stroke-width="1" stroke-dasharray="4,3"/>'
    )
    lines.append(
        f'<line x1="{plot_left:.2f}" y1="{plot_bottom:.2f}" x2="{plot_right:.2f}" y2="{plot_bottom:.2f}" '
        f'stroke="#000000" stroke-width="1"/>'
    )
    lines.append(
        f'<line x1="{plot_left:.2f}" y1="{plot_top:.2f}" x2="{plot_left:.2f}" y2="{plot_bottom:.2f}" '
        f'stroke="#000000" stroke-width="1"/>'
    )

    for value in (y_min + pad, 0.0, y_max - pad):
        y = y_to_px(value)
        lines.append(
            f'<text x="{plot_left - 6:.2f}" y="{y + 4:.2f}" text-anchor="end" font-size="10" '
            f'font-family="Arial">{_format_tick(value)}</text>'
        )

    step = max(1, (horizons - 1) // 5)
    for h in range(0, horizons, step):
        x = x_to_px(h)
        lines.append(
            f'<line x1="{x:.2f}" y1="{plot_bottom:.2f}" x2="{x:.2f}" y2="{plot_bottom + 4:.2f}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        lines.append(
            f'<text x="{x:.2f}" y="{plot_bottom + 16:.2f}" text-anchor="middle" font-size="10" '
            f'font-family="Arial">{h}</text>'
        )

    path = " ".join(f"{x_to_px(h):.2f},{y_to_px(float(point[h])):.2f}" for h in range(horizons))
    lines.append(f'<polyline fill="none" stroke="{POINT_COLOR}" stroke-width="2" points="{path}"/>')
    lines.append("</g>")
    return lines


def render_irf_svg(irf: IrfResult, title: str, labels: Optional[Sequence[str]] = None) -> str:
    """
    Grid of panels: row i is the response of variable i, column j the shock in variable j.

    Args:
        irf: Point responses, with bands drawn when present.
        title: Figure heading.
        labels: Display names; defaults to the IRF ordering.
    """
    names = list(labels) if labels is not None else list(irf.ordering)
    m = len(names)
    width = m * PANEL_WIDTH
    height = HEADER_HEIGHT + m * PANEL_HEIGHT + 20

    lines: List[str] = []
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    lines.append('<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>')
    lines.append(
        f'<text x="{width / 2:.1f}" y="28" text-anchor="middle" font-size="16" '
        f'font-family="Arial">{_escape(title)}</text>'
    )

    for i, response in enumerate(names):
        for j, shock in enumerate(names):
            lines.extend(
                _panel(
                    origin_x=j * PANEL_WIDTH,
                    origin_y=HEADER_HEIGHT + i * PANEL_HEIGHT,
                    title=f"{response} <- {shock} shock",
                    point=irf.point[:, i, j],
                    lower=irf.lower[:, i, j] if irf.lower is not None else None,
                    upper=irf.upper[:, i, j] if irf.upper is not None else None,
                )
            )

    lines.append(
        f'<text x="{width / 2:.1f}" y="{height - 6}" text-anchor="middle" font-size="12" '
        f'font-family="Arial">horizon (years)</text>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
