"""Dependency-free SVG and CSV emitters.

Numbers are printed with fixed formats so identical inputs give identical
bytes.
"""

from __future__ import annotations

import io
import math


def _fmt(x):
    return f"{x:.6f}"


def diverging_color(value, vmax):
    """Blue-white-red color for ``value`` on the symmetric scale ``[-vmax, vmax]``."""
    t = 0.0 if vmax <= 0 else max(-1.0, min(1.0, value / vmax))
    if t >= 0:
        r, g, b = 255, round(255 * (1 - t)), round(255 * (1 - t))
    else:
        r, g, b = round(255 * (1 + t)), round(255 * (1 + t)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(cells, vmax=None, title="", width=640, height=320):
    """SVG heatmap from rectangles ``(x0, y0, x1, y1, value)`` in unit coordinates.

    The color scale is symmetric around zero.
    """
    if vmax is None:
        vmax = max((abs(c[4]) for c in cells), default=0.0)
    out = io.StringIO()
    top = 24
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height + top}" '
        f'viewBox="0 0 {width} {height + top}">\n'
    )
    out.write(f'<text x="4" y="16" font-family="monospace" font-size="12">{title} '
              f"(scale +/-{vmax:.3e})</text>\n")
    for x0, y0, x1, y1, v in cells:
        out.write(
            f'<rect x="{_fmt(x0 * width)}" y="{_fmt(top + y0 * height)}" '
            f'width="{_fmt((x1 - x0) * width)}" height="{_fmt((y1 - y0) * height)}" '
            f'fill="{diverging_color(v, vmax)}"/>\n'
        )
    out.write("</svg>\n")
    return out.getvalue()


def line_plot_svg(series, title="", xlabel="", ylabel="", width=640, height=360):
    """SVG line plot.  ``series`` maps a label to a list of ``(x, y)`` points."""
    pts = [p for s in series.values() for p in s]
    xs = [p[0] for p in pts] or [0.0, 1.0]
    ys = [p[1] for p in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    m = 48
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]

    def sx(x):
        return m + (x - x0) / (x1 - x0) * (width - 2 * m)

    def sy(y):
        return height - m - (y - y0) / (y1 - y0) * (height - 2 * m)

    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
              f'viewBox="0 0 {width} {height}">\n')
    out.write(f'<text x="{m}" y="20" font-family="monospace" font-size="12">{title}</text>\n')
    out.write(f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}" stroke="black"/>\n')
    out.write(f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}" stroke="black"/>\n')
    out.write(f'<text x="{width // 2}" y="{height - 12}" font-family="monospace" font-size="11">{xlabel}</text>\n')
    out.write(f'<text x="4" y="{m - 8}" font-family="monospace" font-size="11">{ylabel}</text>\n')
    out.write(f'<text x="{m - 4}" y="{height - m + 14}" font-family="monospace" font-size="10">{x0:g}</text>\n')
    out.write(f'<text x="{width - m - 8}" y="{height - m + 14}" font-family="monospace" font-size="10">{x1:g}</text>\n')
    out.write(f'<text x="4" y="{m + 4}" font-family="monospace" font-size="10">{y1:.3g}</text>\n')
    for idx, (label, s) in enumerate(series.items()):
        c = colors[idx % len(colors)]
        path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in s if math.isfinite(y))
        out.write(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{path}"/>\n')
        out.write(f'<text x="{width - m - 140}" y="{m + 14 * (idx + 1)}" font-family="monospace" '
                  f'font-size="11" fill="{c}">{label}</text>\n')
    out.write("</svg>\n")
    return out.getvalue()


def csv_text(header, rows):
    """CSV with ``repr``-stable float formatting (``.17g``)."""
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")
    return out.getvalue()
