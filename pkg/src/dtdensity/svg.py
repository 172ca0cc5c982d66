"""Static SVG drawings: triangulations and density curves.

Output is plain text built from fixed-precision numbers, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import html
import math

import numpy as np

_HEAD = '<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">\n'


def _n(v):
    return f"{v:.3f}"


def _desc(lines):
    text = "\n".join(lines)
    return f"<desc>{html.escape(text)}</desc>\n" if text else ""


def triangulation_svg(xy, triangles, hull=None, pockets=None, circle=None, size: int = 800,
                      provenance=()) -> str:
    """Triangles stroked, optional pocket triangles shaded, hull cycle highlighted.

    ``circle`` is an optional ``(cx, cy, radius)`` drawn dashed (the ball B_alpha).
    ``provenance`` lines are stored in the drawing's ``<desc>`` element.
    """
    xy = np.asarray(xy, dtype=float)
    tri = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    if circle is not None:
        cx, cy, r = circle
        lo = np.minimum(lo, (cx - r, cy - r))
        hi = np.maximum(hi, (cx + r, cy + r))
    span = float(max(hi - lo)) or 1.0
    pad = 10.0
    s = (size - 2 * pad) / span

    def tx(p):
        return pad + (p[0] - lo[0]) * s, size - pad - (p[1] - lo[1]) * s

    out = [_HEAD.format(w=size, h=size), _desc(provenance), '<rect width="100%" height="100%" fill="white"/>\n']

    def poly(idx, style):
        pts = " ".join(f"{_n(a)},{_n(b)}" for a, b in (tx(xy[i]) for i in idx))
        out.append(f'<polygon points="{pts}" {style}/>\n')

    if pockets is not None:
        for t in np.asarray(pockets, dtype=np.int64).reshape(-1, 3):
            poly(t, 'fill="#f4c27a" stroke="#b07020" stroke-width="0.6"')
    for t in tri:
        poly(t, 'fill="none" stroke="#333" stroke-width="0.5"')
    if hull is not None and len(hull):
        poly(hull, 'fill="none" stroke="#c0392b" stroke-width="1.8"')
    if circle is not None:
        ccx, ccy = tx((circle[0], circle[1]))
        out.append(f'<circle cx="{_n(ccx)}" cy="{_n(ccy)}" r="{_n(circle[2] * s)}" fill="none" '
                   'stroke="#2471a3" stroke-dasharray="4 3"/>\n')
    out.append("</svg>\n")
    return "".join(out)


def density_svg(alphas, series: dict, reference: float | None = None,
                width: int = 640, height: int = 400, provenance=()) -> str:
    """Line plot of one or more density sequences against alpha."""
    al = [float(a) for a in alphas]
    vals = [float(v) for ys in series.values() for v in ys if v is not None and math.isfinite(v)]
    if reference is not None:
        vals.append(float(reference))
    ylo, yhi = (min(vals), max(vals)) if vals else (0.0, 1.0)
    if yhi == ylo:
        ylo, yhi = ylo - 1.0, yhi + 1.0
    xlo, xhi = min(al), max(al)
    if xhi == xlo:
        xlo, xhi = xlo - 1.0, xhi + 1.0
    m = 50.0

    def tx(a, v):
        return (m + (a - xlo) / (xhi - xlo) * (width - 2 * m),
                height - m - (v - ylo) / (yhi - ylo) * (height - 2 * m))

    out = [_HEAD.format(w=width, h=height), _desc(provenance), '<rect width="100%" height="100%" fill="white"/>\n']
    out.append(f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}" stroke="black"/>\n')
    out.append(f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}" stroke="black"/>\n')
    out.append(f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="12">alpha</text>\n')
    out.append(f'<text x="8" y="{m - 10}" font-size="11">{ylo:.6g} .. {yhi:.6g}</text>\n')
    if reference is not None:
        _, ry = tx(xlo, reference)
        out.append(f'<line x1="{m}" y1="{_n(ry)}" x2="{width - m}" y2="{_n(ry)}" '
                   'stroke="#888" stroke-dasharray="5 4"/>\n')
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    for k, (name, ys) in enumerate(series.items()):
        pts = [tx(a, float(v)) for a, v in zip(al, ys) if v is not None and math.isfinite(v)]
        c = colors[k % len(colors)]
        path = " ".join(f"{_n(x)},{_n(y)}" for x, y in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="{c}" stroke-width="1.5"/>\n')
        for x, y in pts:
            out.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="2.5" fill="{c}"/>\n')
        out.append(f'<text x="{width - m + 4}" y="{m + 14 * k}" font-size="11" fill="{c}">{name}</text>\n')
    out.append("</svg>\n")
    return "".join(out)
