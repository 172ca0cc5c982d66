"""Plain-text artifacts: point CSV, triangulation JSON and scan CSV tables.

Numbers are written with 17 significant digits, which round-trips every
double. Comment lines start with ``#`` and carry provenance; readers skip
them except for the certificate line.
"""

from __future__ import annotations

import json
import math
import re
import sys

from . import __version__
from .density import DensityScan, GrowthReport, RatioSeries
from .geom_core import PointSet
from .triangulation import Triangulation

_CERT_RE = re.compile(r"^#\s*r_lower=")


def fmt(v) -> str:
    """17-significant-digit decimal; None and NaN become empty / ``nan``."""
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def provenance_lines(argv=None, seed=None) -> list[str]:
    """Deterministic provenance comments (no timestamps, no host names)."""
    lines = [f"# dtdensity {__version__}"]
    if argv is not None:
        lines.append("# command: " + " ".join(str(a) for a in argv))
    if seed is not None:
        lines.append(f"# seed: {seed}")
    return lines


def write_points_csv(path, points: PointSet, certificate=None, seed=None, argv=None) -> None:
    """One ``x,y`` line per point, preceded by provenance and optional certificate."""
    lines = provenance_lines(argv)
    if certificate is not None:
        lines.append(f"# r_lower={fmt(certificate.r_lower)} R_upper={fmt(certificate.R_upper)} "
                     f"inner_radius={fmt(certificate.inner_window.radius)} seed={seed if seed is not None else ''}")
    lines.extend(f"{fmt(x)},{fmt(y)}" for x, y in points.xy.tolist())
    write_text(path, "\n".join(lines) + "\n")


def read_points_csv(path) -> PointSet:
    """Read a point CSV; the certificate line, if any, lands in ``meta``."""
    meta = {}
    xy = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if _CERT_RE.match(line):
                    for tok in line.lstrip("#").split():
                        k, _, v = tok.partition("=")
                        meta[k] = v
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'x,y', got {line!r}")
            xy.append((float(parts[0]), float(parts[1])))
    return PointSet(xy, meta=meta)


def triangulation_to_dict(t: Triangulation) -> dict:
    return {"points": t.points.xy.tolist(), "triangles": t.triangles.tolist()}


def write_triangulation_json(path, t: Triangulation, extra: dict | None = None) -> None:
    doc = triangulation_to_dict(t)
    if extra:
        doc.update(extra)
    write_text(path, json.dumps(doc, sort_keys=True) + "\n")


def read_triangulation_json(path) -> Triangulation:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return Triangulation.from_triangles(PointSet(doc["points"]), doc["triangles"])


def scan_csv(scan: DensityScan, header_lines=()) -> str:
    rows = list(header_lines) + ["alpha,sum,density"]
    rows += [f"{fmt(a)},{fmt(s)},{fmt(d)}" for a, s, d in zip(scan.alphas, scan.sums, scan.densities)]
    rows.append(f"# liminf_estimate={fmt(scan.liminf_estimate)}")
    return "\n".join(rows) + "\n"


def ratio_csv(rs: RatioSeries, header_lines=()) -> str:
    rows = list(header_lines) + ["alpha,core,completed,ratio"]
    for a, c, f, r, st in zip(rs.alphas, rs.core_values, rs.completed_values, rs.ratios, rs.status):
        rows.append(f"{fmt(a)},{fmt(c)},{fmt(f)},{fmt(r) if r is not None else st}")
    return "\n".join(rows) + "\n"


def growth_csv(g: GrowthReport, header_lines=()) -> str:
    rows = list(header_lines) + ["alpha,k_alpha,boundary,k_over_a2,b_over_sqrtk"]
    for a, k, b, kr, br in zip(g.alphas, g.k_alphas, g.boundary_counts, g.k_over_alpha_sq,
                                g.boundary_over_sqrt_k):
        rows.append(f"{fmt(a)},{k},{b},{fmt(kr)},{fmt(br)}")
    return "\n".join(rows) + "\n"


def read_table_csv(path) -> list[dict]:
    """Rows of a scan CSV as dicts of strings, comments skipped."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    head = lines[0].split(",")
    return [dict(zip(head, ln.split(","))) for ln in lines[1:]]


def write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
