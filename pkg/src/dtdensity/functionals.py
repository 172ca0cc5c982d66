"""Triangle functionals F1..F6, their sums over complexes, and the finite
minimality check against every triangulation in the flip graph.

=====  ==============================================
F1     R**a                       (a > 0)
F2     (a1^2 + a2^2 + a3^2) / area
F3     -inradius
F4     (a1^2 + a2^2 + a3^2) * area
F5     R**a * area                (a >= 1)
F6     |barycenter - circumcenter|^2 * area
=====  ==============================================

R is the circumradius and a1, a2, a3 the edge lengths.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import mpmath
import numpy as np

from .errors import InvalidExponent, Truncated
from .geom_core import PointSet, TriangleArrays, TriangleGeometry, triangle_arrays
from .triangulation import DEFAULT_FLIP_CAP, FlipGraphResult, Triangulation, flip_graph

KINDS = ("F1", "F2", "F3", "F4", "F5", "F6")
_SPEC_RE = re.compile(r"^\s*F([1-6])\s*(?::\s*a\s*=\s*([^\s]+))?\s*$")
HIGH_PRECISION_DPS = 80


@dataclass(frozen=True)
class FunctionalSpec:
    """Which functional, plus the exponent used by F1 and F5."""

    kind: str
    exponent_a: float = 1.0

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, str) else f"F{int(self.kind)}"
        kind = kind.upper()
        if kind not in KINDS:
            raise ValueError(f"unknown functional {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        a = float(self.exponent_a)
        object.__setattr__(self, "exponent_a", a)
        if kind == "F1" and not a > 0:
            raise InvalidExponent("F1 needs a > 0")
        if kind == "F5" and not a >= 1:
            raise InvalidExponent("F5 needs a >= 1")

    @classmethod
    def parse(cls, text: str) -> "FunctionalSpec":
        """Parse ``"F<k>[:a=<real>]"``, e.g. ``"F1:a=2"`` or ``"F6"``."""
        m = _SPEC_RE.match(text)
        if not m:
            raise ValueError(f"bad functional spec {text!r}; expected F<k>[:a=<real>]")
        kind = "F" + m.group(1)
        if m.group(2) is None:
            return cls(kind)
        if kind not in ("F1", "F5"):
            raise ValueError(f"{kind} takes no exponent")
        return cls(kind, float(m.group(2)))

    def __str__(self):
        if self.kind in ("F1", "F5"):
            return f"{self.kind}:a={self.exponent_a:g}"
        return self.kind

    @property
    def uses_exponent(self):
        return self.kind in ("F1", "F5")


def eval_triangle(spec: FunctionalSpec, g: TriangleGeometry) -> float:
    k = spec.kind
    if k == "F1":
        return g.circumradius ** spec.exponent_a
    if k == "F2":
        return g.sum_sq_edges / g.area
    if k == "F3":
        return -g.inradius
    if k == "F4":
        return g.sum_sq_edges * g.area
    if k == "F5":
        return g.circumradius ** spec.exponent_a * g.area
    dx = g.barycenter.x - g.circumcenter.x
    dy = g.barycenter.y - g.circumcenter.y
    return (dx * dx + dy * dy) * g.area


def eval_arrays(spec: FunctionalSpec, g: TriangleArrays) -> np.ndarray:
    """Per-triangle values for a batch of triangles."""
    k = spec.kind
    if k == "F1":
        return g.circumradius ** spec.exponent_a
    if k == "F2":
        return g.sum_sq_edges / g.area
    if k == "F3":
        return -g.inradius
    if k == "F4":
        return g.sum_sq_edges * g.area
    if k == "F5":
        return g.circumradius ** spec.exponent_a * g.area
    d = g.barycenter - g.circumcenter
    return np.sum(d * d, axis=1) * g.area


def eval_complex(spec: FunctionalSpec, triangles: Iterable) -> float:
    """Sum of the functional over a collection of triangles (correctly rounded).

    Accepts :class:`TriangleGeometry` items, a :class:`TriangleArrays` batch,
    or a :class:`Triangulation`. The empty collection sums to 0.
    """
    if isinstance(triangles, Triangulation):
        triangles = triangles.geometry
    if isinstance(triangles, TriangleArrays):
        return math.fsum(eval_arrays(spec, triangles).tolist())
    return math.fsum(eval_triangle(spec, g) for g in triangles)


def eval_triangulation(spec: FunctionalSpec, t: Triangulation) -> float:
    return eval_complex(spec, t.geometry)


# ---------------------------------------------------------------- exact values

def _frac_point(p):
    return Fraction(float(p[0])), Fraction(float(p[1]))


def _is_even_int(a):
    return float(a).is_integer() and int(a) % 2 == 0


def is_rational_functional(spec: FunctionalSpec) -> bool:
    """True when the value is a rational function of the coordinates."""
    if spec.kind in ("F2", "F4", "F6"):
        return True
    if spec.kind in ("F1", "F5"):
        return _is_even_int(spec.exponent_a)
    return False


def exact_triangle_value(spec: FunctionalSpec, p, q, r):
    """Value of the functional on triangle ``(p, q, r)`` without rounding error.

    Returns a :class:`~fractions.Fraction` when the functional is rational in
    the coordinates (F2, F4, F6, and F1/F5 with even integer exponent);
    otherwise an ``mpmath.mpf`` evaluated at ``HIGH_PRECISION_DPS`` digits
    from the exact inputs.
    """
    px, py = _frac_point(p)
    qx, qy = _frac_point(q)
    rx, ry = _frac_point(r)
    bx, by = qx - px, qy - py
    cx, cy = rx - px, ry - py
    cross = bx * cy - by * cx
    area = abs(cross) / 2
    l1 = (rx - qx) ** 2 + (ry - qy) ** 2
    l2 = cx * cx + cy * cy
    l3 = bx * bx + by * by
    s = l1 + l2 + l3
    k = spec.kind
    if k == "F2":
        return s / area
    if k == "F4":
        return s * area
    if k == "F6":
        d = 2 * cross
        ux = (cy * l3 - by * l2) / d
        uy = (bx * l2 - cx * l3) / d
        gx = (bx + cx) / 3
        gy = (by + cy) / 3
        return ((gx - ux) ** 2 + (gy - uy) ** 2) * area
    r2 = l1 * l2 * l3 / (16 * area * area)
    if is_rational_functional(spec):
        val = r2 ** (int(spec.exponent_a) // 2)
        return val * area if k == "F5" else val
    with mpmath.workdps(HIGH_PRECISION_DPS):
        mp = lambda f: mpmath.mpf(f.numerator) / f.denominator
        if k == "F3":
            per = mpmath.sqrt(mp(l1)) + mpmath.sqrt(mp(l2)) + mpmath.sqrt(mp(l3))
            return -2 * mp(area) / per
        rpow = mpmath.power(mp(r2), mpmath.mpf(spec.exponent_a) / 2)
        return rpow * mp(area) if k == "F5" else rpow


def exact_complex_value(spec: FunctionalSpec, xy, triangles):
    vals = [exact_triangle_value(spec, xy[a], xy[b], xy[c]) for a, b, c in triangles]
    if is_rational_functional(spec):
        return sum(vals, Fraction(0))
    with mpmath.workdps(HIGH_PRECISION_DPS):
        return mpmath.fsum(vals)


# ---------------------------------------------------------------- minimality

@dataclass
class MinimalityReport:
    functional: FunctionalSpec
    delaunay_value: float
    min_value: float
    argmin_signature: tuple
    n_triangulations: int
    delaunay_is_min: bool
    max_violation: float
    delaunay_signature: tuple = ()
    near_ties: int = 0
    exact_confirmed: bool | None = None
    truncated: bool = False

    def to_dict(self):
        return {
            "functional": str(self.functional),
            "delaunay_value": self.delaunay_value,
            "min_value": self.min_value,
            "argmin_signature": [list(e) for e in self.argmin_signature],
            "delaunay_signature": [list(e) for e in self.delaunay_signature],
            "n_triangulations": self.n_triangulations,
            "delaunay_is_min": self.delaunay_is_min,
            "max_violation": self.max_violation,
            "near_ties": self.near_ties,
            "exact_confirmed": self.exact_confirmed,
            "truncated": self.truncated,
        }

    @property
    def passed(self) -> bool:
        return self.delaunay_is_min and self.exact_confirmed is not False


def verify_finite_minimality(points, spec: FunctionalSpec, cap: int = DEFAULT_FLIP_CAP,
                             rel_tol: float = 1e-9, exact_recheck: bool = True,
                             graph: FlipGraphResult | None = None) -> MinimalityReport:
    """Evaluate the functional on every triangulation and compare with Delaunay.

    Triangulations whose value lies within ``rel_tol`` of the Delaunay value
    are near-ties; with ``exact_recheck`` they are re-evaluated exactly (see
    :func:`exact_triangle_value`) and ``exact_confirmed`` records whether
    Delaunay is still no worse than all of them. A precomputed ``graph`` may be
    passed to share one enumeration between functionals.
    """
    ps = PointSet.coerce(points)
    if graph is None:
        graph = flip_graph(ps, cap=cap)
    if graph.truncated:
        raise Truncated(f"flip graph hit cap {cap}; minimality is inconclusive")

    tris = sorted({t for _, tr in graph.triangulations for t in tr.triangle_key_set()})
    # stored keys are sorted index triples; restore CCW order for geometry
    ccw = []
    xy = ps.xy
    for a, b, c in tris:
        cross = (xy[b, 0] - xy[a, 0]) * (xy[c, 1] - xy[a, 1]) - (xy[b, 1] - xy[a, 1]) * (xy[c, 0] - xy[a, 0])
        ccw.append((a, b, c) if cross > 0 else (a, c, b))
    per = eval_arrays(spec, triangle_arrays(xy, ccw)).tolist()
    value_of = dict(zip(tris, per))

    values = []
    for sig, tr in graph.triangulations:
        keys = sorted(tr.triangle_key_set())
        values.append(math.fsum(value_of[k] for k in keys))
    d_idx = next(i for i, (s, _) in enumerate(graph.triangulations) if s == graph.delaunay_signature)
    dval = values[d_idx]
    m_idx = min(range(len(values)), key=lambda i: (values[i], graph.triangulations[i][0]))
    mval = values[m_idx]
    scale = max(abs(dval), abs(mval), 1e-300)
    is_min = dval <= mval + rel_tol * scale

    ties = [i for i, v in enumerate(values) if i != d_idx and abs(v - dval) <= rel_tol * scale]
    confirmed = None
    if exact_recheck and ties:
        d_tris = [t.tolist() for t in graph.triangulations[d_idx][1].triangles]
        d_exact = exact_complex_value(spec, xy, d_tris)
        confirmed = True
        for i in ties:
            o_tris = [t.tolist() for t in graph.triangulations[i][1].triangles]
            if exact_complex_value(spec, xy, o_tris) < d_exact:
                confirmed = False
                break

    return MinimalityReport(
        functional=spec,
        delaunay_value=dval,
        min_value=mval,
        argmin_signature=graph.triangulations[m_idx][0],
        n_triangulations=graph.count,
        delaunay_is_min=is_min,
        max_violation=min(0.0, mval - dval),
        delaunay_signature=graph.delaunay_signature,
        near_ties=len(ties),
        exact_confirmed=confirmed,
        truncated=graph.truncated,
    )
