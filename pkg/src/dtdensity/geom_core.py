"""Planar primitives: exact predicates, point containers and triangle geometry.

Signs come from adaptive predicates (floating-point filter, exact integer
fallback), so they are correct as if computed in infinite precision. Derived
lengths, areas and centres are plain double precision.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DegenerateTriangle, DuplicatePoints, ContractError, TooFewPoints

#: Sets up to this size get the exhaustive general-position scan by default.
EXHAUSTIVE_GP_LIMIT = 64


class Point(NamedTuple):
    x: float
    y: float


class Sign(IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


@dataclass(frozen=True)
class Window:
    """Closed disk used to cut finite samples out of an infinite pattern."""

    center: Point
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point(float(self.center[0]), float(self.center[1])))
        if not self.radius > 0:
            raise ValueError("window radius must be positive")


class PointSet:
    """Immutable planar point list with stable integer indices.

    Parameters
    ----------
    xy : array_like, shape (n, 2)
        Finite coordinates. Duplicates are rejected.
    window : Window, optional
        Region the points were sampled from, if known.
    meta : dict, optional
        Free-form provenance (seed, certificate values, ...).
    labels : array_like, shape (n, 3), optional
        ``(motif index, i, j)`` lattice labels for periodic sets.
    """

    __slots__ = ("xy", "window", "meta", "labels")

    def __init__(self, xy, window=None, meta=None, labels=None):
        arr = np.array(xy, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        if len(arr) > 1:
            order = np.lexsort((arr[:, 1], arr[:, 0]))
            s = arr[order]
            same = np.all(s[1:] == s[:-1], axis=1)
            if same.any():
                k = int(np.argmax(same))
                i, j = sorted((int(order[k]), int(order[k + 1])))
                raise DuplicatePoints(i, j)
        arr.setflags(write=False)
        self.xy = arr
        self.window = window
        self.meta = dict(meta or {})
        if labels is not None:
            labels = np.array(labels, dtype=np.int64).reshape(-1, 3)
            labels.setflags(write=False)
        self.labels = labels

    @classmethod
    def coerce(cls, points) -> "PointSet":
        return points if isinstance(points, PointSet) else cls(points)

    def __len__(self):
        return len(self.xy)

    def __getitem__(self, i) -> Point:
        return Point(float(self.xy[i, 0]), float(self.xy[i, 1]))

    def __iter__(self):
        for x, y in self.xy.tolist():
            yield Point(x, y)

    def __eq__(self, other):
        return isinstance(other, PointSet) and np.array_equal(self.xy, other.xy)

    def __hash__(self):
        return hash(self.xy.tobytes())

    def __repr__(self):
        return f"PointSet(n={len(self)})"

    @property
    def x(self):
        return self.xy[:, 0]

    @property
    def y(self):
        return self.xy[:, 1]

    def scaled(self, s: float) -> "PointSet":
        return PointSet(self.xy * s, meta=self.meta)


def orient2d(p, q, r) -> Sign:
    """Exact orientation of the triple ``(p, q, r)``."""
    return Sign(_kernels.orient2d(p[0], p[1], q[0], q[1], r[0], r[1]))


def incircle(p, q, r, s) -> Sign:
    """Exact position of ``s`` relative to the circle through ``p, q, r``.

    ``(p, q, r)`` must be counterclockwise; POSITIVE means strictly inside.
    """
    if _kernels.orient2d(p[0], p[1], q[0], q[1], r[0], r[1]) <= 0:
        raise ContractError("incircle requires a counterclockwise triple")
    return Sign(_kernels.incircle(p[0], p[1], q[0], q[1], r[0], r[1], s[0], s[1]))


# relative error bound of the float cross product, differences included
_CROSS_ERR = 8.0 * 2.0 ** -53


def _exact_cross(p, q, r) -> float:
    """Twice the signed area of ``(p, q, r)``, correctly rounded."""
    px, py = Fraction(float(p[0])), Fraction(float(p[1]))
    v = (Fraction(float(q[0])) - px) * (Fraction(float(r[1])) - py) \
        - (Fraction(float(q[1])) - py) * (Fraction(float(r[0])) - px)
    return float(v)


@dataclass(frozen=True)
class TriangleGeometry:
    edge_lengths: tuple[float, float, float]
    area: float
    circumradius: float
    circumcenter: Point
    inradius: float
    barycenter: Point

    @property
    def sum_sq_edges(self) -> float:
        a1, a2, a3 = self.edge_lengths
        return a1 * a1 + a2 * a2 + a3 * a3


def triangle_geometry(p, q, r) -> TriangleGeometry:
    """Edge lengths, area, circumcircle, incircle radius and barycentre.

    ``a1`` is the edge opposite ``p``, ``a2`` opposite ``q``, ``a3`` opposite
    ``r``. Raises :class:`DegenerateTriangle` for collinear input.
    """
    if _kernels.orient2d(p[0], p[1], q[0], q[1], r[0], r[1]) == 0:
        raise DegenerateTriangle(f"collinear triangle {tuple(p)}, {tuple(q)}, {tuple(r)}")
    px, py = float(p[0]), float(p[1])
    bx, by = q[0] - px, q[1] - py
    cx, cy = r[0] - px, r[1] - py
    cross = bx * cy - by * cx
    if abs(cross) <= _CROSS_ERR * (abs(bx * cy) + abs(by * cx)):
        cross = _exact_cross(p, q, r)
    area = 0.5 * abs(cross)
    a1 = math.hypot(r[0] - q[0], r[1] - q[1])
    a2 = math.hypot(cx, cy)
    a3 = math.hypot(bx, by)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    d = 2.0 * cross
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return TriangleGeometry(
        edge_lengths=(a1, a2, a3),
        area=area,
        circumradius=a1 * a2 * a3 / (4.0 * area),
        circumcenter=Point(px + ux, py + uy),
        inradius=area / (0.5 * (a1 + a2 + a3)),
        barycenter=Point((px + q[0] + r[0]) / 3.0, (py + q[1] + r[1]) / 3.0),
    )


class TriangleArrays(NamedTuple):
    """Vectorised counterpart of :class:`TriangleGeometry` (one row per triangle)."""

    edge_lengths: np.ndarray  # (m, 3)
    area: np.ndarray
    circumradius: np.ndarray
    circumcenter: np.ndarray  # (m, 2)
    inradius: np.ndarray
    barycenter: np.ndarray  # (m, 2)

    @property
    def sum_sq_edges(self):
        return np.sum(self.edge_lengths ** 2, axis=1)

    def __len__(self):
        return len(self.area)


def triangle_arrays(xy, triangles) -> TriangleArrays:
    """Same quantities as :func:`triangle_geometry` for many triangles at once."""
    xy = np.asarray(xy, dtype=float)
    tri = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    p = xy[tri[:, 0]]
    q = xy[tri[:, 1]]
    r = xy[tri[:, 2]]
    b = q - p
    c = r - p
    cross = b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0]
    bound = _CROSS_ERR * (np.abs(b[:, 0] * c[:, 1]) + np.abs(b[:, 1] * c[:, 0]))
    for k in np.flatnonzero(np.abs(cross) <= bound):
        cross[k] = _exact_cross(p[k], q[k], r[k])
        if cross[k] == 0:
            raise DegenerateTriangle(f"triangle {tri[k].tolist()} is degenerate")
    area = 0.5 * np.abs(cross)
    a1 = np.hypot(*(r - q).T)
    a2 = np.hypot(*c.T)
    a3 = np.hypot(*b.T)
    b2 = np.sum(b * b, axis=1)
    c2 = np.sum(c * c, axis=1)
    d = 2.0 * cross
    ux = (c[:, 1] * b2 - b[:, 1] * c2) / d
    uy = (b[:, 0] * c2 - c[:, 0] * b2) / d
    return TriangleArrays(
        edge_lengths=np.stack([a1, a2, a3], axis=1),
        area=area,
        circumradius=a1 * a2 * a3 / (4.0 * area),
        circumcenter=np.stack([p[:, 0] + ux, p[:, 1] + uy], axis=1),
        inradius=area / (0.5 * (a1 + a2 + a3)),
        barycenter=(p + q + r) / 3.0,
    )


@dataclass
class GeneralPositionReport:
    """Collinear triples and cocircular quadruples found by exact predicates.

    ``exhaustive`` tells whether every triple and quadruple was examined, or
    only those that shape the Delaunay triangulation (empty circles and
    boundary triples), which is what the large-set scan covers.
    """

    collinear: list[tuple[int, int, int]] = field(default_factory=list)
    cocircular: list[tuple[int, int, int, int]] = field(default_factory=list)
    exhaustive: bool = True

    @property
    def ok(self) -> bool:
        return not self.collinear and not self.cocircular

    def __bool__(self):
        return self.ok


def check_general_position(points, exhaustive: bool | None = None) -> GeneralPositionReport:
    """Report collinear triples and cocircular quadruples.

    Exhaustive mode is O(n^4) and is the default up to
    ``EXHAUSTIVE_GP_LIMIT`` points. Larger sets get the Delaunay-local scan:
    cocircular quadruples whose circle is empty (the ones that make the
    Delaunay triangulation ambiguous) and collinear triples on the hull.
    """
    ps = PointSet.coerce(points)
    n = len(ps)
    if n < 3:
        raise TooFewPoints("need at least three points")
    if exhaustive is None:
        exhaustive = n <= EXHAUSTIVE_GP_LIMIT
    xs = ps.x.tolist()
    ys = ps.y.tolist()
    o2 = _kernels.orient2d
    ic = _kernels.incircle
    report = GeneralPositionReport(exhaustive=exhaustive)
    if exhaustive:
        for a, b, c in itertools.combinations(range(n), 3):
            if o2(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) == 0:
                report.collinear.append((a, b, c))
        flat = set(report.collinear)
        for a, b, c, d in itertools.combinations(range(n), 4):
            if (a, b, c) in flat:
                continue
            s = o2(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c])
            if s > 0:
                r = ic(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c], xs[d], ys[d])
            else:
                r = ic(xs[a], ys[a], xs[c], ys[c], xs[b], ys[b], xs[d], ys[d])
            if r == 0:
                report.cocircular.append((a, b, c, d))
        return report

    V, N, hull = _kernels.delaunay_core(xs, ys, range(n))
    for t in range(len(V) // 3):
        for e in range(3):
            u = N[3 * t + e]
            if u <= t:
                continue
            for f in range(3):
                if N[3 * u + f] == t:
                    break
            p, a, b = V[3 * t + e], V[3 * t + (e + 1) % 3], V[3 * t + (e + 2) % 3]
            d = V[3 * u + f]
            if ic(xs[p], ys[p], xs[a], ys[a], xs[b], ys[b], xs[d], ys[d]) == 0:
                report.cocircular.append(tuple(sorted((p, a, b, d))))
    h = len(hull)
    for k in range(h):
        a, b, c = hull[k - 1], hull[k], hull[(k + 1) % h]
        if o2(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) == 0:
            report.collinear.append(tuple(sorted((a, b, c))))
    report.cocircular.sort()
    report.collinear.sort()
    return report
