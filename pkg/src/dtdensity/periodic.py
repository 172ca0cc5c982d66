"""Triangulations invariant under the translations of a periodic set.

A vertex of the infinite periodic set is a label ``(m, i, j)``: motif point
``m`` translated by ``i*b1 + j*b2``. A triangle class is stored as three
labels in counterclockwise order, translated and rotated to its smallest
lexicographic form, so each class has exactly one representative and a
fundamental domain carries ``2 * len(motif)`` of them.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import InconsistentPeriodicMesh, NonConvexQuad, NoSuchEdge
from .geom_core import triangle_arrays
from .pointsets import PeriodicSet, gen_periodic
from .triangulation import build_delaunay


def canonical_triangle(tri):
    """Smallest rotation of ``tri`` after translating its first vertex to cell (0, 0)."""
    best = None
    for r in range(3):
        rot = tri[r:] + tri[:r]
        _, i0, j0 = rot[0]
        key = tuple((m, i - i0, j - j0) for m, i, j in rot)
        if best is None or key < best:
            best = key
    return best


def _edge_key(a, b):
    """Directed edge ``a -> b`` up to translation."""
    return (a[0], b[0], b[1] - a[1], b[2] - a[2])


def _reverse(key):
    ma, mb, di, dj = key
    return (mb, ma, -di, -dj)


def _undirected(key):
    return min(key, _reverse(key))


class PeriodicTriangulation:
    """Triangle classes of a periodic triangulation of ``periodic_set``."""

    def __init__(self, periodic_set: PeriodicSet, triangles):
        self.periodic_set = periodic_set
        self.triangles = tuple(sorted({canonical_triangle(tuple(tuple(int(x) for x in v) for v in t))
                                       for t in triangles}))

    def __len__(self):
        return len(self.triangles)

    def __eq__(self, other):
        return (isinstance(other, PeriodicTriangulation)
                and other.periodic_set == self.periodic_set and other.triangles == self.triangles)

    def __hash__(self):
        return hash(self.triangles)

    def __repr__(self):
        return f"PeriodicTriangulation(motif={len(self.periodic_set.motif)}, classes={len(self)})"

    def coords(self, tri):
        return [self.periodic_set.lift(*v) for v in tri]

    def geometry(self):
        xy = np.array([p for t in self.triangles for p in self.coords(t)], dtype=float)
        idx = np.arange(len(xy)).reshape(-1, 3)
        return triangle_arrays(xy, idx)

    def _sides(self):
        """Map directed edge key -> (triangle position, rotation putting the edge at 1->2)."""
        sides = {}
        for k, t in enumerate(self.triangles):
            for r in range(3):
                key = _edge_key(t[(r + 1) % 3], t[(r + 2) % 3])
                if key in sides:
                    raise InconsistentPeriodicMesh(f"directed edge {key} used twice")
                sides[key] = (k, r)
        return sides

    def edge_classes(self):
        return sorted({_undirected(k) for k in self._sides()})

    def validate(self) -> None:
        """Check orientation, edge pairing, class count and covered area."""
        ps = self.periodic_set
        if len(self.triangles) != 2 * len(ps.motif):
            raise InconsistentPeriodicMesh(
                f"{len(self.triangles)} triangle classes, expected {2 * len(ps.motif)}")
        for t in self.triangles:
            (ax, ay), (bx, by), (cx, cy) = self.coords(t)
            if _kernels.orient2d(ax, ay, bx, by, cx, cy) <= 0:
                raise InconsistentPeriodicMesh(f"triangle {t} is not counterclockwise")
        sides = self._sides()
        for key in sides:
            if _reverse(key) not in sides:
                raise InconsistentPeriodicMesh(f"edge {key} has no partner")
        area = math.fsum(self.geometry().area.tolist())
        if abs(area - ps.cell_area) > 1e-9 * ps.cell_area:
            raise InconsistentPeriodicMesh(f"classes cover area {area}, cell area is {ps.cell_area}")

    def _quad(self, key):
        """Lifted ``(p, a, b, d)`` around directed edge ``a -> b`` of some class."""
        sides = self._sides()
        if key not in sides:
            key = _reverse(key)
            if key not in sides:
                raise NoSuchEdge(f"no edge class {key}")
        k1, r1 = sides[key]
        k2, r2 = sides[_reverse(key)]
        t1 = self.triangles[k1]
        p, a, b = t1[r1], t1[(r1 + 1) % 3], t1[(r1 + 2) % 3]
        t2 = self.triangles[k2]
        d, b2 = t2[r2], t2[(r2 + 1) % 3]
        si, sj = b[1] - b2[1], b[2] - b2[2]
        d = (d[0], d[1] + si, d[2] + sj)
        return k1, k2, p, a, b, d

    def is_locally_delaunay(self, key) -> bool:
        _, _, p, a, b, d = self._quad(key)
        (px, py), (ax, ay), (bx, by), (dx, dy) = self.coords((p, a, b, d))
        return _kernels.incircle(px, py, ax, ay, bx, by, dx, dy) <= 0

    def is_delaunay(self) -> bool:
        return all(self.is_locally_delaunay(e) for e in self.edge_classes())

    def flip(self, key) -> "PeriodicTriangulation":
        """Flip every translate of one edge class. Raises :class:`NonConvexQuad`."""
        k1, k2, p, a, b, d = self._quad(key)
        (px, py), (ax, ay), (bx, by), (dx, dy) = self.coords((p, a, b, d))
        o2 = _kernels.orient2d
        if o2(px, py, ax, ay, dx, dy) <= 0 or o2(px, py, dx, dy, bx, by) <= 0:
            raise NonConvexQuad(f"edge class {key} does not bound a strictly convex quadrilateral")
        keep = [t for k, t in enumerate(self.triangles) if k not in (k1, k2)]
        out = PeriodicTriangulation(self.periodic_set, keep + [(p, a, d), (p, d, b)])
        if len(out) != len(self):
            raise InconsistentPeriodicMesh("flip merged two triangle classes")
        return out


def periodic_delaunay(ps: PeriodicSet, max_replication: int = 33) -> PeriodicTriangulation:
    """Delaunay triangulation of the periodic set, read off a replicated patch.

    Triangles touching the central cell of a ``rep x rep`` patch are lifted
    to labels and canonicalised. The replication grows until the classes form
    a consistent periodic triangulation. Raises :class:`NotGeneralPosition`
    when four points are cocircular on an empty circle.
    """
    rep = 5
    last = None
    while rep <= max_replication:
        pts = gen_periodic(PeriodicSet(ps.basis, ps.motif, rep))
        dt = build_delaunay(pts, strict=True)
        c = rep // 2
        lab = [tuple(int(v) for v in row) for row in pts.labels.tolist()]
        tris = [tuple(lab[v] for v in t) for t in dt.triangles.tolist()]
        near = [t for t in tris if any(v[1] == c and v[2] == c for v in t)]
        tp = PeriodicTriangulation(ps, near)
        try:
            tp.validate()
            if tp.is_delaunay():
                return tp
        except InconsistentPeriodicMesh as exc:
            last = exc
        rep = 2 * rep + 1
    raise InconsistentPeriodicMesh(f"no consistent periodic Delaunay triangulation found ({last})")


def lattice_triangulation(ps: PeriodicSet, diagonal: str = "b1+b2") -> PeriodicTriangulation:
    """The two-class triangulation of a one-point lattice cut along a fixed diagonal.

    Useful when the Delaunay triangulation is not unique (square lattice).
    ``diagonal`` is ``"b1+b2"`` or ``"b2-b1"``.
    """
    if len(ps.motif) != 1:
        raise ValueError("lattice_triangulation needs a one-point motif")
    o = (0, 0, 0)
    if diagonal == "b1+b2":
        tris = [(o, (0, 1, 0), (0, 1, 1)), (o, (0, 1, 1), (0, 0, 1))]
    elif diagonal == "b2-b1":
        tris = [(o, (0, 1, 0), (0, 0, 1)), ((0, 1, 0), (0, 1, 1), (0, 0, 1))]
    else:
        raise ValueError("diagonal must be 'b1+b2' or 'b2-b1'")
    if ps.det < 0:
        tris = [(a, c, b) for a, b, c in tris]
    tp = PeriodicTriangulation(ps, tris)
    tp.validate()
    return tp


def random_periodic_flips(tp: PeriodicTriangulation, n_flips: int, seed: int,
                          q: float | None = None, max_attempts: int | None = None) -> PeriodicTriangulation:
    """Apply ``n_flips`` successful random edge-class flips.

    Candidates are drawn uniformly from the current edge classes; flips of
    non-convex quadrilaterals, or creating a circumradius above ``q``, are
    rejected and redrawn. Stops early after ``max_attempts`` draws
    (default ``50 * n_flips``).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    attempts = max_attempts if max_attempts is not None else 50 * max(n_flips, 1)
    done = 0
    for _ in range(attempts):
        if done >= n_flips:
            break
        edges = tp.edge_classes()
        key = edges[int(rng.integers(0, len(edges)))]
        try:
            cand = tp.flip(key)
        except (NonConvexQuad, InconsistentPeriodicMesh):
            continue
        if q is not None and float(cand.geometry().circumradius.max()) > q:
            continue
        tp = cand
        done += 1
    return tp


__all__ = ["PeriodicTriangulation", "canonical_triangle", "periodic_delaunay",
           "lattice_triangulation", "random_periodic_flips"]
