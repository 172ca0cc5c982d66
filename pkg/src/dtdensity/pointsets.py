"""Finite windows of Delaunay (r, R) sets and their certification.

All generators draw from ``numpy.random.Generator(PCG64(seed))`` and are
bit-for-bit reproducible for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .errors import DegenerateBasis, EmptyWindow, TooFewPoints
from .geom_core import Point, PointSet, Window, check_general_position
from .triangulation import build_delaunay

LATTICE_KINDS = ("triangular", "square")
MAX_REGENERATIONS = 50


@dataclass(frozen=True)
class DelaunayCertificate:
    r_lower: float
    R_upper: float
    inner_window: Window


@dataclass(frozen=True)
class PeriodicSet:
    """Motif points repeated over a lattice.

    ``replication`` copies are made along each basis vector when the set is
    materialised with :func:`gen_periodic`.
    """

    basis: tuple
    motif: tuple
    replication: int = 1

    def __post_init__(self):
        b = tuple((float(v[0]), float(v[1])) for v in self.basis)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "motif", tuple(Point(float(p[0]), float(p[1])) for p in self.motif))
        if len(b) != 2:
            raise DegenerateBasis("need two basis vectors")
        if _kernels.orient2d(0.0, 0.0, b[0][0], b[0][1], b[1][0], b[1][1]) == 0:
            raise DegenerateBasis("basis vectors are parallel")
        if not self.motif:
            raise ValueError("motif is empty")
        frac = np.array([self.to_fractional(p) for p in self.motif]) % 1.0
        for i in range(len(frac)):
            for j in range(i):
                dv = np.abs(frac[i] - frac[j])
                dv = np.minimum(dv, 1.0 - dv)
                if np.all(dv < 1e-12):
                    raise ValueError(f"motif points {j} and {i} coincide modulo the lattice")

    @property
    def det(self) -> float:
        (ax, ay), (bx, by) = self.basis
        return ax * by - ay * bx

    @property
    def cell_area(self) -> float:
        return abs(self.det)

    def to_fractional(self, p):
        (ax, ay), (bx, by) = self.basis
        d = self.det
        return ((p[0] * by - p[1] * bx) / d, (ax * p[1] - ay * p[0]) / d)

    def lift(self, m: int, i: int, j: int) -> Point:
        """Coordinates of motif point ``m`` translated by ``i*b1 + j*b2``."""
        (ax, ay), (bx, by) = self.basis
        p = self.motif[m]
        return Point(p.x + i * ax + j * bx, p.y + i * ay + j * by)


def _lattice_basis(kind, spacing):
    if kind == "triangular":
        return (spacing, 0.0), (0.5 * spacing, 0.5 * math.sqrt(3.0) * spacing)
    if kind == "square":
        return (spacing, 0.0), (0.0, spacing)
    raise ValueError(f"lattice_kind must be one of {LATTICE_KINDS}")


def _disk_displacements(rng, count, radius):
    r = radius * np.sqrt(rng.random(count))
    th = 2.0 * math.pi * rng.random(count)
    return np.stack([r * np.cos(th), r * np.sin(th)], axis=1)


def _offending_points(report):
    bad = set()
    for tup in report.collinear + report.cocircular:
        bad.update(tup)
    return sorted(bad)


def gen_perturbed_lattice(spacing: float, jitter: float, window: Window, seed: int,
                          lattice_kind: str = "triangular") -> PointSet:
    """Lattice points of ``window`` (lattice anchored at its centre), each moved
    by an independent uniform displacement of norm at most ``jitter``.

    With ``jitter > 0`` the result is checked for general position; offending
    points are re-drawn from a substream derived from ``(seed, attempt)``.
    """
    if not 0 <= jitter < spacing / 4:
        raise ValueError("jitter must satisfy 0 <= jitter < spacing/4")
    (ax, ay), (bx, by) = _lattice_basis(lattice_kind, spacing)
    R = window.radius
    cx, cy = window.center
    jmax = int(math.ceil(R / abs(by))) + 1
    imax = int(math.ceil(R / spacing + jmax * abs(bx) / spacing)) + 1
    jj, ii = np.meshgrid(np.arange(-jmax, jmax + 1), np.arange(-imax, imax + 1), indexing="ij")
    ii = ii.ravel()
    jj = jj.ravel()
    dx = ii * ax + jj * bx
    dy = ii * ay + jj * by
    keep = dx * dx + dy * dy <= R * R
    if not keep.any():
        raise EmptyWindow("no lattice point inside the window")
    xy = np.stack([cx + dx[keep], cy + dy[keep]], axis=1)
    meta = {"kind": lattice_kind, "spacing": spacing, "jitter": jitter, "seed": seed,
            "r_lower_bound": (spacing - 2 * jitter) / 2}
    if jitter == 0:
        return PointSet(xy, window=window, meta=meta)
    rng = np.random.Generator(np.random.PCG64(seed))
    base = xy.copy()
    xy = base + _disk_displacements(rng, len(base), jitter)
    for attempt in range(1, MAX_REGENERATIONS + 1):
        ps = PointSet(xy, window=window, meta=meta)
        if len(ps) < 3:
            return ps
        report = check_general_position(ps)
        if report.ok:
            return ps
        bad = _offending_points(report)
        sub = np.random.Generator(np.random.PCG64([seed, attempt]))
        xy = xy.copy()
        xy[bad] = base[bad] + _disk_displacements(sub, len(bad), jitter)
    raise RuntimeError("could not reach general position")


def _boundary_gaps(samples, window, d):
    """Midpoints of arcs of the window circle at distance >= d from every sample."""
    cx, cy = window.center
    R = window.radius
    if len(samples) == 0:
        return [Point(cx + R, cy)]
    rel = samples - np.array([cx, cy])
    rho = np.hypot(rel[:, 0], rel[:, 1])
    near = np.nonzero(rho > R - d)[0]
    intervals = []
    for k in near.tolist():
        r = rho[k]
        # arc of the circle within distance d of sample k: |theta - phi| < half
        cosv = (R * R + r * r - d * d) / (2 * R * r) if r > 0 else -2.0
        if cosv <= -1:
            return []  # one disk covers the whole circle
        if cosv >= 1:
            continue
        half = math.acos(cosv)
        phi = math.atan2(rel[k, 1], rel[k, 0]) % (2 * math.pi)
        intervals.append((phi - half, phi + half))
    if not intervals:
        return [Point(cx + R, cy)]
    # unwrap into [0, 2pi) and merge
    pieces = []
    for lo, hi in intervals:
        if lo < 0:
            pieces += [(lo + 2 * math.pi, 2 * math.pi), (0.0, hi)]
        elif hi > 2 * math.pi:
            pieces += [(lo, 2 * math.pi), (0.0, hi - 2 * math.pi)]
        else:
            pieces.append((lo, hi))
    pieces.sort()
    gaps = []
    cur = 0.0
    for lo, hi in pieces:
        if lo > cur:
            gaps.append((cur, lo))
        cur = max(cur, hi)
    if cur < 2 * math.pi:
        gaps.append((cur, 2 * math.pi))
    # merge a gap that wraps through angle 0
    if len(gaps) >= 2 and gaps[0][0] == 0.0 and gaps[-1][1] == 2 * math.pi:
        lo, hi = gaps.pop()
        g0 = gaps.pop(0)
        gaps.append((lo, g0[1] + 2 * math.pi))
    out = []
    for lo, hi in gaps:
        mid = 0.5 * (lo + hi)
        out.append(Point(cx + R * math.cos(mid), cy + R * math.sin(mid)))
    return out


def uncovered_locations(samples, window: Window, d: float):
    """Window locations at distance >= d from every sample, largest gaps first.

    An empty result certifies that ``samples`` is a maximal d-packing of the
    window: candidates are the Voronoi vertices inside the window and the
    midpoints of uncovered arcs of its boundary circle, which together
    contain a maximiser of the distance-to-nearest-sample function.
    """
    samples = np.asarray(samples, dtype=float).reshape(-1, 2)
    cx, cy = window.center
    R = window.radius
    cands = []
    if len(samples) >= 3:
        try:
            dt = build_delaunay(samples, strict=False)
        except Exception:
            dt = None
        if dt is not None:
            g = dt.geometry
            cc = g.circumcenter
            inside = np.hypot(cc[:, 0] - cx, cc[:, 1] - cy) <= R
            big = g.circumradius >= d
            for k in np.nonzero(inside & big)[0].tolist():
                cands.append(Point(float(cc[k, 0]), float(cc[k, 1])))
    else:
        cands.append(Point(cx, cy))
    cands += _boundary_gaps(samples, window, d)
    if not cands:
        return []
    arr = np.array(cands)
    if len(samples):
        dist, _ = cKDTree(samples).query(arr)
    else:
        dist = np.full(len(arr), np.inf)
    keep = dist >= d
    order = np.lexsort((arr[:, 1], arr[:, 0], -dist))
    return [cands[k] for k in order.tolist() if keep[k]]


def gen_poisson_disk(min_dist: float, window: Window, seed: int, rounds: int = 30) -> PointSet:
    """Maximal Poisson-disk sample of a disk window.

    Dart throwing over a background grid (cell side ``min_dist/sqrt(2)``, so a
    cell holds at most one sample) runs for ``rounds`` passes over the cells
    still empty; the remaining gaps are then filled deterministically from
    :func:`uncovered_locations` until none is left, which makes the sample
    maximal: every window location is closer than ``min_dist`` to a sample.
    """
    d = float(min_dist)
    if not 0 < d < window.radius:
        raise ValueError("need 0 < min_dist < window.radius")
    rng = np.random.Generator(np.random.PCG64(seed))
    cx, cy = window.center
    R = window.radius
    h = d / math.sqrt(2.0)
    nc = int(math.ceil(2 * R / h))
    x0, y0 = cx - R, cy - R
    grid = -np.ones((nc, nc), dtype=np.int64)
    ix, iy = np.meshgrid(np.arange(nc), np.arange(nc), indexing="ij")
    # nearest point of each cell to the centre decides if the cell meets the disk
    nx = np.clip(cx, x0 + ix * h, x0 + (ix + 1) * h)
    ny = np.clip(cy, y0 + iy * h, y0 + (iy + 1) * h)
    active = list(zip(*np.nonzero((nx - cx) ** 2 + (ny - cy) ** 2 <= R * R)))
    pts = []
    d2 = d * d
    for _ in range(rounds):
        if not active:
            break
        perm = rng.permutation(len(active))
        darts = rng.random((len(active), 2))
        still = []
        for k in perm.tolist():
            i, j = active[k]
            px = x0 + (i + darts[k, 0]) * h
            py = y0 + (j + darts[k, 1]) * h
            if (px - cx) ** 2 + (py - cy) ** 2 > R * R:
                still.append((i, j))
                continue
            ok = True
            for a in range(max(i - 2, 0), min(i + 3, nc)):
                for b in range(max(j - 2, 0), min(j + 3, nc)):
                    s = grid[a, b]
                    if s >= 0:
                        qx, qy = pts[s]
                        if (qx - px) ** 2 + (qy - py) ** 2 < d2:
                            ok = False
                            break
                if not ok:
                    break
            if ok:
                grid[i, j] = len(pts)
                pts.append((float(px), float(py)))
            else:
                still.append((i, j))
        active = sorted(still)

    samples = np.array(pts, dtype=float).reshape(-1, 2)
    while True:
        gaps = uncovered_locations(samples, window, d)
        if not gaps:
            break
        added = []
        tree = cKDTree(samples) if len(samples) else None
        for g in gaps:
            if tree is not None and tree.query(g)[0] < d:
                continue
            if any((g.x - a) ** 2 + (g.y - b) ** 2 < d2 for a, b in added):
                continue
            added.append((g.x, g.y))
        samples = np.vstack([samples, np.array(added)])
    meta = {"kind": "poisson", "min_dist": d, "seed": seed}
    ps = PointSet(samples, window=window, meta=meta)
    for attempt in range(1, MAX_REGENERATIONS + 1):
        if len(ps) < 3:
            return ps
        report = check_general_position(ps)
        if report.ok:
            return ps
        # nudge offending points inward by a tiny amount; packing is re-checked
        bad = _offending_points(report)
        sub = np.random.Generator(np.random.PCG64([seed, attempt]))
        xy = ps.xy.copy()
        for k in bad:
            for _ in range(100):
                cand = xy[k] + _disk_displacements(sub, 1, 1e-9 * d)[0]
                dist = np.hypot(*(np.delete(xy, k, axis=0) - cand).T).min()
                if dist >= d and math.hypot(cand[0] - cx, cand[1] - cy) <= R:
                    xy[k] = cand
                    break
        ps = PointSet(xy, window=window, meta=meta)
    raise RuntimeError("could not reach general position")


def gen_periodic(ps: PeriodicSet) -> PointSet:
    """Materialise ``replication x replication`` translates of the motif.

    Points are ordered by lattice row ``j``, then column ``i``, then motif
    index; ``labels`` holds ``(m, i, j)`` for each point.
    """
    rep = int(ps.replication)
    if rep < 1:
        raise ValueError("replication must be >= 1")
    xy = []
    labels = []
    for j in range(rep):
        for i in range(rep):
            for m in range(len(ps.motif)):
                xy.append(ps.lift(m, i, j))
                labels.append((m, i, j))
    return PointSet(xy, labels=labels, meta={"kind": "periodic"})


def _circle_nearest_max(tree, sites, center, rho):
    """Largest distance-to-nearest-site over the circle |x - center| = rho."""
    cx, cy = center
    best = 0.0
    # local maxima inside one Voronoi cell: point of the circle opposite the site
    rel = sites - np.array([cx, cy])
    nrm = np.hypot(rel[:, 0], rel[:, 1])
    safe = np.where(nrm > 0, nrm, 1.0)
    anti = np.stack([cx - rho * rel[:, 0] / safe, cy - rho * rel[:, 1] / safe], axis=1)
    anti[nrm == 0] = (cx + rho, cy)
    dist, idx = tree.query(anti)
    own = np.hypot(*(anti - sites).T)
    ok = own <= dist * (1 + 1e-12)
    if ok.any():
        best = max(best, float(dist[ok].max()))
    return best


def _bisector_circle_points(sites, edges, center, rho):
    """Points of the circle equidistant from the two endpoints of each edge."""
    a = sites[edges[:, 0]]
    b = sites[edges[:, 1]]
    m = 0.5 * (a + b) - np.asarray(center)
    dvec = b - a
    t = np.stack([-dvec[:, 1], dvec[:, 0]], axis=1)
    tt = np.sum(t * t, axis=1)
    mt = np.sum(m * t, axis=1)
    mm = np.sum(m * m, axis=1)
    disc = mt * mt - tt * (mm - rho * rho)
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    out = []
    for sgn in (-1.0, 1.0):
        s = (-mt + sgn * sq) / tt
        p = np.asarray(center) + m + s[:, None] * t
        out.append((p[ok], a[ok]))
    return out


def certify_r_R(points, inner: Window) -> DelaunayCertificate:
    """Packing and covering bounds of a finite set, the latter over ``inner``.

    ``r_lower`` is half the minimum pairwise distance. ``R_upper`` is the
    largest distance from a location of the closed disk ``inner`` to its
    nearest point: the maximum over Voronoi vertices inside ``inner``
    (Delaunay circumcentres, with their circumradii) and over the boundary
    circle (Voronoi-edge crossings and per-cell farthest points).
    """
    ps = PointSet.coerce(points)
    if len(ps) < 3:
        raise TooFewPoints("need at least three points")
    xy = ps.xy
    tree = cKDTree(xy)
    dmin = float(tree.query(xy, k=2)[0][:, 1].min())
    dt = build_delaunay(ps, strict=False)
    cx, cy = inner.center
    rho = inner.radius
    g = dt.geometry
    cc = g.circumcenter
    inside = (cc[:, 0] - cx) ** 2 + (cc[:, 1] - cy) ** 2 <= rho * rho
    R = float(g.circumradius[inside].max()) if inside.any() else 0.0
    edges = np.array(dt.signature, dtype=np.int64).reshape(-1, 2)
    for p, a in _bisector_circle_points(xy, edges, (cx, cy), rho):
        if len(p):
            dist, _ = tree.query(p)
            own = np.hypot(*(p - a).T)
            ok = own <= dist * (1 + 1e-12)
            if ok.any():
                R = max(R, float(dist[ok].max()))
    R = max(R, _circle_nearest_max(tree, xy, (cx, cy), rho))
    return DelaunayCertificate(r_lower=dmin / 2.0, R_upper=R, inner_window=inner)


def hull_clearance(points, center) -> float:
    """Distance from ``center`` to the boundary of the convex hull (0 if outside)."""
    from .triangulation import convex_hull

    ps = PointSet.coerce(points)
    hull = ps.xy[convex_hull(ps)]
    c = np.asarray(center, dtype=float)
    best = math.inf
    for k in range(len(hull)):
        a = hull[k]
        b = hull[(k + 1) % len(hull)]
        e = b - a
        cross = e[0] * (c[1] - a[1]) - e[1] * (c[0] - a[0])
        if cross < 0:
            return 0.0
        best = min(best, cross / math.hypot(*e))
    return best


def default_inner_window(points) -> Window:
    """Inner certification disk: the sampling window (or the largest disk
    around the bounding-box centre inside the hull) shrunk by twice a covering
    estimate taken on its central half."""
    ps = PointSet.coerce(points)
    if ps.window is not None:
        center, radius = ps.window.center, ps.window.radius
        radius = min(radius, hull_clearance(ps, center))
    else:
        lo = ps.xy.min(axis=0)
        hi = ps.xy.max(axis=0)
        center = Point(*((lo + hi) / 2).tolist())
        radius = hull_clearance(ps, center)
    if radius <= 0:
        raise ValueError("points do not surround a usable inner window")
    est = certify_r_R(ps, Window(center, radius / 2)).R_upper
    shrunk = radius - 2 * est
    if shrunk <= 0:
        raise ValueError("window too small for a covering certificate")
    return Window(center, shrunk)
