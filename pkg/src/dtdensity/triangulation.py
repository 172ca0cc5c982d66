"""Triangle meshes over a fixed point set: Delaunay construction, flips and
exhaustive flip-graph enumeration.

A :class:`Triangulation` is an immutable value. Operations that change it
(:func:`flip_edge`, :func:`random_bounded_triangulation`) return new values.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import (
    AllCollinear,
    BoundaryEdge,
    NoSuchEdge,
    NonConvexQuad,
    NotGeneralPosition,
    TooFewPoints,
)
from .geom_core import PointSet, check_general_position, triangle_arrays

DEFAULT_FLIP_CAP = 10 ** 6


def _edge(a, b):
    return (a, b) if a < b else (b, a)


class Triangulation:
    """Triangles (CCW index triples) plus adjacency and hull over a point set.

    ``neighbors[t, i]`` is the triangle across the edge opposite
    ``triangles[t, i]``, or -1 on the boundary. ``hull`` is the
    counterclockwise boundary cycle; it includes boundary vertices that are
    collinear with their neighbours.
    """

    def __init__(self, points: PointSet, triangles, neighbors, hull):
        self.points = points
        tri = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        nbr = np.array(neighbors, dtype=np.int64).reshape(-1, 3)
        tri.setflags(write=False)
        nbr.setflags(write=False)
        self.triangles = tri
        self.neighbors = nbr
        self.hull = tuple(int(v) for v in hull)

    @classmethod
    def from_triangles(cls, points, triangles) -> "Triangulation":
        """Rebuild adjacency and hull from bare CCW triangles (no validation)."""
        ps = PointSet.coerce(points)
        tri = [tuple(int(v) for v in t) for t in np.asarray(triangles, dtype=np.int64).reshape(-1, 3)]
        owner = {}
        for t, (a, b, c) in enumerate(tri):
            owner[(b, c)] = (t, 0)
            owner[(c, a)] = (t, 1)
            owner[(a, b)] = (t, 2)
        nbr = [[-1, -1, -1] for _ in tri]
        succ = {}
        for (a, b), (t, i) in owner.items():
            other = owner.get((b, a))
            if other is None:
                succ[a] = b
            else:
                nbr[t][i] = other[0]
        hull = []
        if succ:
            start = min(succ)
            v = start
            while True:
                hull.append(v)
                v = succ[v]
                if v == start or len(hull) > len(succ):
                    break
        return cls(ps, tri, nbr, hull)

    @classmethod
    def _from_lists(cls, points, V, N, hull):
        return cls(points, np.asarray(V).reshape(-1, 3), np.asarray(N).reshape(-1, 3), hull)

    def _lists(self):
        return self.triangles.ravel().tolist(), self.neighbors.ravel().tolist()

    def __len__(self):
        return len(self.triangles)

    def __repr__(self):
        return f"Triangulation(n={len(self.points)}, triangles={len(self)}, hull={len(self.hull)})"

    @cached_property
    def edge_map(self) -> dict:
        """Undirected edge -> list of (triangle, local index of the opposite vertex)."""
        out = {}
        for t, (a, b, c) in enumerate(self.triangles.tolist()):
            out.setdefault(_edge(b, c), []).append((t, 0))
            out.setdefault(_edge(c, a), []).append((t, 1))
            out.setdefault(_edge(a, b), []).append((t, 2))
        return out

    @cached_property
    def signature(self) -> tuple:
        """Canonical form: lexicographically sorted list of sorted edges."""
        return tuple(sorted(self.edge_map))

    @property
    def edges(self):
        return self.signature

    @property
    def interior_edges(self):
        return [e for e, owners in self.edge_map.items() if len(owners) == 2]

    @cached_property
    def geometry(self):
        return triangle_arrays(self.points.xy, self.triangles)

    def triangle_key_set(self) -> frozenset:
        return frozenset(tuple(sorted(t)) for t in self.triangles.tolist())


def _opposite(V, N, t, e):
    u = N[3 * t + e]
    for f in range(3):
        if N[3 * u + f] == t:
            return u, f
    raise AssertionError("adjacency is not involutive")


def _quad_is_convex(xs, ys, V, N, t, e):
    u, f = _opposite(V, N, t, e)
    p = V[3 * t + e]
    a = V[3 * t + (e + 1) % 3]
    b = V[3 * t + (e + 2) % 3]
    d = V[3 * u + f]
    o2 = _kernels.orient2d
    return (o2(xs[p], ys[p], xs[a], ys[a], xs[d], ys[d]) > 0
            and o2(xs[p], ys[p], xs[d], ys[d], xs[b], ys[b]) > 0)


def build_delaunay(points, seed: int = 0, strict: bool = True) -> Triangulation:
    """Delaunay triangulation by randomized incremental insertion and Lawson flips.

    ``seed`` fixes the insertion permutation. With ``strict`` the result is
    checked for uniqueness: a zero incircle test across any interior edge
    (four cocircular points on an empty circle) raises
    :class:`NotGeneralPosition`. Collinear triples elsewhere do not make the
    Delaunay triangulation ambiguous and are accepted.
    """
    ps = PointSet.coerce(points)
    n = len(ps)
    if n < 3:
        raise TooFewPoints("need at least three points")
    order = np.random.default_rng(seed).permutation(n)
    xs = ps.x.tolist()
    ys = ps.y.tolist()
    try:
        V, N, hull = _kernels.delaunay_core(xs, ys, order.tolist())
    except AllCollinear:
        raise NotGeneralPosition("collinear", range(min(n, 3))) from None
    if strict:
        ic = _kernels.incircle
        for t in range(len(V) // 3):
            for e in range(3):
                u = N[3 * t + e]
                if u <= t:
                    continue
                u, f = _opposite(V, N, t, e)
                p, a, b = V[3 * t + e], V[3 * t + (e + 1) % 3], V[3 * t + (e + 2) % 3]
                d = V[3 * u + f]
                if ic(xs[p], ys[p], xs[a], ys[a], xs[b], ys[b], xs[d], ys[d]) == 0:
                    raise NotGeneralPosition("cocircular", sorted((p, a, b, d)))
    return Triangulation._from_lists(ps, V, N, hull)


def convex_hull(points, include_collinear: bool = False) -> list[int]:
    """Counterclockwise hull cycle (monotone chain with exact orientation).

    Starts at the lexicographically smallest point. Boundary points collinear
    with their hull neighbours are kept only with ``include_collinear``.
    """
    ps = PointSet.coerce(points)
    n = len(ps)
    if n < 3:
        raise TooFewPoints("need at least three points")
    xs = ps.x.tolist()
    ys = ps.y.tolist()
    order = sorted(range(n), key=lambda i: (xs[i], ys[i]))
    o2 = _kernels.orient2d

    def chain(seq):
        out = []
        for i in seq:
            while len(out) >= 2:
                s = o2(xs[out[-2]], ys[out[-2]], xs[out[-1]], ys[out[-1]], xs[i], ys[i])
                if s < 0 or (s == 0 and not include_collinear):
                    out.pop()
                else:
                    break
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(order[::-1])
    if len(lower) + len(upper) - 2 < 3 or all(
            o2(xs[order[0]], ys[order[0]], xs[order[-1]], ys[order[-1]], xs[i], ys[i]) == 0
            for i in order):
        raise AllCollinear("all points are collinear")
    return lower[:-1] + upper[:-1]


def is_delaunay(t: Triangulation) -> bool:
    """True iff every interior edge is locally Delaunay."""
    xs = t.points.x.tolist()
    ys = t.points.y.tolist()
    V, N = t._lists()
    ic = _kernels.incircle
    for tt in range(len(V) // 3):
        for e in range(3):
            u = N[3 * tt + e]
            if u <= tt:
                continue
            u, f = _opposite(V, N, tt, e)
            p, a, b = V[3 * tt + e], V[3 * tt + (e + 1) % 3], V[3 * tt + (e + 2) % 3]
            d = V[3 * u + f]
            if ic(xs[p], ys[p], xs[a], ys[a], xs[b], ys[b], xs[d], ys[d]) > 0:
                return False
    return True


def flip_edge(t: Triangulation, edge) -> Triangulation:
    """Return a copy of ``t`` with ``edge`` replaced by the other diagonal of its quad."""
    key = _edge(int(edge[0]), int(edge[1]))
    owners = t.edge_map.get(key)
    if owners is None:
        raise NoSuchEdge(f"{key} is not an edge")
    if len(owners) == 1:
        raise BoundaryEdge(f"{key} is a hull edge")
    tri, e = owners[0]
    V, N = t._lists()
    if not _quad_is_convex(t.points.x, t.points.y, V, N, tri, e):
        raise NonConvexQuad(f"quadrilateral around {key} is not strictly convex")
    _kernels.flip(V, N, tri, e)
    return Triangulation._from_lists(t.points, V, N, t.hull)


@dataclass
class FlipGraphResult:
    """All triangulations reachable by flips, keyed by canonical signature."""

    triangulations: list = field(default_factory=list)  # [(signature, Triangulation)]
    count: int = 0
    truncated: bool = False
    delaunay_signature: tuple = ()

    @property
    def signatures(self):
        return [s for s, _ in self.triangulations]


def flip_graph(points, cap: int = DEFAULT_FLIP_CAP, seed: int = 0) -> FlipGraphResult:
    """Breadth-first enumeration of the flip graph starting at the Delaunay triangulation.

    The flip graph of a planar point set is connected, so an untruncated
    result lists every triangulation. ``truncated`` is set when ``cap``
    states were reached before the frontier emptied.
    """
    ps = PointSet.coerce(points)
    report = check_general_position(ps)
    if not report.ok:
        bad = (report.collinear or report.cocircular)[0]
        kind = "collinear" if report.collinear else "cocircular"
        raise NotGeneralPosition(kind, bad)
    dt = build_delaunay(ps, seed=seed)
    xs = ps.x.tolist()
    ys = ps.y.tolist()
    V0, N0 = dt._lists()

    def key(V):
        return frozenset(tuple(sorted(V[i:i + 3])) for i in range(0, len(V), 3))

    seen = {key(V0)}
    states = [(V0, N0)]
    queue = deque([0])
    truncated = False
    while queue:
        V, N = states[queue.popleft()]
        for t in range(len(V) // 3):
            for e in range(3):
                u = N[3 * t + e]
                if u <= t or not _quad_is_convex(xs, ys, V, N, t, e):
                    continue
                V2, N2 = V[:], N[:]
                _kernels.flip(V2, N2, t, e)
                k = key(V2)
                if k in seen:
                    continue
                if len(states) >= cap:
                    truncated = True
                    continue
                seen.add(k)
                states.append((V2, N2))
                queue.append(len(states) - 1)
    result = FlipGraphResult(truncated=truncated, delaunay_signature=dt.signature)
    for V, N in states:
        tt = Triangulation._from_lists(ps, V, N, dt.hull)
        result.triangulations.append((tt.signature, tt))
    result.count = len(states)
    return result


def random_bounded_triangulation(dt: Triangulation, q: float, k: int, seed: int) -> Triangulation:
    """Apply up to ``k`` random flips, rejecting any that creates a circumradius above ``q``.

    Each attempt draws a directed edge uniformly from a PCG64 generator
    seeded with ``seed`` (numpy ``Generator(PCG64(seed))``), so the result is
    reproducible across platforms. Hull edges and non-convex quads count as
    rejected attempts. Existing triangles are never checked against ``q``;
    only triangles created by a flip are.
    """
    if k <= 0:
        return dt
    rng = np.random.Generator(np.random.PCG64(seed))
    m = len(dt)
    draws = rng.integers(0, 3 * m, size=k).tolist()
    xs = dt.points.x.tolist()
    ys = dt.points.y.tolist()
    V, N = dt._lists()
    for d in draws:
        t, e = divmod(d, 3)
        if N[3 * t + e] < 0 or not _quad_is_convex(xs, ys, V, N, t, e):
            continue
        u, f = _opposite(V, N, t, e)
        p = V[3 * t + e]
        a = V[3 * t + (e + 1) % 3]
        b = V[3 * t + (e + 2) % 3]
        dd = V[3 * u + f]
        if (_circumradius(xs, ys, p, a, dd) > q or _circumradius(xs, ys, p, dd, b) > q):
            continue
        _kernels.flip(V, N, t, e)
    return Triangulation._from_lists(dt.points, V, N, dt.hull)


def _circumradius(xs, ys, i, j, k):
    a = math.hypot(xs[j] - xs[k], ys[j] - ys[k])
    b = math.hypot(xs[k] - xs[i], ys[k] - ys[i])
    c = math.hypot(xs[i] - xs[j], ys[i] - ys[j])
    area2 = abs((xs[j] - xs[i]) * (ys[k] - ys[i]) - (ys[j] - ys[i]) * (xs[k] - xs[i]))
    return a * b * c / (2.0 * area2)


def max_circumradius(t: Triangulation, center=None, radius: float | None = None) -> float:
    """Largest circumradius, i.e. the uniform-boundedness witness q(T).

    With ``center`` and ``radius`` only triangles whose three vertices lie in
    that closed disk are considered, which excludes hull slivers of finite
    windows.
    """
    r = t.geometry.circumradius
    if center is not None:
        d2 = np.sum((t.points.xy - np.asarray(center, dtype=float)) ** 2, axis=1)
        inside = np.all(d2[t.triangles] <= radius * radius, axis=1)
        r = r[inside]
    return float(r.max()) if len(r) else 0.0


def validate_triangulation(t: Triangulation, check_hull_contains: bool = True) -> None:
    """Check every structural invariant; raise ``AssertionError`` on the first failure.

    Soundness rests on a chain argument: if all triangles are positively
    oriented, every interior directed edge is matched by its reverse, and the
    unmatched edges form the convex hull cycle once, then each point of the
    hull is covered exactly once. That gives disjoint interiors and full
    coverage without pairwise intersection tests.
    """
    ps = t.points
    n = len(ps)
    xs = ps.x.tolist()
    ys = ps.y.tolist()
    V, N = t._lists()
    m = len(V) // 3
    o2 = _kernels.orient2d
    assert all(0 <= v < n for v in V), "vertex index out of range"
    assert set(V) == set(range(n)), "some points are not triangle vertices"
    directed = {}
    for tt in range(m):
        a, b, c = V[3 * tt:3 * tt + 3]
        assert o2(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) > 0, f"triangle {tt} not CCW"
        for i, (u, v) in enumerate(((b, c), (c, a), (a, b))):
            assert (u, v) not in directed, f"directed edge {(u, v)} repeated"
            directed[(u, v)] = (tt, i)
    succ = {}
    for (u, v), (tt, i) in directed.items():
        other = directed.get((v, u))
        nb = N[3 * tt + i]
        if other is None:
            assert nb == -1, f"boundary edge {(u, v)} has a neighbour"
            assert u not in succ, f"boundary pinched at {u}"
            succ[u] = v
        else:
            assert nb == other[0], f"adjacency mismatch at {(u, v)}"
            assert N[3 * other[0] + other[1]] == tt, "adjacency not involutive"
    hull = list(t.hull)
    assert len(hull) == len(succ), "hull length differs from boundary edge count"
    for i, v in enumerate(hull):
        assert succ.get(v) == hull[(i + 1) % len(hull)], "hull does not follow boundary edges"
    h = len(hull)
    for i in range(h):
        a, b, c = hull[i - 1], hull[i], hull[(i + 1) % h]
        assert o2(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) >= 0, f"hull reflex at {b}"
    hx = np.array([xs[v] for v in hull])
    hy = np.array([ys[v] for v in hull])
    hull_area = 0.5 * float(np.sum(hx * np.roll(hy, -1) - np.roll(hx, -1) * hy))
    tri_area = float(np.sum(t.geometry.area)) if m else 0.0
    assert math.isclose(hull_area, tri_area, rel_tol=1e-9), "hull winds more than once"
    assert m == 2 * n - h - 2, f"Euler count: {m} != 2*{n} - {h} - 2"
    if check_hull_contains:
        _assert_inside_hull(ps.xy, hull)


def _assert_inside_hull(xy, hull):
    hp = xy[hull]
    nxt = np.roll(hp, -1, axis=0)
    o2 = _kernels.orient2d
    for k in range(len(hull)):
        ex, ey = nxt[k] - hp[k]
        cross = ex * (xy[:, 1] - hp[k, 1]) - ey * (xy[:, 0] - hp[k, 0])
        scale = (abs(ex) + abs(ey)) * (np.abs(xy[:, 0] - hp[k, 0]) + np.abs(xy[:, 1] - hp[k, 1]))
        suspect = np.nonzero(cross <= 1e-12 * scale)[0]
        for i in suspect.tolist():
            s = o2(hp[k, 0], hp[k, 1], nxt[k, 0], nxt[k, 1], xy[i, 0], xy[i, 1])
            assert s >= 0, f"point {i} outside hull edge {hull[k]}"
