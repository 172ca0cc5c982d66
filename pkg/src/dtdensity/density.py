"""Windowed densities of triangle functionals.

For a triangulation ``T`` of a large finite window and a disk ``B`` of radius
``alpha``:

* the *core* is the set of triangles with all three vertices in ``B``;
* its *completion* adds triangles, without new vertices, filling the pockets
  between the core and the convex hull of the core vertices;
* the *density* is the functional summed over the core divided by the disk
  area ``pi * alpha**2``.

Ratios of core to completed sums and the growth of triangle counts with
``alpha`` are reported alongside, as diagnostics for how fast boundary terms
vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import (AlphaExceedsSafeWindow, DisconnectedCore, EmptyCore,
                     InconsistentPeriodicMesh)
from .functionals import FunctionalSpec, eval_arrays
from .geom_core import Point, PointSet, triangle_arrays
from .triangulation import Triangulation, convex_hull

POCKET_STRATEGIES = ("quality", "index")


@dataclass
class WindowComplex:
    """Core of a triangulation inside a closed disk, and optionally its completion.

    ``core_triangles`` and ``pocket_triangles`` index the full point set of
    ``source``; ``hull`` is the counterclockwise hull cycle of the core
    vertices (collinear boundary vertices included).
    """

    alpha: float
    center: Point
    source: Triangulation
    core_triangles: np.ndarray
    k_alpha: int
    hull: tuple = ()
    pocket_triangles: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), dtype=np.int64))
    completed: bool = False

    @property
    def core_vertices(self) -> np.ndarray:
        return np.unique(self.core_triangles)

    @property
    def all_triangles(self) -> np.ndarray:
        return np.vstack([self.core_triangles, self.pocket_triangles])

    def as_triangulation(self) -> Triangulation:
        """Completed complex re-indexed onto its own vertex set."""
        if not self.completed:
            raise ValueError("complex has not been completed")
        verts = self.core_vertices
        remap = {int(v): i for i, v in enumerate(verts)}
        tris = [[remap[int(v)] for v in t] for t in self.all_triangles]
        sub = PointSet(self.source.points.xy[verts])
        return Triangulation.from_triangles(sub, tris)


def _sq_dist(t: Triangulation, center) -> np.ndarray:
    c = np.asarray(center, dtype=float)
    return np.sum((t.points.xy - c) ** 2, axis=1)


def _tri_max_sq(t: Triangulation, center) -> np.ndarray:
    return _sq_dist(t, center)[t.triangles].max(axis=1)


def restrict_to_ball(t: Triangulation, alpha: float, center=(0.0, 0.0)) -> WindowComplex:
    """Triangles of ``t`` with all three vertices in the closed disk of radius ``alpha``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    mask = _tri_max_sq(t, center) <= alpha * alpha
    core = t.triangles[mask]
    return WindowComplex(alpha=float(alpha), center=Point(float(center[0]), float(center[1])),
                         source=t, core_triangles=np.array(core), k_alpha=int(len(core)))


# --------------------------------------------------------------- completion

def _core_components(core):
    """Number of edge-connected components of a triangle list."""
    parent = list(range(len(core)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    first = {}
    for k, (a, b, c) in enumerate(core):
        for e in ((a, b), (b, c), (c, a)):
            key = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
            other = first.setdefault(key, k)
            if other != k:
                ra, rb = find(other), find(k)
                if ra != rb:
                    parent[ra] = rb
    return len({find(i) for i in range(len(core))})


def _split_simple(loop):
    """Split a closed vertex loop at repeated vertices into simple loops."""
    out = []
    stack = []
    pos = {}
    for v in loop:
        if v in pos:
            k = pos[v]
            piece = stack[k:]
            for w in piece[1:]:
                del pos[w]
            del stack[k + 1:]
            if len(piece) >= 3:
                out.append(piece)
        else:
            pos[v] = len(stack)
            stack.append(v)
    if len(stack) >= 3:
        out.append(stack)
    return out


def _ear_clip(poly, xs, ys, strategy):
    """Triangulate a simple counterclockwise polygon without new vertices.

    ``quality`` clips the ear with the smallest (sum of squared edges)/area,
    ``index`` the ear at the lowest vertex index; ties go to the lowest index.
    """
    o2 = _kernels.orient2d
    poly = list(poly)
    out = []
    while len(poly) > 3:
        n = len(poly)
        best = None
        for k in range(n):
            a, b, c = poly[k - 1], poly[k], poly[(k + 1) % n]
            if o2(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) <= 0:
                continue
            blocked = False
            for v in poly:
                if v in (a, b, c):
                    continue
                if (o2(xs[a], ys[a], xs[b], ys[b], xs[v], ys[v]) >= 0
                        and o2(xs[b], ys[b], xs[c], ys[c], xs[v], ys[v]) >= 0
                        and o2(xs[c], ys[c], xs[a], ys[a], xs[v], ys[v]) >= 0):
                    blocked = True
                    break
            if blocked:
                continue
            if strategy == "quality":
                l2 = ((xs[a] - xs[b]) ** 2 + (ys[a] - ys[b]) ** 2
                      + (xs[b] - xs[c]) ** 2 + (ys[b] - ys[c]) ** 2
                      + (xs[c] - xs[a]) ** 2 + (ys[c] - ys[a]) ** 2)
                area = abs((xs[b] - xs[a]) * (ys[c] - ys[a]) - (ys[b] - ys[a]) * (xs[c] - xs[a]))
                score = (l2 / area if area > 0 else math.inf, b)
            else:
                score = (b,)
            if best is None or score < best[0]:
                best = (score, k)
        if best is None:
            raise DisconnectedCore("pocket polygon could not be ear-clipped")
        k = best[1]
        out.append((poly[k - 1], poly[k], poly[(k + 1) % len(poly)]))
        del poly[k]
    a, b, c = poly
    if o2(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) <= 0:
        raise DisconnectedCore("degenerate pocket remainder")
    out.append((a, b, c))
    return out


def _trace_pockets(hull, core_boundary, xs, ys):
    """Faces between the hull cycle and the core, each as a vertex loop (CCW).

    Pocket half-edges keep the pocket on their left: hull edges that are not
    core edges, and reversed core boundary edges. Faces are traced by taking,
    at each vertex, the first outgoing half-edge clockwise from the way back.
    """
    h = len(hull)
    half = []
    hull_edges = set()
    for k in range(h):
        e = (hull[k], hull[(k + 1) % h])
        if e not in core_boundary:
            half.append(e)
            hull_edges.add(e)
    used_core = {e for e in core_boundary if (e[0], e[1]) in {(hull[k], hull[(k + 1) % h]) for k in range(h)}}
    for a, b in core_boundary:
        if (a, b) not in used_core:
            half.append((b, a))
    out_edges = {}
    for a, b in half:
        out_edges.setdefault(a, []).append(b)

    def angle(u, v):
        return math.atan2(ys[v] - ys[u], xs[v] - xs[u])

    remaining = set(half)
    faces = []
    for start in half:
        if start not in remaining:
            continue
        loop = []
        e = start
        while True:
            remaining.discard(e)
            loop.append(e[0])
            w, x = e
            cands = out_edges.get(x, [])
            if not cands:
                raise DisconnectedCore("pocket boundary is not closed")
            if len(cands) == 1:
                y = cands[0]
            else:
                back = angle(x, w)
                # clockwise sweep from the back direction: smallest positive clockwise turn
                y = min(cands, key=lambda c: (back - angle(x, c)) % (2 * math.pi) or 2 * math.pi)
            e = (x, y)
            if e == start:
                break
            if e not in remaining:
                raise DisconnectedCore("pocket tracing revisited an edge")
            if len(loop) > len(half):
                raise DisconnectedCore("pocket tracing did not terminate")
        has_hull = any((loop[i], loop[(i + 1) % len(loop)]) in hull_edges for i in range(len(loop)))
        faces.append((loop, has_hull))
    return faces


def complete_to_hull(wc: WindowComplex, strategy: str = "quality") -> WindowComplex:
    """Fill the region between the core and the convex hull of its vertices.

    Each pocket is triangulated by ear clipping on existing vertices only.
    Raises :class:`EmptyCore` for an empty core and :class:`DisconnectedCore`
    when the core is not edge-connected or has holes.
    """
    if strategy not in POCKET_STRATEGIES:
        raise ValueError(f"strategy must be one of {POCKET_STRATEGIES}")
    core = [tuple(int(v) for v in tr) for tr in wc.core_triangles.tolist()]
    if not core:
        raise EmptyCore(f"no triangle inside the ball of radius {wc.alpha}")
    if _core_components(core) != 1:
        raise DisconnectedCore("core is not edge-connected")
    directed = set()
    for a, b, c in core:
        directed.update(((a, b), (b, c), (c, a)))
    boundary = {(a, b) for a, b in directed if (b, a) not in directed}
    verts = sorted({v for tr in core for v in tr})
    xy = wc.source.points.xy
    sub = PointSet(xy[verts])
    hull = [verts[i] for i in convex_hull(sub, include_collinear=True)]
    xs = xy[:, 0].tolist()
    ys = xy[:, 1].tolist()

    pockets = []
    for loop, has_hull in _trace_pockets(hull, boundary, xs, ys):
        if not has_hull:
            raise DisconnectedCore("core has a hole")
        pockets.extend(_split_simple(loop))
    pocket_tris = []
    for poly in pockets:
        pocket_tris.extend(_ear_clip(poly, xs, ys, strategy))

    n_a = len(verts)
    h_a = len(hull)
    if len(core) + len(pocket_tris) != 2 * n_a - h_a - 2:
        raise DisconnectedCore(
            f"completion has {len(core) + len(pocket_tris)} triangles, expected {2 * n_a - h_a - 2}")
    return replace(wc, hull=tuple(hull),
                   pocket_triangles=np.array(pocket_tris, dtype=np.int64).reshape(-1, 3),
                   completed=True)


# --------------------------------------------------------------- scans

def _check_alphas(alphas):
    al = [float(a) for a in alphas]
    if not al:
        raise ValueError("need at least one alpha")
    if al[0] <= 0 or any(b <= a for a, b in zip(al, al[1:])):
        raise ValueError("alphas must be positive and strictly increasing")
    return al


def safe_radius(t: Triangulation, center) -> float:
    """Distance from ``center`` to the hull boundary of ``t`` (0 if outside)."""
    xy = t.points.xy
    hull = xy[list(t.hull)]
    c = np.asarray(center, dtype=float)
    best = math.inf
    for k in range(len(hull)):
        a = hull[k]
        e = hull[(k + 1) % len(hull)] - a
        cross = e[0] * (c[1] - a[1]) - e[1] * (c[0] - a[0])
        if cross < 0:
            return 0.0
        best = min(best, cross / math.hypot(e[0], e[1]))
    return best


def check_window_margin(t: Triangulation, alphas, center, q: float | None = None) -> float:
    """Enforce ``alpha_max + 2q <= distance(center, hull boundary)``.

    A triangle of circumradius at most ``q`` with its vertices in the ball of
    radius alpha has its circumdisk inside the ball of radius alpha + 2q, so
    triangles counted at alpha do not depend on where the window was cut.
    ``q`` defaults to the largest circumradius among triangles inside the
    largest ball. Returns the ``q`` used.
    """
    amax = max(alphas)
    room = safe_radius(t, center)
    if amax >= room:
        raise AlphaExceedsSafeWindow(f"alpha={amax:g} reaches the hull boundary at distance {room:g}")
    if q is None:
        mask = _tri_max_sq(t, center) <= amax * amax
        q = float(t.geometry.circumradius[mask].max()) if mask.any() else 0.0
    if amax + 2 * q > room:
        raise AlphaExceedsSafeWindow(
            f"alpha={amax:g} needs window radius >= {amax + 2 * q:g}; available {room:g}")
    return q


@dataclass
class DensityScan:
    functional: FunctionalSpec
    alphas: list
    sums: list
    densities: list
    liminf_estimate: float
    center: Point = Point(0.0, 0.0)
    k_alphas: list = field(default_factory=list)


def liminf_estimate(scan_or_densities, tail_fraction: float = 0.5) -> float:
    """Minimum over the last ``ceil(tail_fraction * len)`` densities.

    A finite scan cannot certify a lower limit; this is the declared
    estimator, and the full sequence is always reported next to it.
    """
    dens = getattr(scan_or_densities, "densities", scan_or_densities)
    dens = list(dens)
    if not dens:
        raise ValueError("empty density sequence")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must be in (0, 1]")
    k = math.ceil(tail_fraction * len(dens))
    return min(dens[-k:])


def density_scan(t: Triangulation, spec: FunctionalSpec, alphas, center=(0.0, 0.0),
                 tail_fraction: float = 0.5, check_window: bool = True,
                 q: float | None = None) -> DensityScan:
    al = _check_alphas(alphas)
    if check_window:
        check_window_margin(t, al, center, q)
    vals = eval_arrays(spec, t.geometry)
    rmax = _tri_max_sq(t, center)
    sums, dens, ks = [], [], []
    for a in al:
        mask = rmax <= a * a
        s = math.fsum(vals[mask].tolist())
        sums.append(s)
        dens.append(s / (math.pi * a * a))
        ks.append(int(mask.sum()))
    return DensityScan(functional=spec, alphas=al, sums=sums, densities=dens,
                       liminf_estimate=liminf_estimate(dens, tail_fraction),
                       center=Point(float(center[0]), float(center[1])), k_alphas=ks)


_SCALE_ZERO_TOL = 1e-12


def _magnitude(spec, g):
    """Per-triangle size scale used to decide whether a sum is zero."""
    k = spec.kind
    if k == "F1":
        return g.circumradius ** spec.exponent_a
    if k == "F2":
        return g.sum_sq_edges / g.area
    if k == "F3":
        return g.inradius
    if k == "F4":
        return g.sum_sq_edges * g.area
    if k == "F5":
        return g.circumradius ** spec.exponent_a * g.area
    return g.circumradius ** 2 * g.area


@dataclass
class RatioSeries:
    """Core value over completed value per alpha.

    ``status`` is ``"ok"``, ``"zero-denominator"`` (completed value is zero
    relative to its magnitude scale) or ``"pre-asymptotic"`` (core empty,
    disconnected or with holes); ``ratios`` is None for the last two.
    """

    functional: FunctionalSpec
    alphas: list
    core_values: list
    completed_values: list
    ratios: list
    status: list
    pocket_counts: list = field(default_factory=list)

    @property
    def deviations(self):
        return [None if r is None else abs(r - 1.0) for r in self.ratios]


def ratio_series(t: Triangulation, spec: FunctionalSpec, alphas, center=(0.0, 0.0),
                 strategy: str = "quality", check_window: bool = True,
                 q: float | None = None) -> RatioSeries:
    al = _check_alphas(alphas)
    if check_window:
        check_window_margin(t, al, center, q)
    xy = t.points.xy
    out = RatioSeries(spec, al, [], [], [], [])
    for a in al:
        wc = restrict_to_ball(t, a, center)
        core_g = triangle_arrays(xy, wc.core_triangles) if wc.k_alpha else None
        core_v = math.fsum(eval_arrays(spec, core_g).tolist()) if core_g is not None else 0.0
        try:
            wc = complete_to_hull(wc, strategy)
        except (EmptyCore, DisconnectedCore):
            out.core_values.append(core_v)
            out.completed_values.append(None)
            out.ratios.append(None)
            out.status.append("pre-asymptotic")
            out.pocket_counts.append(None)
            continue
        pg = triangle_arrays(xy, wc.pocket_triangles) if len(wc.pocket_triangles) else None
        pocket_v = math.fsum(eval_arrays(spec, pg).tolist()) if pg is not None else 0.0
        comp = math.fsum([core_v, pocket_v])
        scale = math.fsum(_magnitude(spec, core_g).tolist())
        if pg is not None:
            scale += math.fsum(_magnitude(spec, pg).tolist())
        out.core_values.append(core_v)
        out.completed_values.append(comp)
        out.pocket_counts.append(int(len(wc.pocket_triangles)))
        if abs(comp) <= _SCALE_ZERO_TOL * scale:
            out.ratios.append(None)
            out.status.append("zero-denominator")
        else:
            out.ratios.append(core_v / comp)
            out.status.append("ok")
    return out


@dataclass
class GrowthReport:
    alphas: list
    k_alphas: list
    boundary_counts: list
    k_over_alpha_sq: list
    boundary_over_sqrt_k: list


def growth_counts(t: Triangulation, alphas, center=(0.0, 0.0)) -> GrowthReport:
    """Triangle counts inside the ball and straddling its boundary circle.

    A triangle straddles the circle when it has vertices both in the closed
    ball and outside it.
    """
    al = _check_alphas(alphas)
    d2 = _sq_dist(t, center)[t.triangles]
    hi = d2.max(axis=1)
    lo = d2.min(axis=1)
    ks, bs, kr, br = [], [], [], []
    for a in al:
        a2 = a * a
        k = int(np.count_nonzero(hi <= a2))
        b = int(np.count_nonzero((lo <= a2) & (hi > a2)))
        ks.append(k)
        bs.append(b)
        kr.append(k / a2)
        br.append(b / math.sqrt(k) if k else math.nan)
    return GrowthReport(al, ks, bs, kr, br)


def periodic_density(ps, tp, spec: FunctionalSpec) -> float:
    """Exact density of a periodic triangulation: per-domain sum over cell area."""
    from .periodic import PeriodicTriangulation

    if not isinstance(tp, PeriodicTriangulation) or tp.periodic_set != ps:
        raise InconsistentPeriodicMesh("triangulation does not belong to this periodic set")
    tp.validate()
    vals = eval_arrays(spec, tp.geometry())
    return math.fsum(vals.tolist()) / ps.cell_area
