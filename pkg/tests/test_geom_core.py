import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import frac_incircle, frac_orient
from dtdensity import _kernels, _pykernels
from dtdensity.errors import ContractError, DegenerateTriangle, DuplicatePoints
from dtdensity.geom_core import (PointSet, Sign, Window, check_general_position, incircle,
                                 orient2d, triangle_arrays, triangle_geometry)
from dtdensity.pointsets import gen_perturbed_lattice

coord = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)
# dyadic grid points: keeps exact areas representable (no underflow to zero)
grid_point = st.tuples(*(st.integers(-10 ** 6, 10 ** 6).map(lambda k: k / 1024),) * 2)


# ---------------------------------------------------------------- orient2d

@pytest.mark.parametrize("p,q,r,expected", [
    ((0, 0), (1, 0), (0, 1), Sign.POSITIVE),
    ((0, 0), (1, 1), (2, 2), Sign.ZERO),
    ((0, 0), (0, 1), (1, 0), Sign.NEGATIVE),
])
def test_orient2d_examples(p, q, r, expected):
    assert orient2d(p, q, r) is expected


@given(point, point, point)
def test_orient2d_antisymmetry(p, q, r):
    s = orient2d(p, q, r)
    assert orient2d(q, p, r) == -s
    assert orient2d(p, r, q) == -s
    assert orient2d(r, q, p) == -s


@given(point, point, point)
def test_orient2d_matches_rational_oracle(p, q, r):
    assert orient2d(p, q, r) == frac_orient(p, q, r)


# ---------------------------------------------------------------- incircle

@pytest.mark.parametrize("s,expected", [
    ((0.1, 0.1), Sign.POSITIVE),
    ((1, 1), Sign.ZERO),
    ((2, 2), Sign.NEGATIVE),
])
def test_incircle_examples(s, expected):
    assert incircle((0, 0), (1, 0), (0, 1), s) is expected


def test_incircle_rejects_clockwise_triple():
    with pytest.raises(ContractError):
        incircle((0, 0), (0, 1), (1, 0), (0.2, 0.2))


@given(point, point, point, point)
def test_incircle_matches_rational_oracle(p, q, r, s):
    o = frac_orient(p, q, r)
    if o == 0:
        return
    if o < 0:
        q, r = r, q
    assert incircle(p, q, r, s) == frac_incircle(p, q, r, s)


def test_incircle_zero_is_cyclic():
    p, q, r, s = (0, 0), (1, 0), (0, 1), (1, 1)
    assert incircle(p, q, r, s) == 0
    assert incircle(q, r, p, s) == 0
    assert incircle(r, p, q, s) == 0


def _ulp_nudge(rng, a):
    steps = rng.integers(-1, 2, size=a.shape)
    out = a.copy()
    out = np.where(steps > 0, np.nextafter(out, np.inf), out)
    out = np.where(steps < 0, np.nextafter(out, -np.inf), out)
    return out


@pytest.mark.parametrize("backend", ["python", "compiled"])
def test_predicates_near_degenerate_1e5(backend):
    """10^5 collinear / cocircular configurations nudged by at most one ulp per coordinate."""
    if backend == "compiled":
        ck = pytest.importorskip("dtdensity._ckernels")
        o2, ic = ck.orient2d, ck.incircle
    else:
        o2, ic = _pykernels.orient2d, _pykernels.incircle
    rng = np.random.default_rng(7)
    n = 50_000
    # collinear: points on random lines, evaluated at parameters t in [-2, 2]
    base = rng.uniform(-100, 100, size=(n, 2))
    dirs = rng.uniform(-1, 1, size=(n, 2))
    ts = rng.uniform(-2, 2, size=(n, 3))
    pts = base[:, None, :] + ts[:, :, None] * dirs[:, None, :]
    pts = _ulp_nudge(rng, pts)
    mismatches = 0
    for row in pts.tolist():
        p, q, r = row
        if o2(*p, *q, *r) != frac_orient(p, q, r):
            mismatches += 1
    # cocircular: four points on a random circle, rounded, then nudged
    cen = rng.uniform(-50, 50, size=(n, 2))
    rad = rng.uniform(0.1, 20, size=n)
    ang = np.sort(rng.uniform(0, 2 * np.pi, size=(n, 4)), axis=1)
    circ = cen[:, None, :] + rad[:, None, None] * np.stack([np.cos(ang), np.sin(ang)], axis=2)
    circ = _ulp_nudge(rng, circ)
    for row in circ.tolist():
        p, q, r, s = row
        o = frac_orient(p, q, r)
        if o == 0:
            continue
        if o < 0:
            q, r = r, q
        if ic(*p, *q, *r, *s) != frac_incircle(p, q, r, s):
            mismatches += 1
    assert mismatches == 0


def test_predicates_exact_on_huge_and_tiny_magnitudes():
    for scale in (1e-300, 1e-160, 1e150, 1e290):
        p, q, r = (0.0, 0.0), (scale, scale), (2 * scale, 2 * scale)
        assert _kernels.orient2d(*p, *q, *r) == 0
        assert orient2d(p, q, (scale, 3 * scale)) == frac_orient(p, q, (scale, 3 * scale))


@given(point, point, point, st.floats(min_value=1e-3, max_value=1e3))
def test_signs_invariant_under_power_of_two_scaling(p, q, r, k):
    s = 2.0 ** round(math.log2(k))
    scaled = [(a * s, b * s) for a, b in (p, q, r)]
    assert orient2d(*scaled) == orient2d(p, q, r)


# ---------------------------------------------------------------- triangle geometry

def test_unit_equilateral_geometry():
    g = triangle_geometry((0, 0), (1, 0), (0.5, math.sqrt(3) / 2))
    assert g.area == pytest.approx(math.sqrt(3) / 4, rel=1e-12)
    assert g.circumradius == pytest.approx(1 / math.sqrt(3), rel=1e-12)
    assert g.inradius == pytest.approx(1 / (2 * math.sqrt(3)), rel=1e-12)
    assert g.barycenter.x == pytest.approx(g.circumcenter.x, abs=1e-12)
    assert g.barycenter.y == pytest.approx(g.circumcenter.y, abs=1e-12)


def test_right_triangle_geometry():
    g = triangle_geometry((0, 0), (1, 0), (0, 1))
    assert g.area == 0.5
    assert g.circumradius == pytest.approx(math.sqrt(2) / 2, rel=1e-12)
    assert g.inradius == pytest.approx((2 - math.sqrt(2)) / 2, rel=1e-12)
    assert tuple(g.circumcenter) == pytest.approx((0.5, 0.5), abs=1e-15)
    assert tuple(g.barycenter) == pytest.approx((1 / 3, 1 / 3), abs=1e-15)
    # a1 is opposite p
    assert g.edge_lengths == pytest.approx((math.sqrt(2), 1.0, 1.0))


def test_collinear_triangle_rejected():
    with pytest.raises(DegenerateTriangle):
        triangle_geometry((0, 0), (1, 1), (2, 2))
    with pytest.raises(DegenerateTriangle):
        triangle_arrays(np.array([[0, 0], [1, 1], [2, 2.0]]), [[0, 1, 2]])


def test_near_flat_triangle_gets_exact_nonzero_area():
    # the float cross product of these points cancels to zero; the true area does not
    h = math.sqrt(3) / 2
    p, q, r = (-1.5, -3 * h), (0.0, 0.0), (1.5, 3 * h)
    r = (r[0], np.nextafter(r[1], 10))
    assert frac_orient(p, q, r) != 0
    g = triangle_geometry(p, q, r)
    assert g.area > 0 and math.isfinite(g.circumradius)
    arr = triangle_arrays(np.array([p, q, r]), [[0, 1, 2]])
    assert arr.area[0] == g.area


nondegenerate = st.tuples(point, point, point).filter(lambda t: abs(
    (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0])) > 1e-3 * (
    1 + max(abs(v) for pt in t for v in pt)) ** 2)


@given(nondegenerate)
def test_geometry_identities(tri):
    p, q, r = tri
    g = triangle_geometry(p, q, r)
    semi = sum(g.edge_lengths) / 2
    assert g.area == pytest.approx(g.inradius * semi, rel=1e-12)
    # Euler: R >= 2 rho
    assert g.circumradius >= 2 * g.inradius * (1 - 1e-12)
    d = [math.hypot(v[0] - g.circumcenter.x, v[1] - g.circumcenter.y) for v in (p, q, r)]
    assert max(d) == pytest.approx(min(d), rel=1e-9)


@given(nondegenerate, st.floats(min_value=0.01, max_value=100))
def test_geometry_scaling(tri, s):
    g = triangle_geometry(*tri)
    h = triangle_geometry(*[(a * s, b * s) for a, b in tri])
    assert h.area == pytest.approx(g.area * s * s, rel=1e-9)
    assert h.circumradius == pytest.approx(g.circumradius * s, rel=1e-9)
    assert h.inradius == pytest.approx(g.inradius * s, rel=1e-9)


@settings(max_examples=50)
@given(st.lists(grid_point, min_size=3, max_size=12, unique=True).filter(
    lambda pts: any(frac_orient(pts[0], pts[1], c) != 0 for c in pts[2:])))
def test_triangle_arrays_agree_with_scalar_version(pts):
    xy = np.array(pts)
    tris = []
    for k in range(2, len(pts)):
        o = frac_orient(pts[0], pts[1], pts[k])
        if o > 0:
            tris.append((0, 1, k))
        elif o < 0:
            tris.append((0, k, 1))
    arr = triangle_arrays(xy, tris)
    for i, (a, b, c) in enumerate(tris):
        g = triangle_geometry(xy[a], xy[b], xy[c])
        assert arr.area[i] == pytest.approx(g.area, rel=1e-12)
        assert arr.circumradius[i] == pytest.approx(g.circumradius, rel=1e-12)


# ---------------------------------------------------------------- point sets and general position

def test_pointset_rejects_duplicates_and_nonfinite():
    with pytest.raises(DuplicatePoints) as exc:
        PointSet([(0, 0), (1, 2), (0, 0)])
    assert exc.value.pair == (0, 2)
    with pytest.raises(ValueError):
        PointSet([(0, 0), (math.nan, 1)])


def test_pointset_is_immutable():
    ps = PointSet([(0, 0), (1, 0), (0, 1)])
    with pytest.raises(ValueError):
        ps.xy[0, 0] = 5
    assert len(ps) == 3 and ps[1] == (1.0, 0.0)


def test_window_requires_positive_radius():
    with pytest.raises(ValueError):
        Window((0, 0), 0)


def test_square_corners_cocircular():
    rep = check_general_position([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert rep.cocircular == [(0, 1, 2, 3)]
    assert rep.collinear == []
    assert not rep


def test_collinear_triple_reported():
    rep = check_general_position([(0, 0), (1, 1), (2, 2), (0, 5)])
    assert rep.collinear == [(0, 1, 2)]


def test_perturbed_lattice_50_points_general_position():
    ps = gen_perturbed_lattice(1.0, 0.1, Window((0, 0), 3.9), seed=5)
    assert 40 <= len(ps) <= 64
    xy = ps.xy[:50]
    rep = check_general_position(xy, exhaustive=True)
    assert rep.ok and rep.exhaustive


def test_local_scan_finds_lattice_degeneracies():
    xs, ys = np.meshgrid(np.arange(10.0), np.arange(10.0))
    sq = np.c_[xs.ravel(), ys.ravel()]
    rep = check_general_position(sq, exhaustive=False)
    assert not rep.exhaustive
    assert rep.cocircular and rep.collinear


def test_duplicate_points_rejected_by_gp_check():
    with pytest.raises(DuplicatePoints):
        check_general_position([(0, 0), (1, 0), (0, 0), (2, 3)])
