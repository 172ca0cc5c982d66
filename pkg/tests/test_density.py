import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import hex_patch
from dtdensity.density import (check_window_margin, complete_to_hull, density_scan, growth_counts,
                               liminf_estimate, ratio_series, restrict_to_ball, safe_radius)
from dtdensity.errors import AlphaExceedsSafeWindow, DisconnectedCore, EmptyCore
from dtdensity.functionals import FunctionalSpec
from dtdensity.geom_core import Window
from dtdensity.pointsets import gen_perturbed_lattice
from dtdensity.triangulation import Triangulation, build_delaunay, validate_triangulation

F = FunctionalSpec


def brute_core_count(xy, triangles, center, alpha):
    count = 0
    for tri in triangles:
        if all(math.hypot(xy[v][0] - center[0], xy[v][1] - center[1]) <= alpha for v in tri):
            count += 1
    return count


# ---------------------------------------------------------------- restriction

def test_core_count_matches_brute_force(tri_lattice_dt):
    t = tri_lattice_dt
    wc = restrict_to_ball(t, 2.5, (0, 0))
    assert wc.k_alpha == brute_core_count(t.points.xy.tolist(), t.triangles.tolist(), (0, 0), 2.5)
    assert wc.k_alpha == len(wc.core_triangles) > 0


def test_empty_and_full_cores(tri_lattice_dt):
    t = tri_lattice_dt
    assert restrict_to_ball(t, 0.5, (0.3, 0.3)).k_alpha == 0
    assert restrict_to_ball(t, 1e3, (0, 0)).k_alpha == len(t)
    with pytest.raises(ValueError):
        restrict_to_ball(t, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(20, 200), st.integers(0, 2 ** 32 - 1), st.floats(0.05, 0.6))
def test_core_membership_is_exact(n, seed, alpha):
    rng = np.random.default_rng(seed)
    xy = rng.random((n, 2))
    t = build_delaunay(xy)
    wc = restrict_to_ball(t, alpha, (0.5, 0.5))
    inside = {tuple(sorted(tr)) for tr in wc.core_triangles.tolist()}
    for tr in t.triangles.tolist():
        want = all(math.hypot(xy[v, 0] - 0.5, xy[v, 1] - 0.5) <= alpha for v in tr)
        assert (tuple(sorted(tr)) in inside) == want


@settings(max_examples=20, deadline=None)
@given(st.integers(30, 200), st.integers(0, 2 ** 32 - 1))
def test_cores_are_nested(n, seed):
    t = build_delaunay(np.random.default_rng(seed).random((n, 2)))
    prev = set()
    for a in (0.1, 0.2, 0.3, 0.5, 0.8):
        cur = {tuple(tr) for tr in restrict_to_ball(t, a, (0.5, 0.5)).core_triangles.tolist()}
        assert prev <= cur
        prev = cur


# ---------------------------------------------------------------- completion

def check_completion(wc):
    assert wc.completed
    tri = wc.as_triangulation()
    validate_triangulation(tri)
    n, h = len(wc.core_vertices), len(wc.hull)
    assert len(wc.core_triangles) + len(wc.pocket_triangles) == 2 * n - h - 2
    assert np.all(np.isfinite(tri.geometry.circumradius))
    return tri


def test_completion_on_lattice_alpha_5(tri_lattice_dt):
    wc = complete_to_hull(restrict_to_ball(tri_lattice_dt, 5.0, (0, 0)))
    assert len(wc.pocket_triangles) > 0
    check_completion(wc)


def test_hull_filling_core_needs_no_pockets():
    t = build_delaunay(hex_patch(4), strict=True)
    wc = complete_to_hull(restrict_to_ball(t, 4.0, (0, 0)))
    assert len(wc.pocket_triangles) == 0
    assert wc.k_alpha == len(t)


@pytest.mark.parametrize("strategy", ["quality", "index"])
@pytest.mark.parametrize("alpha", [3.0, 7.5, 12.0])
def test_completion_on_perturbed_lattice(perturbed_setup, strategy, alpha):
    _, _, _, bounded = perturbed_setup
    check_completion(complete_to_hull(restrict_to_ball(bounded, alpha, (0, 0)), strategy))


@settings(max_examples=40, deadline=None)
@given(st.integers(30, 300), st.integers(0, 2 ** 32 - 1), st.floats(0.15, 0.5),
       st.sampled_from(["quality", "index"]))
def test_completion_valid_on_random_sets(n, seed, alpha, strategy):
    t = build_delaunay(np.random.default_rng(seed).random((n, 2)))
    wc = restrict_to_ball(t, alpha, (0.5, 0.5))
    try:
        wc = complete_to_hull(wc, strategy)
    except (EmptyCore, DisconnectedCore):
        return
    check_completion(wc)


def test_completion_errors():
    t = build_delaunay(hex_patch(3), strict=True)
    with pytest.raises(EmptyCore):
        complete_to_hull(restrict_to_ball(t, 0.5, (0.2, 0.2)))
    with pytest.raises(ValueError):
        complete_to_hull(restrict_to_ball(t, 2.0), strategy="greedy")
    with pytest.raises(ValueError):
        restrict_to_ball(t, 2.0).as_triangulation()
    # two triangles sharing only a vertex
    xy = [(0, 0), (1, 0), (0.5, 1), (2, 0), (1.5, 1)]
    bow = Triangulation.from_triangles(xy, [(0, 1, 2), (1, 3, 4)])
    wc = restrict_to_ball(bow, 10.0, (1, 0.5))
    with pytest.raises(DisconnectedCore):
        complete_to_hull(wc)


def test_core_with_hole_is_rejected():
    # an annulus of triangles around a missing centre
    xy = hex_patch(2)
    t = build_delaunay(xy, strict=True)
    keep = [tr for tr in t.triangles.tolist() if 0 not in [round(math.hypot(*xy[v]), 9) for v in tr]]
    ring = Triangulation.from_triangles(xy, keep)
    with pytest.raises(DisconnectedCore):
        complete_to_hull(restrict_to_ball(ring, 10.0))


# ---------------------------------------------------------------- density scans

@pytest.mark.parametrize("kind,limit", [("F2", 16.0), ("F4", 3.0), ("F1", 4 / 3), ("F3", -2 / 3)])
def test_lattice_density_closed_forms(tri_lattice_dt, kind, limit):
    scan = density_scan(tri_lattice_dt, F(kind), [12.5, 25, 50])
    assert abs(scan.densities[-1] - limit) <= 0.02 * abs(limit)
    # the boundary deficit shrinks as alpha grows
    dev = [abs(d - limit) for d in scan.densities]
    assert dev[0] > dev[1] > dev[2]


def test_lattice_f6_density_zero(tri_lattice_dt):
    scan = density_scan(tri_lattice_dt, F("F6"), [10, 20, 40])
    assert all(abs(d) <= 1e-25 for d in scan.densities)


def test_scaled_lattice_f1(tri_lattice_dt):
    s = 2.5
    t = build_delaunay(gen_perturbed_lattice(s, 0.0, Window((0, 0), 55 * s), seed=0))
    scan = density_scan(t, F("F1", 1.0), [50 * s])
    assert scan.densities[0] == pytest.approx(4 / (3 * s), rel=0.02)
    unit = density_scan(tri_lattice_dt, F("F1", 1.0), [50])
    assert scan.densities[0] == pytest.approx(unit.densities[0] / s, rel=1e-9)


def test_density_identity_and_counts(perturbed_setup):
    _, _, _, bounded = perturbed_setup
    scan = density_scan(bounded, F("F4"), [5, 10, 20, 40])
    for a, s, d in zip(scan.alphas, scan.sums, scan.densities):
        assert d == s / (math.pi * a * a)
    assert scan.k_alphas == sorted(scan.k_alphas)
    assert scan.liminf_estimate == min(scan.densities[-2:])


def test_alpha_schedule_validation(tri_lattice_dt):
    with pytest.raises(ValueError):
        density_scan(tri_lattice_dt, F("F2"), [10, 5])
    with pytest.raises(ValueError):
        density_scan(tri_lattice_dt, F("F2"), [])


def test_window_margin(tri_lattice_dt):
    t = tri_lattice_dt
    room = safe_radius(t, (0, 0))
    assert 53 < room <= 55
    with pytest.raises(AlphaExceedsSafeWindow):
        density_scan(t, F("F2"), [10, 60])
    with pytest.raises(AlphaExceedsSafeWindow):
        check_window_margin(t, [room - 0.5], (0, 0))
    q = check_window_margin(t, [50], (0, 0))
    assert q == pytest.approx(1 / math.sqrt(3), rel=1e-9)
    with pytest.raises(AlphaExceedsSafeWindow):
        check_window_margin(t, [50], (0, 0), q=3.0)
    assert safe_radius(t, (100, 0)) == 0.0


@pytest.mark.parametrize("seq,frac,want", [
    ([2.0, 2.0, 2.0], 0.5, 2.0),
    ([5.0, 4.0, 3.0, 2.0], 0.5, 2.0),
    ([3.0, 1.0, 2.0, 1.5], 0.5, 1.5),
    ([3.0, 1.0, 2.0, 1.5], 1.0, 1.0),
    ([3.0, 1.0, 2.0], 0.5, 1.0),
])
def test_liminf_estimate_examples(seq, frac, want):
    assert liminf_estimate(seq, frac) == want


def test_liminf_estimate_errors():
    with pytest.raises(ValueError):
        liminf_estimate([])
    with pytest.raises(ValueError):
        liminf_estimate([1.0], 0.0)


# ---------------------------------------------------------------- ratios

def test_ratio_exactly_one_when_core_fills_hull():
    t = build_delaunay(hex_patch(6), strict=True)
    rs = ratio_series(t, F("F2"), [6.0, 7.0], check_window=False)
    assert rs.ratios == [1.0, 1.0]
    assert rs.pocket_counts == [0, 0]


def test_f6_on_equilateral_tiling_is_zero_denominator():
    t = build_delaunay(hex_patch(6), strict=True)
    rs = ratio_series(t, F("F6"), [6.0, 7.0], check_window=False)
    assert rs.status == ["zero-denominator"] * 2
    assert rs.ratios == [None, None]
    assert all(abs(v) < 1e-15 for v in rs.completed_values)


@pytest.mark.parametrize("kind", ["F1", "F2", "F3", "F4", "F5", "F6"])
def test_ratios_lie_in_unit_interval(perturbed_setup, kind):
    # pocket values share the sign of the core values, so |core| <= |completed|
    _, _, _, bounded = perturbed_setup
    rs = ratio_series(bounded, F(kind), [5, 10, 20])
    for r, s in zip(rs.ratios, rs.status):
        assert s == "ok" and 0 <= r <= 1


def test_f3_ratio_converges(perturbed_setup):
    _, _, _, bounded = perturbed_setup
    rs = ratio_series(bounded, F("F3"), [10, 20, 40])
    dev = rs.deviations
    assert dev[0] > dev[1] > dev[2]
    assert dev[2] < 0.02


def test_f3_ratio_converges_on_exact_hex_lattice():
    t = build_delaunay(hex_patch(50), strict=True)
    rs = ratio_series(t, F("F3"), [10, 20, 40])
    dev = rs.deviations
    assert dev[0] > dev[1] > dev[2]
    assert all(0.9 <= r <= 1.0 for r in rs.ratios)


def test_pocket_strategies_agree_for_f3(perturbed_setup):
    _, _, _, bounded = perturbed_setup
    a = ratio_series(bounded, F("F3"), [10, 20, 40], strategy="quality")
    b = ratio_series(bounded, F("F3"), [10, 20, 40], strategy="index")
    assert a.core_values == b.core_values
    assert all(abs(x - y) < 0.01 for x, y in zip(a.ratios, b.ratios))


def test_small_alpha_is_pre_asymptotic(perturbed_setup):
    _, _, _, bounded = perturbed_setup
    rs = ratio_series(bounded, F("F2"), [0.3, 5.0])
    assert rs.status[0] == "pre-asymptotic" and rs.ratios[0] is None
    assert rs.status[1] == "ok"


# ---------------------------------------------------------------- growth

def test_lattice_growth_is_stable(tri_lattice_dt):
    g = growth_counts(tri_lattice_dt, [10, 20, 40])
    kr = g.k_over_alpha_sq
    assert max(kr) / min(kr) < 1.2
    # triangles per unit area times pi
    assert kr[-1] == pytest.approx(math.pi / (math.sqrt(3) / 4), rel=0.06)
    br = g.boundary_over_sqrt_k
    assert max(br) / min(br) < 2


def test_growth_below_first_point(tri_lattice_dt):
    g = growth_counts(tri_lattice_dt, [0.1], center=(0.5, 0.3))
    assert g.k_alphas == [0] and g.boundary_counts == [0]
    assert math.isnan(g.boundary_over_sqrt_k[0])
    g = growth_counts(tri_lattice_dt, [0.1], center=(0.0, 0.0))
    assert g.k_alphas == [0] and g.boundary_counts == [6]


@settings(max_examples=20, deadline=None)
@given(st.integers(30, 200), st.integers(0, 2 ** 32 - 1))
def test_growth_counts_monotone_and_brute(n, seed):
    xy = np.random.default_rng(seed).random((n, 2))
    t = build_delaunay(xy)
    alphas = [0.1, 0.2, 0.4, 0.8]
    g = growth_counts(t, alphas, (0.5, 0.5))
    assert g.k_alphas == sorted(g.k_alphas)
    for a, k, b in zip(alphas, g.k_alphas, g.boundary_counts):
        d = np.hypot(xy[:, 0] - 0.5, xy[:, 1] - 0.5)[t.triangles]
        assert k == brute_core_count(xy.tolist(), t.triangles.tolist(), (0.5, 0.5), a)
        assert b == int(np.sum((d.min(axis=1) <= a) & (d.max(axis=1) > a)))
