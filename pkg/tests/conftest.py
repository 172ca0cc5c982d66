"""Shared fixtures and independent oracles.

The oracles here are deliberately naive: rational arithmetic on the exact
binary values of the inputs, and brute-force loops. They never call into the
library's predicates.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from dtdensity.geom_core import Window
from dtdensity.pointsets import certify_r_R, gen_perturbed_lattice
from dtdensity.triangulation import build_delaunay, random_bounded_triangulation


def frac_orient(p, q, r) -> int:
    px, py, qx, qy, rx, ry = (Fraction(float(v)) for v in (*p, *q, *r))
    d = (qx - px) * (ry - py) - (qy - py) * (rx - px)
    return (d > 0) - (d < 0)


def frac_incircle(p, q, r, s) -> int:
    rows = []
    for a in (p, q, r):
        dx = Fraction(float(a[0])) - Fraction(float(s[0]))
        dy = Fraction(float(a[1])) - Fraction(float(s[1]))
        rows.append((dx, dy, dx * dx + dy * dy))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    d = a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)
    return (d > 0) - (d < 0)


def brute_empty_circle_violations(xy, triangles) -> int:
    """Count (triangle, point) pairs with the point strictly inside the circumcircle."""
    bad = 0
    for a, b, c in triangles:
        p, q, r = xy[a], xy[b], xy[c]
        if frac_orient(p, q, r) < 0:
            q, r = r, q
        for s in range(len(xy)):
            if s in (a, b, c):
                continue
            if frac_incircle(p, q, r, xy[s]) > 0:
                bad += 1
    return bad


def catalan(k: int) -> int:
    """Catalan number by the convolution recursion (no closed form used)."""
    c = [1]
    for n in range(1, k + 1):
        c.append(sum(c[i] * c[n - 1 - i] for i in range(n)))
    return c[k]


def convex_polygon(n, rx=1.0, ry=0.7):
    th = [2 * math.pi * k / n + 0.1 for k in range(n)]
    return [(rx * math.cos(t), ry * math.sin(t)) for t in th]


def hex_patch(n):
    """Hexagon-shaped patch of a near-unit triangular lattice, centred on the origin.

    The row height is sqrt(3)/2 rounded to 26 bits so every coordinate is
    exact in binary: points on a lattice line are then exactly collinear and
    the hexagon's sides carry no near-degenerate slivers.
    """
    h = round(math.sqrt(3) / 2 * 2 ** 26) / 2 ** 26
    return [(i + 0.5 * j, j * h) for j in range(-n, n + 1) for i in range(-n, n + 1) if abs(i + j) <= n]


def random_gp_points(rng, n):
    """Uniform points in the unit square; exact duplicates/degeneracies have probability 0."""
    return rng.random((n, 2))


@pytest.fixture(scope="session")
def tri_lattice_dt():
    pts = gen_perturbed_lattice(1.0, 0.0, Window((0.0, 0.0), 55.0), seed=0)
    return build_delaunay(pts, strict=True)


@pytest.fixture(scope="session")
def perturbed_setup():
    """Perturbed triangular lattice, its DT, certificate, and a q-bounded flip of it."""
    pts = gen_perturbed_lattice(1.0, 0.1, Window((0.0, 0.0), 55.0), seed=3)
    dt = build_delaunay(pts)
    cert = certify_r_R(pts, Window((0.0, 0.0), 50.0))
    bounded = random_bounded_triangulation(dt, 1.5 * cert.R_upper, 500, seed=11)
    return pts, dt, cert, bounded


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
