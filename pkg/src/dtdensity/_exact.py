"""Exact sign evaluation for the planar predicates.

Every finite double is a dyadic rational, so scaling all coordinates of one
predicate call to a common power-of-two denominator turns the determinant
into an integer computation. Python integers are unbounded, which makes the
result exact. These routines are only reached when the floating-point filter
cannot certify a sign.
"""


def _scaled(*coords):
    ratios = [float(c).as_integer_ratio() for c in coords]
    den = max(d for _, d in ratios)
    return [n * (den // d) for n, d in ratios]


def orient2d_exact(ax, ay, bx, by, cx, cy):
    ax, ay, bx, by, cx, cy = _scaled(ax, ay, bx, by, cx, cy)
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def incircle_exact(ax, ay, bx, by, cx, cy, dx, dy):
    ax, ay, bx, by, cx, cy, dx, dy = _scaled(ax, ay, bx, by, cx, cy, dx, dy)
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - bdy * cdx)
           + blift * (cdx * ady - cdy * adx)
           + clift * (adx * bdy - ady * bdx))
    return (det > 0) - (det < 0)
