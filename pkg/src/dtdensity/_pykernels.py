"""Pure-Python kernels: filtered predicates and the incremental Delaunay core.

The compiled module ``_ckernels`` implements the same functions with the same
arguments and results; ``_kernels`` picks one at import time.

Mesh layout used by the core and by :func:`flip`: triangle ``t`` has vertices
``V[3t], V[3t+1], V[3t+2]`` in counterclockwise order; ``N[3t+i]`` is the
triangle across the edge opposite ``V[3t+i]``, or -1 on the hull.
"""

from ._exact import incircle_exact, orient2d_exact
from .errors import AllCollinear, DuplicatePoints

_EPS = 2.0 ** -53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS
# Outside this range the static error bound may be invalidated by
# underflow or overflow, so the exact path is taken.
_LO, _HI = 1e-280, 1e280

BACKEND = "python"


def orient2d(ax, ay, bx, by, cx, cy):
    """Sign of the oriented area of (a, b, c): +1 counterclockwise, -1 clockwise, 0 collinear."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    detsum = abs(detleft) + abs(detright)
    if _LO < detsum < _HI:
        bound = _CCW_BOUND * detsum
        if det > bound:
            return 1
        if -det > bound:
            return -1
    return orient2d_exact(ax, ay, bx, by, cx, cy)


def incircle(ax, ay, bx, by, cx, cy, dx, dy):
    """+1 if d is inside the circle through counterclockwise a, b, c; 0 on it; -1 outside."""
    adx = ax - dx
    ady = ay - dy
    bdx = bx - dx
    bdy = by - dy
    cdx = cx - dx
    cdy = cy - dy
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    cdxady = cdx * ady
    adxcdy = adx * cdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    if _LO < permanent < _HI:
        bound = _ICC_BOUND * permanent
        if det > bound:
            return 1
        if -det > bound:
            return -1
    return incircle_exact(ax, ay, bx, by, cx, cy, dx, dy)


def flip(V, N, t, e, hull_tri=None):
    """Replace the diagonal opposite ``V[3t+e]`` by the other diagonal of its quad.

    With ``p = V[3t+e]`` and ``d`` the apex of the neighbour ``u``, the two
    triangles become ``(p, a, d)`` in slot ``t`` and ``(p, d, b)`` in slot
    ``u``. Convexity is the caller's responsibility. Returns ``u``.
    """
    bt = 3 * t
    u = N[bt + e]
    bu = 3 * u
    if N[bu] == t:
        f = 0
    elif N[bu + 1] == t:
        f = 1
    else:
        f = 2
    e1 = (e + 1) % 3
    e2 = (e + 2) % 3
    f1 = (f + 1) % 3
    f2 = (f + 2) % 3
    p = V[bt + e]
    a = V[bt + e1]
    b = V[bt + e2]
    d = V[bu + f]
    n_ad = N[bu + f1]
    n_db = N[bu + f2]
    n_pa = N[bt + e2]
    n_bp = N[bt + e1]

    V[bt] = p
    V[bt + 1] = a
    V[bt + 2] = d
    N[bt] = n_ad
    N[bt + 1] = u
    N[bt + 2] = n_pa

    V[bu] = p
    V[bu + 1] = d
    V[bu + 2] = b
    N[bu] = n_db
    N[bu + 1] = n_bp
    N[bu + 2] = t

    if n_ad >= 0:
        bw = 3 * n_ad
        for k in range(3):
            if N[bw + k] == u:
                N[bw + k] = t
                break
    elif hull_tri is not None:
        hull_tri[a] = t
    if n_bp >= 0:
        bw = 3 * n_bp
        for k in range(3):
            if N[bw + k] == t:
                N[bw + k] = u
                break
    elif hull_tri is not None:
        hull_tri[b] = u
    return u


def _replace(N, w, old, new):
    if w >= 0:
        bw = 3 * w
        for k in range(3):
            if N[bw + k] == old:
                N[bw + k] = new
                return


def delaunay_core(xs, ys, order, walk_seed=12345):
    """Incremental Delaunay triangulation with Lawson flips.

    ``order`` is the insertion sequence (a permutation of point indices).
    Returns ``(V, N, hull)`` with ``hull`` the counterclockwise boundary
    cycle, collinear boundary vertices included. Cocircular configurations
    are resolved arbitrarily (no flip on a zero incircle); the caller checks
    uniqueness.
    """
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    order = [int(i) for i in order]
    npts = len(xs)
    n = len(order)
    if n < 3:
        raise AllCollinear("need at least three points")

    a, b = order[0], order[1]
    if xs[a] == xs[b] and ys[a] == ys[b]:
        raise DuplicatePoints(a, b)
    k = 2
    while k < n and orient2d(xs[a], ys[a], xs[b], ys[b], xs[order[k]], ys[order[k]]) == 0:
        k += 1
    if k == n:
        raise AllCollinear("all points are collinear")
    order = order[:2] + [order[k]] + order[2:k] + order[k + 1:]
    c = order[2]
    if orient2d(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) < 0:
        b, c = c, b

    V = [a, b, c]
    N = [-1, -1, -1]
    hull_next = [-1] * npts
    hull_prev = [-1] * npts
    hull_tri = [-1] * npts
    hull_next[a], hull_next[b], hull_next[c] = b, c, a
    hull_prev[b], hull_prev[c], hull_prev[a] = a, b, c
    hull_tri[a] = hull_tri[b] = hull_tri[c] = 0
    hull_start = a

    state = walk_seed & 0xFFFFFFFF or 1
    last = 0
    stack = []
    o = [0, 0, 0]

    for idx in range(3, n):
        p = order[idx]
        px = xs[p]
        py = ys[p]

        # remembering stochastic walk
        t = last
        outside = -1
        while True:
            bt = 3 * t
            state ^= (state << 13) & 0xFFFFFFFF
            state ^= state >> 17
            state ^= (state << 5) & 0xFFFFFFFF
            k0 = state % 3
            moved = False
            for j in range(3):
                i = (k0 + j) % 3
                va = V[bt + (i + 1) % 3]
                vb = V[bt + (i + 2) % 3]
                s = orient2d(xs[va], ys[va], xs[vb], ys[vb], px, py)
                if s < 0:
                    nb = N[bt + i]
                    if nb < 0:
                        outside = i
                    else:
                        t = nb
                        moved = True
                    break
                o[i] = s
            if not moved:
                break

        if outside >= 0:
            # p is beyond boundary edge (va -> vb) of triangle t
            i = outside
            v0 = V[3 * t + (i + 1) % 3]
            v1 = V[3 * t + (i + 2) % 3]
            chain_back = []
            w = v0
            while True:
                pw = hull_prev[w]
                if orient2d(xs[pw], ys[pw], xs[w], ys[w], px, py) < 0:
                    chain_back.append(pw)
                    w = pw
                else:
                    break
            chain = chain_back[::-1] + [v0, v1]
            w = v1
            while True:
                nw = hull_next[w]
                if orient2d(xs[w], ys[w], xs[nw], ys[nw], px, py) < 0:
                    chain.append(nw)
                    w = nw
                else:
                    break
            fan = []
            for j in range(len(chain) - 1):
                vi = chain[j]
                vj = chain[j + 1]
                told = hull_tri[vi]
                bo = 3 * told
                for kk in range(3):
                    if V[bo + (kk + 1) % 3] == vi:
                        break
                tn = len(V) // 3
                V.extend((vj, vi, p))
                N.extend((-1, -1, told))
                N[bo + kk] = tn
                if fan:
                    prev = fan[-1]
                    N[3 * tn] = prev
                    N[3 * prev + 1] = tn
                fan.append(tn)
            first = chain[0]
            lastv = chain[-1]
            for vi in chain[1:-1]:
                hull_next[vi] = -1
                hull_prev[vi] = -1
                hull_tri[vi] = -1
            hull_next[first] = p
            hull_prev[p] = first
            hull_next[p] = lastv
            hull_prev[lastv] = p
            hull_tri[first] = fan[0]
            hull_tri[p] = fan[-1]
            if hull_next[hull_start] < 0:
                hull_start = first
            for tn in fan:
                stack.append((tn, 2))
            last = fan[0]
        else:
            bt = 3 * t
            zeros = [i for i in range(3) if o[i] == 0]
            if len(zeros) >= 2:
                # p coincides with the vertex shared by both zero edges
                shared = V[bt + 3 - zeros[0] - zeros[1]]
                raise DuplicatePoints(shared, p)
            if not zeros:
                va, vb, vc = V[bt], V[bt + 1], V[bt + 2]
                na, nb, nc = N[bt], N[bt + 1], N[bt + 2]
                t1 = len(V) // 3
                t2 = t1 + 1
                V[bt:bt + 3] = [va, vb, p]
                N[bt:bt + 3] = [t1, t2, nc]
                V.extend((vb, vc, p, vc, va, p))
                N.extend((t2, t, na, t, t1, nb))
                _replace(N, na, t, t1)
                _replace(N, nb, t, t2)
                if na < 0:
                    hull_tri[vb] = t1
                if nb < 0:
                    hull_tri[vc] = t2
                stack.extend(((t, 2), (t1, 2), (t2, 2)))
            else:
                i = zeros[0]
                vc = V[bt + i]
                va = V[bt + (i + 1) % 3]
                vb = V[bt + (i + 2) % 3]
                n_ca = N[bt + (i + 2) % 3]
                n_bc = N[bt + (i + 1) % 3]
                u = N[bt + i]
                t1 = len(V) // 3
                if u < 0:
                    V[bt:bt + 3] = [vc, va, p]
                    N[bt:bt + 3] = [-1, t1, n_ca]
                    V.extend((vb, vc, p))
                    N.extend((t, -1, n_bc))
                    _replace(N, n_bc, t, t1)
                    if n_bc < 0:
                        hull_tri[vb] = t1
                    hull_next[va] = p
                    hull_prev[p] = va
                    hull_next[p] = vb
                    hull_prev[vb] = p
                    hull_tri[va] = t
                    hull_tri[p] = t1
                    stack.extend(((t, 2), (t1, 2)))
                else:
                    bu = 3 * u
                    for f in range(3):
                        if N[bu + f] == t:
                            break
                    vd = V[bu + f]
                    n_db = N[bu + (f + 2) % 3]
                    n_ad = N[bu + (f + 1) % 3]
                    u1 = t1 + 1
                    V[bt:bt + 3] = [vc, va, p]
                    N[bt:bt + 3] = [u1, t1, n_ca]
                    V[bu:bu + 3] = [vd, vb, p]
                    N[bu:bu + 3] = [t1, u1, n_db]
                    V.extend((vb, vc, p, va, vd, p))
                    N.extend((t, u, n_bc, u, t, n_ad))
                    _replace(N, n_bc, t, t1)
                    _replace(N, n_ad, u, u1)
                    if n_bc < 0:
                        hull_tri[vb] = t1
                    if n_ad < 0:
                        hull_tri[va] = u1
                    stack.extend(((t, 2), (t1, 2), (u, 2), (u1, 2)))
            last = t

        while stack:
            t, e = stack.pop()
            bt = 3 * t
            u = N[bt + e]
            if u < 0:
                continue
            bu = 3 * u
            if N[bu] == t:
                f = 0
            elif N[bu + 1] == t:
                f = 1
            else:
                f = 2
            vp = V[bt + e]
            va = V[bt + (e + 1) % 3]
            vb = V[bt + (e + 2) % 3]
            vd = V[bu + f]
            if incircle(xs[vp], ys[vp], xs[va], ys[va], xs[vb], ys[vb],
                        xs[vd], ys[vd]) > 0:
                flip(V, N, t, e, hull_tri)
                stack.append((t, 0))
                stack.append((u, 0))

    hull = [hull_start]
    w = hull_next[hull_start]
    while w != hull_start:
        hull.append(w)
        w = hull_next[w]
    return V, N, hull
