# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: filtered predicates and the incremental Delaunay core.

Mirror of ``_pykernels``; both must return identical results for identical
arguments.
"""

from libc.stdlib cimport malloc, realloc, free
from libc.math cimport fabs

from ._exact import incircle_exact, orient2d_exact
from .errors import AllCollinear, DuplicatePoints

BACKEND = "cython"

cdef double _EPS = 2.0 ** -53
cdef double _CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
cdef double _ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS
cdef double _LO = 1e-280
cdef double _HI = 1e280


cdef inline int _orient(double ax, double ay, double bx, double by,
                        double cx, double cy) except? -2:
    cdef double detleft = (ax - cx) * (by - cy)
    cdef double detright = (ay - cy) * (bx - cx)
    cdef double det = detleft - detright
    cdef double detsum = fabs(detleft) + fabs(detright)
    cdef double bound
    if _LO < detsum < _HI:
        bound = _CCW_BOUND * detsum
        if det > bound:
            return 1
        if -det > bound:
            return -1
    return orient2d_exact(ax, ay, bx, by, cx, cy)


cdef inline int _incircle(double ax, double ay, double bx, double by,
                          double cx, double cy, double dx, double dy) except? -2:
    cdef double adx = ax - dx
    cdef double ady = ay - dy
    cdef double bdx = bx - dx
    cdef double bdy = by - dy
    cdef double cdx = cx - dx
    cdef double cdy = cy - dy
    cdef double bdxcdy = bdx * cdy
    cdef double cdxbdy = cdx * bdy
    cdef double cdxady = cdx * ady
    cdef double adxcdy = adx * cdy
    cdef double adxbdy = adx * bdy
    cdef double bdxady = bdx * ady
    cdef double alift = adx * adx + ady * ady
    cdef double blift = bdx * bdx + bdy * bdy
    cdef double clift = cdx * cdx + cdy * cdy
    cdef double det = (alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy)
                       + clift * (adxbdy - bdxady))
    cdef double permanent = ((fabs(bdxcdy) + fabs(cdxbdy)) * alift
                             + (fabs(cdxady) + fabs(adxcdy)) * blift
                             + (fabs(adxbdy) + fabs(bdxady)) * clift)
    cdef double bound
    if _LO < permanent < _HI:
        bound = _ICC_BOUND * permanent
        if det > bound:
            return 1
        if -det > bound:
            return -1
    return incircle_exact(ax, ay, bx, by, cx, cy, dx, dy)


def orient2d(double ax, double ay, double bx, double by, double cx, double cy):
    """Sign of the oriented area of (a, b, c): +1 counterclockwise, -1 clockwise, 0 collinear."""
    return _orient(ax, ay, bx, by, cx, cy)


def incircle(double ax, double ay, double bx, double by,
             double cx, double cy, double dx, double dy):
    """+1 if d is inside the circle through counterclockwise a, b, c; 0 on it; -1 outside."""
    return _incircle(ax, ay, bx, by, cx, cy, dx, dy)


cdef inline void _replace(int *N, int w, int old, int new) noexcept:
    cdef int k
    if w >= 0:
        for k in range(3):
            if N[3 * w + k] == old:
                N[3 * w + k] = new
                return


cdef int _flip(int *V, int *N, int t, int e, int *hull_tri) noexcept:
    cdef int bt = 3 * t
    cdef int u = N[bt + e]
    cdef int bu = 3 * u
    cdef int f, k
    if N[bu] == t:
        f = 0
    elif N[bu + 1] == t:
        f = 1
    else:
        f = 2
    cdef int e1 = (e + 1) % 3
    cdef int e2 = (e + 2) % 3
    cdef int f1 = (f + 1) % 3
    cdef int f2 = (f + 2) % 3
    cdef int p = V[bt + e]
    cdef int a = V[bt + e1]
    cdef int b = V[bt + e2]
    cdef int d = V[bu + f]
    cdef int n_ad = N[bu + f1]
    cdef int n_db = N[bu + f2]
    cdef int n_pa = N[bt + e2]
    cdef int n_bp = N[bt + e1]
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
        _replace(N, n_ad, u, t)
    elif hull_tri != NULL:
        hull_tri[a] = t
    if n_bp >= 0:
        _replace(N, n_bp, t, u)
    elif hull_tri != NULL:
        hull_tri[b] = u
    return u


cdef class _Buf:
    cdef int *data
    cdef int size
    cdef int cap

    def __cinit__(self, int cap):
        self.cap = cap if cap > 4 else 4
        self.size = 0
        self.data = <int *> malloc(self.cap * sizeof(int))
        if self.data == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.data)

    cdef int push(self, int v) except -1:
        cdef int *nd
        if self.size == self.cap:
            nd = <int *> realloc(self.data, 2 * self.cap * sizeof(int))
            if nd == NULL:
                raise MemoryError()
            self.data = nd
            self.cap *= 2
        self.data[self.size] = v
        self.size += 1
        return 0


def delaunay_core(xs_in, ys_in, order_in, unsigned int walk_seed=12345):
    """Compiled twin of ``_pykernels.delaunay_core``."""
    cdef list xl = [float(v) for v in xs_in]
    cdef list yl = [float(v) for v in ys_in]
    cdef list ol = [int(i) for i in order_in]
    cdef int npts = len(xl)
    cdef int n = len(ol)
    if n < 3:
        raise AllCollinear("need at least three points")

    cdef double *xs = <double *> malloc(npts * sizeof(double))
    cdef double *ys = <double *> malloc(npts * sizeof(double))
    cdef int *order = <int *> malloc(n * sizeof(int))
    cdef int *V = <int *> malloc((6 * n + 6) * sizeof(int))
    cdef int *N = <int *> malloc((6 * n + 6) * sizeof(int))
    cdef int *hull_next = <int *> malloc(npts * sizeof(int))
    cdef int *hull_prev = <int *> malloc(npts * sizeof(int))
    cdef int *hull_tri = <int *> malloc(npts * sizeof(int))
    cdef _Buf stack = _Buf(64)
    cdef _Buf chain = _Buf(16)
    cdef _Buf fan = _Buf(16)

    cdef int i, j, k, kk, idx, a, b, c, p, t, u, e, f, nb, va, vb, vc, vd
    cdef int na, nc, n_ca, n_bc, n_db, n_ad, t1, t2, u1, ntri, last
    cdef int outside, moved, k0, s, w, pw, nw, told, bo, tn, prev, first, lastv
    cdef int hull_start, nzero, z0, z1, shared, bt, bu, bw
    cdef int o[3]
    cdef unsigned int state
    cdef double px, py

    try:
        for i in range(npts):
            xs[i] = xl[i]
            ys[i] = yl[i]
        for i in range(n):
            order[i] = ol[i]

        a = order[0]
        b = order[1]
        if xs[a] == xs[b] and ys[a] == ys[b]:
            raise DuplicatePoints(a, b)
        k = 2
        while k < n and _orient(xs[a], ys[a], xs[b], ys[b], xs[order[k]], ys[order[k]]) == 0:
            k += 1
        if k == n:
            raise AllCollinear("all points are collinear")
        c = order[k]
        # same reordering as the Python kernel: order[:2] + [c] + order[2:k] + order[k+1:]
        for i in range(k, 2, -1):
            order[i] = order[i - 1]
        order[2] = c
        if _orient(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) < 0:
            b, c = c, b

        for i in range(npts):
            hull_next[i] = -1
            hull_prev[i] = -1
            hull_tri[i] = -1
        V[0] = a
        V[1] = b
        V[2] = c
        N[0] = -1
        N[1] = -1
        N[2] = -1
        ntri = 1
        hull_next[a] = b
        hull_next[b] = c
        hull_next[c] = a
        hull_prev[b] = a
        hull_prev[c] = b
        hull_prev[a] = c
        hull_tri[a] = 0
        hull_tri[b] = 0
        hull_tri[c] = 0
        hull_start = a

        state = walk_seed
        if state == 0:
            state = 1
        last = 0

        for idx in range(3, n):
            p = order[idx]
            px = xs[p]
            py = ys[p]

            t = last
            outside = -1
            while True:
                bt = 3 * t
                state ^= state << 13
                state ^= state >> 17
                state ^= state << 5
                k0 = state % 3
                moved = 0
                for j in range(3):
                    i = (k0 + j) % 3
                    va = V[bt + (i + 1) % 3]
                    vb = V[bt + (i + 2) % 3]
                    s = _orient(xs[va], ys[va], xs[vb], ys[vb], px, py)
                    if s < 0:
                        nb = N[bt + i]
                        if nb < 0:
                            outside = i
                        else:
                            t = nb
                            moved = 1
                        break
                    o[i] = s
                if not moved:
                    break

            stack.size = 0
            if outside >= 0:
                i = outside
                va = V[3 * t + (i + 1) % 3]
                vb = V[3 * t + (i + 2) % 3]
                # visible chain: walk backwards from va, then forwards from vb
                chain.size = 0
                w = va
                while True:
                    pw = hull_prev[w]
                    if _orient(xs[pw], ys[pw], xs[w], ys[w], px, py) < 0:
                        chain.push(pw)
                        w = pw
                    else:
                        break
                # reverse what was collected
                i = 0
                j = chain.size - 1
                while i < j:
                    w = chain.data[i]
                    chain.data[i] = chain.data[j]
                    chain.data[j] = w
                    i += 1
                    j -= 1
                chain.push(va)
                chain.push(vb)
                w = vb
                while True:
                    nw = hull_next[w]
                    if _orient(xs[w], ys[w], xs[nw], ys[nw], px, py) < 0:
                        chain.push(nw)
                        w = nw
                    else:
                        break
                fan.size = 0
                for j in range(chain.size - 1):
                    va = chain.data[j]
                    vb = chain.data[j + 1]
                    told = hull_tri[va]
                    bo = 3 * told
                    for kk in range(3):
                        if V[bo + (kk + 1) % 3] == va:
                            break
                    tn = ntri
                    ntri += 1
                    V[3 * tn] = vb
                    V[3 * tn + 1] = va
                    V[3 * tn + 2] = p
                    N[3 * tn] = -1
                    N[3 * tn + 1] = -1
                    N[3 * tn + 2] = told
                    N[bo + kk] = tn
                    if fan.size > 0:
                        prev = fan.data[fan.size - 1]
                        N[3 * tn] = prev
                        N[3 * prev + 1] = tn
                    fan.push(tn)
                first = chain.data[0]
                lastv = chain.data[chain.size - 1]
                for j in range(1, chain.size - 1):
                    w = chain.data[j]
                    hull_next[w] = -1
                    hull_prev[w] = -1
                    hull_tri[w] = -1
                hull_next[first] = p
                hull_prev[p] = first
                hull_next[p] = lastv
                hull_prev[lastv] = p
                hull_tri[first] = fan.data[0]
                hull_tri[p] = fan.data[fan.size - 1]
                if hull_next[hull_start] < 0:
                    hull_start = first
                for j in range(fan.size):
                    stack.push(fan.data[j])
                    stack.push(2)
                last = fan.data[0]
            else:
                bt = 3 * t
                nzero = 0
                z0 = -1
                z1 = -1
                for i in range(3):
                    if o[i] == 0:
                        if nzero == 0:
                            z0 = i
                        else:
                            z1 = i
                        nzero += 1
                if nzero >= 2:
                    shared = V[bt + 3 - z0 - z1]
                    raise DuplicatePoints(shared, p)
                if nzero == 0:
                    va = V[bt]
                    vb = V[bt + 1]
                    vc = V[bt + 2]
                    na = N[bt]
                    nb = N[bt + 1]
                    nc = N[bt + 2]
                    t1 = ntri
                    t2 = ntri + 1
                    ntri += 2
                    V[bt + 2] = p
                    N[bt] = t1
                    N[bt + 1] = t2
                    N[bt + 2] = nc
                    V[3 * t1] = vb
                    V[3 * t1 + 1] = vc
                    V[3 * t1 + 2] = p
                    N[3 * t1] = t2
                    N[3 * t1 + 1] = t
                    N[3 * t1 + 2] = na
                    V[3 * t2] = vc
                    V[3 * t2 + 1] = va
                    V[3 * t2 + 2] = p
                    N[3 * t2] = t
                    N[3 * t2 + 1] = t1
                    N[3 * t2 + 2] = nb
                    _replace(N, na, t, t1)
                    _replace(N, nb, t, t2)
                    if na < 0:
                        hull_tri[vb] = t1
                    if nb < 0:
                        hull_tri[vc] = t2
                    stack.push(t)
                    stack.push(2)
                    stack.push(t1)
                    stack.push(2)
                    stack.push(t2)
                    stack.push(2)
                else:
                    i = z0
                    vc = V[bt + i]
                    va = V[bt + (i + 1) % 3]
                    vb = V[bt + (i + 2) % 3]
                    n_ca = N[bt + (i + 2) % 3]
                    n_bc = N[bt + (i + 1) % 3]
                    u = N[bt + i]
                    t1 = ntri
                    if u < 0:
                        ntri += 1
                        V[bt] = vc
                        V[bt + 1] = va
                        V[bt + 2] = p
                        N[bt] = -1
                        N[bt + 1] = t1
                        N[bt + 2] = n_ca
                        V[3 * t1] = vb
                        V[3 * t1 + 1] = vc
                        V[3 * t1 + 2] = p
                        N[3 * t1] = t
                        N[3 * t1 + 1] = -1
                        N[3 * t1 + 2] = n_bc
                        _replace(N, n_bc, t, t1)
                        if n_bc < 0:
                            hull_tri[vb] = t1
                        hull_next[va] = p
                        hull_prev[p] = va
                        hull_next[p] = vb
                        hull_prev[vb] = p
                        hull_tri[va] = t
                        hull_tri[p] = t1
                        stack.push(t)
                        stack.push(2)
                        stack.push(t1)
                        stack.push(2)
                    else:
                        bu = 3 * u
                        for f in range(3):
                            if N[bu + f] == t:
                                break
                        vd = V[bu + f]
                        n_db = N[bu + (f + 2) % 3]
                        n_ad = N[bu + (f + 1) % 3]
                        u1 = t1 + 1
                        ntri += 2
                        V[bt] = vc
                        V[bt + 1] = va
                        V[bt + 2] = p
                        N[bt] = u1
                        N[bt + 1] = t1
                        N[bt + 2] = n_ca
                        V[bu] = vd
                        V[bu + 1] = vb
                        V[bu + 2] = p
                        N[bu] = t1
                        N[bu + 1] = u1
                        N[bu + 2] = n_db
                        V[3 * t1] = vb
                        V[3 * t1 + 1] = vc
                        V[3 * t1 + 2] = p
                        N[3 * t1] = t
                        N[3 * t1 + 1] = u
                        N[3 * t1 + 2] = n_bc
                        V[3 * u1] = va
                        V[3 * u1 + 1] = vd
                        V[3 * u1 + 2] = p
                        N[3 * u1] = u
                        N[3 * u1 + 1] = t
                        N[3 * u1 + 2] = n_ad
                        _replace(N, n_bc, t, t1)
                        _replace(N, n_ad, u, u1)
                        if n_bc < 0:
                            hull_tri[vb] = t1
                        if n_ad < 0:
                            hull_tri[va] = u1
                        stack.push(t)
                        stack.push(2)
                        stack.push(t1)
                        stack.push(2)
                        stack.push(u)
                        stack.push(2)
                        stack.push(u1)
                        stack.push(2)
                last = t

            while stack.size > 0:
                e = stack.data[stack.size - 1]
                t = stack.data[stack.size - 2]
                stack.size -= 2
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
                p = V[bt + e]
                va = V[bt + (e + 1) % 3]
                vb = V[bt + (e + 2) % 3]
                vd = V[bu + f]
                if _incircle(xs[p], ys[p], xs[va], ys[va], xs[vb], ys[vb],
                             xs[vd], ys[vd]) > 0:
                    _flip(V, N, t, e, hull_tri)
                    stack.push(t)
                    stack.push(0)
                    stack.push(u)
                    stack.push(0)

        Vout = [V[i] for i in range(3 * ntri)]
        Nout = [N[i] for i in range(3 * ntri)]
        hull = [hull_start]
        w = hull_next[hull_start]
        while w != hull_start:
            hull.append(w)
            w = hull_next[w]
        return Vout, Nout, hull
    finally:
        free(xs)
        free(ys)
        free(order)
        free(V)
        free(N)
        free(hull_next)
        free(hull_prev)
        free(hull_tri)
