"""Compiled inner loops.

Every array here is column-first: a basis of K vectors with N entries is
stored as ``cols[k, n, c]`` where ``c`` indexes the four quaternion
components. Real and complex data simply leave the trailing components at
zero, and the ring code decides how many of them take part in arithmetic.

Ring elements are tracked exactly through small integer coordinates:

* Z: ``(a,)``
* G: ``(a, b)`` for ``a + b i``
* E: ``(a, b)`` for ``a + b w`` with ``w = (-1 + sqrt(3) i) / 2``
* L: ``(a, b, c, d)``
* H: doubled components ``(2 q1, 2 q2, 2 q3, 2 q4)``, all of equal parity
"""

import numpy as np
from numba import njit

RING_Z, RING_G, RING_E, RING_L, RING_H = 0, 1, 2, 3, 4

SQRT3 = np.sqrt(3.0)
HALF_SQRT3 = 0.5 * np.sqrt(3.0)

# stats slots returned by lll()
ST_ITER, ST_SWAP, ST_SIZERED, ST_SCALAR, ST_REAL, ST_INOP, ST_STATUS = range(7)
N_STATS = 7


@njit(cache=True)
def ring_dim(ring):
    if ring == RING_Z:
        return 1
    if ring == RING_G or ring == RING_E:
        return 2
    return 4


@njit(cache=True)
def qmul(a0, a1, a2, a3, b0, b1, b2, b3):
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


@njit(cache=True)
def _rhu(x):
    # round half up, the tie rule of the scalar quantizer
    return np.floor(x + 0.5)


@njit(cache=True)
def quantize_point(ring, c0, c1, c2, c3):
    """Nearest ring element: returns (value[4], coords[4])."""
    if ring == RING_Z:
        a = _rhu(c0)
        return (a, 0.0, 0.0, 0.0), (np.int64(a), np.int64(0), np.int64(0), np.int64(0))
    if ring == RING_G:
        a = _rhu(c0)
        b = _rhu(c1)
        return (a, b, 0.0, 0.0), (np.int64(a), np.int64(b), np.int64(0), np.int64(0))
    if ring == RING_L:
        a = _rhu(c0)
        b = _rhu(c1)
        c = _rhu(c2)
        d = _rhu(c3)
        return (a, b, c, d), (np.int64(a), np.int64(b), np.int64(c), np.int64(d))
    if ring == RING_E:
        a1 = _rhu(c0)
        m = _rhu(c1 / SQRT3)
        x1 = a1
        y1 = SQRT3 * m
        n = _rhu(c0 - 0.5)
        p = _rhu((c1 - HALF_SQRT3) / SQRT3)
        x2 = n + 0.5
        y2 = SQRT3 * (p + 0.5)
        d1 = (c0 - x1) ** 2 + (c1 - y1) ** 2
        d2 = (c0 - x2) ** 2 + (c1 - y2) ** 2
        tol = 1e-12 * (1.0 + c0 * c0 + c1 * c1)
        if d1 <= d2 + tol:
            return (x1, y1, 0.0, 0.0), (np.int64(a1 + m), np.int64(2 * m), np.int64(0), np.int64(0))
        return (x2, y2, 0.0, 0.0), (np.int64(n + p + 1), np.int64(2 * p + 1), np.int64(0), np.int64(0))
    # Hurwitz: integer coset versus the o_H shifted coset
    h0 = _rhu(c0)
    h1 = _rhu(c1)
    h2 = _rhu(c2)
    h3 = _rhu(c3)
    s0 = _rhu(c0 - 0.5)
    s1 = _rhu(c1 - 0.5)
    s2 = _rhu(c2 - 0.5)
    s3 = _rhu(c3 - 0.5)
    d1 = (c0 - h0) ** 2 + (c1 - h1) ** 2 + (c2 - h2) ** 2 + (c3 - h3) ** 2
    d2 = ((c0 - s0 - 0.5) ** 2 + (c1 - s1 - 0.5) ** 2
          + (c2 - s2 - 0.5) ** 2 + (c3 - s3 - 0.5) ** 2)
    tol = 1e-12 * (1.0 + c0 * c0 + c1 * c1 + c2 * c2 + c3 * c3)
    if d1 <= d2 + tol:
        return (h0, h1, h2, h3), (np.int64(2 * h0), np.int64(2 * h1),
                                  np.int64(2 * h2), np.int64(2 * h3))
    return ((s0 + 0.5, s1 + 0.5, s2 + 0.5, s3 + 0.5),
            (np.int64(2 * s0 + 1), np.int64(2 * s1 + 1),
             np.int64(2 * s2 + 1), np.int64(2 * s3 + 1)))


@njit(cache=True)
def quantize_many(ring, x):
    m = x.shape[0]
    vals = np.zeros((m, 4))
    coords = np.zeros((m, 4), dtype=np.int64)
    for i in range(m):
        v, c = quantize_point(ring, x[i, 0], x[i, 1], x[i, 2], x[i, 3])
        for j in range(4):
            vals[i, j] = v[j]
            coords[i, j] = c[j]
    return vals, coords


@njit(cache=True)
def coords_value(ring, k0, k1, k2, k3):
    if ring == RING_E:
        return (k0 - 0.5 * k1, HALF_SQRT3 * k1, 0.0, 0.0)
    if ring == RING_H:
        return (0.5 * k0, 0.5 * k1, 0.5 * k2, 0.5 * k3)
    return (float(k0), float(k1), float(k2), float(k3))


@njit(cache=True)
def coords_mul(ring, x0, x1, x2, x3, y0, y1, y2, y3):
    """Exact product of two ring elements given in coordinates."""
    z = np.int64(0)
    if ring == RING_Z:
        return (x0 * y0, z, z, z)
    if ring == RING_G:
        return (x0 * y0 - x1 * y1, x0 * y1 + x1 * y0, z, z)
    if ring == RING_E:
        # w^2 = -1 - w
        return (x0 * y0 - x1 * y1, x0 * y1 + x1 * y0 - x1 * y1, z, z)
    p0 = x0 * y0 - x1 * y1 - x2 * y2 - x3 * y3
    p1 = x0 * y1 + x1 * y0 + x2 * y3 - x3 * y2
    p2 = x0 * y2 - x1 * y3 + x2 * y0 + x3 * y1
    p3 = x0 * y3 + x1 * y2 - x2 * y1 + x3 * y0
    if ring == RING_L:
        return (p0, p1, p2, p3)
    # doubled coordinates: (x/2)(y/2) doubled is p/2, always an integer here
    return (p0 // 2, p1 // 2, p2 // 2, p3 // 2)


@njit(cache=True)
def unit_coords(ring):
    if ring == RING_H:
        return np.int64(2)
    return np.int64(1)


@njit(cache=True)
def _norm2(v, D):
    s = 0.0
    for n in range(v.shape[0]):
        for c in range(D):
            s += v[n, c] * v[n, c]
    return s


@njit(cache=True)
def _sub_right(y, x, r0, r1, r2, r3, D):
    """y <- y - x * r for column vectors x, y of shape (N, 4)."""
    N = y.shape[0]
    if D == 1:
        for n in range(N):
            y[n, 0] -= x[n, 0] * r0
    elif D == 2:
        for n in range(N):
            a0 = x[n, 0]
            a1 = x[n, 1]
            y[n, 0] -= a0 * r0 - a1 * r1
            y[n, 1] -= a0 * r1 + a1 * r0
    else:
        for n in range(N):
            p = qmul(x[n, 0], x[n, 1], x[n, 2], x[n, 3], r0, r1, r2, r3)
            y[n, 0] -= p[0]
            y[n, 1] -= p[1]
            y[n, 2] -= p[2]
            y[n, 3] -= p[3]


@njit(cache=True)
def _inner(x, y, D):
    """x^H y for column vectors (conjugate on the left operand)."""
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    s3 = 0.0
    N = x.shape[0]
    if D == 1:
        for n in range(N):
            s0 += x[n, 0] * y[n, 0]
    elif D == 2:
        for n in range(N):
            s0 += x[n, 0] * y[n, 0] + x[n, 1] * y[n, 1]
            s1 += x[n, 0] * y[n, 1] - x[n, 1] * y[n, 0]
    else:
        for n in range(N):
            p = qmul(x[n, 0], -x[n, 1], -x[n, 2], -x[n, 3], y[n, 0], y[n, 1], y[n, 2], y[n, 3])
            s0 += p[0]
            s1 += p[1]
            s2 += p[2]
            s3 += p[3]
    return s0, s1, s2, s3


@njit(cache=True)
def gso(cols, D, pivot, rank_tol):
    """Gram-Schmidt with optional minimum-norm pivoting.

    Returns (Q, R, perm, qn, bad) where ``bad`` is the first rank-deficient
    position or -1.
    """
    K = cols.shape[0]
    Q = cols.copy()
    R = np.zeros((K, K, 4))
    for k in range(K):
        R[k, k, 0] = 1.0
    perm = np.arange(K)
    qn = np.zeros(K)
    for k in range(K):
        qn[k] = _norm2(Q[k], D)
    tol2 = rank_tol * rank_tol
    for k in range(K):
        if pivot:
            km = k
            for l in range(k + 1, K):
                if qn[l] < qn[km]:
                    km = l
            if km != k:
                # move column km to position k, shift k..km-1 one to the right
                qsave = Q[km].copy()
                nsave = qn[km]
                psave = perm[km]
                rsave = R[:k, km].copy()
                for l in range(km, k, -1):
                    Q[l] = Q[l - 1]
                    qn[l] = qn[l - 1]
                    perm[l] = perm[l - 1]
                    R[:k, l] = R[:k, l - 1]
                Q[k] = qsave
                qn[k] = nsave
                perm[k] = psave
                R[:k, k] = rsave
        if qn[k] <= tol2:
            return Q, R, perm, qn, k
        for l in range(k + 1, K):
            s = _inner(Q[k], Q[l], D)
            r0 = s[0] / qn[k]
            r1 = s[1] / qn[k]
            r2 = s[2] / qn[k]
            r3 = s[3] / qn[k]
            R[k, l, 0] = r0
            R[k, l, 1] = r1
            R[k, l, 2] = r2
            R[k, l, 3] = r3
            _sub_right(Q[l], Q[k], r0, r1, r2, r3, D)
            qn[l] = _norm2(Q[l], D)
    return Q, R, perm, qn, -1


@njit(cache=True)
def size_reduce(B, R, T, l, k, ring, stats):
    """Reduce r[l, k] to the Voronoi cell of the ring. Returns True on update."""
    D = ring_dim(ring)
    v, c = quantize_point(ring, R[l, k, 0], R[l, k, 1], R[l, k, 2], R[l, k, 3])
    if v[0] == 0.0 and v[1] == 0.0 and v[2] == 0.0 and v[3] == 0.0:
        return False
    _sub_right(B[k], B[l], v[0], v[1], v[2], v[3], D)
    K = T.shape[1]
    for n in range(K):
        p = coords_mul(ring, T[l, n, 0], T[l, n, 1], T[l, n, 2], T[l, n, 3],
                       c[0], c[1], c[2], c[3])
        for j in range(4):
            T[k, n, j] -= p[j]
    # rows 0..l of column k, with r[l, l] = 1
    _sub_right(R[: l + 1, k], R[: l + 1, l], v[0], v[1], v[2], v[3], D)
    stats[ST_SIZERED] += 1
    stats[ST_SCALAR] += B.shape[1] + K + l + 1
    return True


@njit(cache=True)
def update_qr(Q, R, qn, k, D, stats):
    """GSO update after basis columns k-1 and k were swapped (0-based k)."""
    K = R.shape[0]
    qa = Q[k - 1].copy()
    na = qn[k - 1]
    nb = qn[k]
    r0, r1, r2, r3 = R[k - 1, k, 0], R[k - 1, k, 1], R[k - 1, k, 2], R[k - 1, k, 3]
    rr = r0 * r0 + r1 * r1 + r2 * r2 + r3 * r3
    # q_{k-1} <- q_k + q_{k-1} r
    newq = Q[k].copy()
    _sub_right(newq, qa, -r0, -r1, -r2, -r3, D)
    Q[k - 1] = newq
    nn = nb + rr * na
    # r' = conj(r) |q~_{k-1}|^2 / |q_{k-1}|^2
    f = na / nn
    s0, s1, s2, s3 = r0 * f, -r1 * f, -r2 * f, -r3 * f
    # q_k <- q~_{k-1} - q_{k-1} r'
    Q[k] = qa
    _sub_right(Q[k], Q[k - 1], s0, s1, s2, s3, D)
    qn[k - 1] = nn
    qn[k] = na * nb / nn
    g = nb / nn
    for l in range(k + 1, K):
        a = R[k - 1, l].copy()
        b = R[k, l].copy()
        p = qmul(s0, s1, s2, s3, a[0], a[1], a[2], a[3])
        for j in range(4):
            R[k - 1, l, j] = p[j] + b[j] * g
        p = qmul(r0, r1, r2, r3, b[0], b[1], b[2], b[3])
        for j in range(4):
            R[k, l, j] = a[j] - p[j]
    for l in range(k - 1):
        for j in range(4):
            t = R[l, k - 1, j]
            R[l, k - 1, j] = R[l, k, j]
            R[l, k, j] = t
    R[k - 1, k, 0] = s0
    R[k - 1, k, 1] = s1
    R[k - 1, k, 2] = s2
    R[k - 1, k, 3] = s3
    n_l = K - k - 1
    stats[ST_SCALAR] += 2 * Q.shape[1] + 2 * n_l
    stats[ST_REAL] += 2 + n_l


# Relative decrease a swap must achieve. With delta = 1 exact ties are common
# (e.g. the real images of one Hurwitz vector) and rounding noise would
# otherwise swap the pair back and forth forever.
SWAP_MARGIN = 1e-12


@njit(cache=True)
def lll(cols, ring, delta, rank_tol, guard_tol, max_iter):
    """Generalized LLL over ``ring`` on a column-first basis.

    ``guard_tol`` > 0 enables the inoperative-step guard used by the
    Lipschitz variant. Returns (B, Q, R, T, qn, perm, stats).
    """
    K = cols.shape[0]
    D = ring_dim(ring)
    stats = np.zeros(N_STATS, dtype=np.int64)
    Q, R, perm, qn, bad = gso(cols, D, True, rank_tol)
    T = np.zeros((K, K, 4), dtype=np.int64)
    B = np.empty_like(cols)
    if bad >= 0:
        stats[ST_STATUS] = 1 + bad
        return B, Q, R, T, qn, perm, stats
    one = unit_coords(ring)
    for k in range(K):
        B[k] = cols[perm[k]]
        T[k, perm[k], 0] = one
    k = 1
    while k < K:
        stats[ST_ITER] += 1
        if stats[ST_ITER] > max_iter:
            stats[ST_STATUS] = -1
            break
        size_reduce(B, R, T, k - 1, k, ring, stats)
        rr = (R[k - 1, k, 0] ** 2 + R[k - 1, k, 1] ** 2
              + R[k - 1, k, 2] ** 2 + R[k - 1, k, 3] ** 2)
        swap = False
        if guard_tol > 0.0 and rr >= 1.0 - guard_tol:
            stats[ST_INOP] += 1
        elif qn[k] < (delta - rr) * qn[k - 1] * (1.0 - SWAP_MARGIN):
            swap = True
        if swap:
            tmp = B[k - 1].copy()
            B[k - 1] = B[k]
            B[k] = tmp
            tt = T[k - 1].copy()
            T[k - 1] = T[k]
            T[k] = tt
            update_qr(Q, R, qn, k, D, stats)
            stats[ST_SWAP] += 1
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                size_reduce(B, R, T, l, k, ring, stats)
            k += 1
    return B, Q, R, T, qn, perm, stats


@njit(cache=True)
def enumerate_ball(Rt, radius2):
    """All integer vectors c != 0 with |Rt c|^2 <= radius2 (both signs).

    ``Rt`` is upper triangular. Depth-first search from the last coordinate
    with Schnorr-Euchner zig-zag ordering of the siblings.
    """
    n = Rt.shape[0]
    bound = radius2 * (1.0 + 1e-9)
    cap = 256
    out = np.empty((cap, n), dtype=np.int64)
    count = 0
    c = np.zeros(n)
    ctr = np.zeros(n)
    dx = np.zeros(n)
    ddx = np.zeros(n)
    part = np.zeros(n + 1)
    diag2 = np.empty(n)
    for i in range(n):
        diag2[i] = Rt[i, i] * Rt[i, i]
    i = n - 1
    ctr[i] = 0.0
    c[i] = 0.0
    dx[i] = 1.0
    ddx[i] = 1.0
    while True:
        y = c[i] - ctr[i]
        d = part[i + 1] + y * y * diag2[i]
        if d <= bound:
            if i == 0:
                nonzero = False
                for j in range(n):
                    if c[j] != 0.0:
                        nonzero = True
                        break
                if nonzero:
                    if count == cap:
                        cap *= 2
                        grown = np.empty((cap, n), dtype=np.int64)
                        grown[:count] = out[:count]
                        out = grown
                    for j in range(n):
                        out[count, j] = np.int64(c[j])
                    count += 1
                c[0] += dx[0]
                ddx[0] = -ddx[0]
                dx[0] = ddx[0] - dx[0]
            else:
                part[i] = d
                i -= 1
                s = 0.0
                for j in range(i + 1, n):
                    s += Rt[i, j] * c[j]
                ctr[i] = -s / Rt[i, i]
                c[i] = np.floor(ctr[i] + 0.5)
                if ctr[i] >= c[i]:
                    dx[i] = 1.0
                    ddx[i] = 1.0
                else:
                    dx[i] = -1.0
                    ddx[i] = -1.0
        else:
            i += 1
            if i == n:
                break
            c[i] += dx[i]
            ddx[i] = -ddx[i]
            dx[i] = ddx[i] - dx[i]
    return out[:count]
