"""
Compiled quadrature kernels.

Every reduction is split into fixed blocks of BLOCK outer indices. A block is summed
sequentially with Neumaier compensation and returned as a (sum, compensation) row; the rows
are combined in block order by ``Utilities.combine_partials``. The block layout never depends
on the thread count, so results are bit-identical for any number of workers.

Array conventions: X (m, 3) node positions, T (m, 3) unit tangents, W (m,) weights,
S (m,) arclength fractions in [0, 1).
"""
import math

import numpy as np
from numba import njit, prange

BLOCK = 16
COLLINEAR_TOL = 1e-14


@njit(inline='always')
def _neumaier(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


@njit(cache=True)
def inv_radius(X, i, j, k):
    """Menger curvature 1/R of nodes i, j, k; 0 when collinear, inf when two nodes coincide."""
    # canonical order: every caller sees the same rounding for the same triple
    a = np.int64(i)
    b = np.int64(j)
    d = np.int64(k)
    if a > b:
        a, b = b, a
    if b > d:
        b, d = d, b
    if a > b:
        a, b = b, a
    ux = X[b, 0] - X[a, 0]
    uy = X[b, 1] - X[a, 1]
    uz = X[b, 2] - X[a, 2]
    vx = X[d, 0] - X[a, 0]
    vy = X[d, 1] - X[a, 1]
    vz = X[d, 2] - X[a, 2]
    wx = X[d, 0] - X[b, 0]
    wy = X[d, 1] - X[b, 1]
    wz = X[d, 2] - X[b, 2]
    cx = uy * vz - uz * vy
    cy = uz * vx - ux * vz
    cz = ux * vy - uy * vx
    cross = math.sqrt(cx * cx + cy * cy + cz * cz)
    lu = math.sqrt(ux * ux + uy * uy + uz * uz)
    lv = math.sqrt(vx * vx + vy * vy + vz * vz)
    lw = math.sqrt(wx * wx + wy * wy + wz * wz)
    if lu == 0.0 or lv == 0.0 or lw == 0.0:
        return np.inf
    if 0.5 * cross < COLLINEAR_TOL * lu * lv:
        return 0.0
    return 2.0 * cross / (lu * lw * lv)


@njit(cache=True)
def tp_curvature(X, T, i, j):
    """Inverse tangent-point radius 2 dist(x_j, tangent line at x_i) / |x_j - x_i|^2."""
    dx = X[j, 0] - X[i, 0]
    dy = X[j, 1] - X[i, 1]
    dz = X[j, 2] - X[i, 2]
    cx = dy * T[i, 2] - dz * T[i, 1]
    cy = dz * T[i, 0] - dx * T[i, 2]
    cz = dx * T[i, 1] - dy * T[i, 0]
    dist = math.sqrt(cx * cx + cy * cy + cz * cz)
    chord2 = dx * dx + dy * dy + dz * dz
    if chord2 == 0.0:
        return np.inf
    if dist < COLLINEAR_TOL * math.sqrt(chord2):
        return 0.0
    return 2.0 * dist / chord2


@njit(parallel=True, cache=True)
def menger_blocks(X, W, p, scale):
    """Sum over unordered triples i < j < k of w_i w_j w_k (scale / R)^p."""
    m = X.shape[0]
    nb = (m + BLOCK - 1) // BLOCK
    out = np.zeros((nb, 2))
    for bb in prange(nb):
        b = np.int64(bb)
        s = 0.0
        c = 0.0
        for i in range(b * BLOCK, min(m, (b + 1) * BLOCK)):
            for j in range(i + 1, m):
                wij = W[i] * W[j]
                for k in range(j + 1, m):
                    kap = inv_radius(X, i, j, k)
                    if kap > 0.0:
                        s, c = _neumaier(s, c, wij * W[k] * (kap * scale) ** p)
        out[b, 0] = s
        out[b, 1] = c
    return out


@njit(cache=True)
def menger_local(X, W, p, nodes):
    """Ordered-triple Menger sum restricted to triples that contain at least one of `nodes`."""
    m = X.shape[0]
    rank = np.full(m, -1)
    for r in range(nodes.shape[0]):
        rank[nodes[r]] = r
    s = 0.0
    c = 0.0
    for r in range(nodes.shape[0]):
        a = nodes[r]
        for j in range(m):
            if j == a or (rank[j] >= 0 and rank[j] < r):
                continue
            for k in range(j + 1, m):
                if k == a or (rank[k] >= 0 and rank[k] < r):
                    continue
                kap = inv_radius(X, a, j, k)
                if kap > 0.0:
                    s, c = _neumaier(s, c, W[a] * W[j] * W[k] * kap ** p)
    return 6.0 * (s + c)


@njit(parallel=True, cache=True)
def pair_curvature(X):
    """(m, m) symmetric table of max_k 1/R(x_i, x_j, x_k), k not in {i, j}; zero diagonal."""
    m = X.shape[0]
    K = np.zeros((m, m))
    for ii in prange(m):
        i = np.int64(ii)
        for j in range(i + 1, m):
            best = 0.0
            for k in range(m):
                if k == i or k == j:
                    continue
                kap = inv_radius(X, i, j, k)
                if kap > best:
                    best = kap
            K[i, j] = best
            K[j, i] = best
    return K


@njit(parallel=True, cache=True)
def pair_power_blocks(K, W, p, scale):
    """Sum over unordered pairs i < j of w_i w_j (scale K_ij)^p."""
    m = K.shape[0]
    nb = (m + BLOCK - 1) // BLOCK
    out = np.zeros((nb, 2))
    for bb in prange(nb):
        b = np.int64(bb)
        s = 0.0
        c = 0.0
        for i in range(b * BLOCK, min(m, (b + 1) * BLOCK)):
            for j in range(i + 1, m):
                if K[i, j] > 0.0:
                    s, c = _neumaier(s, c, W[i] * W[j] * (K[i, j] * scale) ** p)
        out[b, 0] = s
        out[b, 1] = c
    return out


@njit(cache=True)
def thickness_scan(X, first, second, dist):
    """
    Largest triple curvature, scanning node pairs by increasing distance.

    A triple through a pair at distance d has R >= d / 2, so once 2 / d falls below the running
    maximum no later pair can improve it.
    """
    m = X.shape[0]
    best = 0.0
    for idx in range(first.shape[0]):
        d = dist[idx]
        if best > 0.0 and (2.0 / d) * (1.0 + 1e-9) < best:
            break
        i = first[idx]
        j = second[idx]
        for k in range(m):
            if k == i or k == j:
                continue
            kap = inv_radius(X, i, j, k)
            if kap > best:
                best = kap
    return best


@njit(parallel=True, cache=True)
def tangent_point_blocks(X, T, W, p, symmetrized, scale):
    """Sum over ordered pairs i != j of w_i w_j (scale / r_tp(i, j))^p, or its symmetrized form."""
    m = X.shape[0]
    nb = (m + BLOCK - 1) // BLOCK
    out = np.zeros((nb, 2))
    for bb in prange(nb):
        b = np.int64(bb)
        s = 0.0
        c = 0.0
        for i in range(b * BLOCK, min(m, (b + 1) * BLOCK)):
            for j in range(m):
                if j == i:
                    continue
                if symmetrized:
                    kap = math.sqrt(tp_curvature(X, T, i, j) * tp_curvature(X, T, j, i))
                else:
                    kap = tp_curvature(X, T, i, j)
                if kap > 0.0:
                    s, c = _neumaier(s, c, W[i] * W[j] * (kap * scale) ** p)
        out[b, 0] = s
        out[b, 1] = c
    return out


@njit(cache=True)
def tangent_point_local(X, T, W, p, symmetrized, nodes):
    """Tangent-point sum restricted to ordered pairs with at least one member in `nodes`."""
    m = X.shape[0]
    rank = np.full(m, -1)
    for r in range(nodes.shape[0]):
        rank[nodes[r]] = r
    s = 0.0
    c = 0.0
    for r in range(nodes.shape[0]):
        a = nodes[r]
        for j in range(m):
            if j == a or (rank[j] >= 0 and rank[j] < r):
                continue
            if symmetrized:
                kap = math.sqrt(tp_curvature(X, T, a, j) * tp_curvature(X, T, j, a))
                if kap > 0.0:
                    s, c = _neumaier(s, c, 2.0 * W[a] * W[j] * kap ** p)
            else:
                kap = tp_curvature(X, T, a, j)
                if kap > 0.0:
                    s, c = _neumaier(s, c, W[a] * W[j] * kap ** p)
                kap = tp_curvature(X, T, j, a)
                if kap > 0.0:
                    s, c = _neumaier(s, c, W[a] * W[j] * kap ** p)
    return s + c


@njit(cache=True)
def moebius_term(X, S, length, i, j):
    """1/|x_i - x_j|^2 - 1/d(s_i, s_j)^2 with the intrinsic distance scaled by the loop length."""
    dx = X[j, 0] - X[i, 0]
    dy = X[j, 1] - X[i, 1]
    dz = X[j, 2] - X[i, 2]
    chord2 = dx * dx + dy * dy + dz * dz
    gap = abs(S[i] - S[j])
    d = length * min(gap, 1.0 - gap)
    if chord2 == 0.0:
        return np.inf
    return 1.0 / chord2 - 1.0 / (d * d)


@njit(parallel=True, cache=True)
def moebius_blocks(X, W, S, length):
    """Sum over unordered pairs i < j of w_i w_j (1/|x_i - x_j|^2 - 1/d^2)."""
    m = X.shape[0]
    nb = (m + BLOCK - 1) // BLOCK
    out = np.zeros((nb, 2))
    for bb in prange(nb):
        b = np.int64(bb)
        s = 0.0
        c = 0.0
        for i in range(b * BLOCK, min(m, (b + 1) * BLOCK)):
            for j in range(i + 1, m):
                s, c = _neumaier(s, c, W[i] * W[j] * moebius_term(X, S, length, i, j))
        out[b, 0] = s
        out[b, 1] = c
    return out


@njit(cache=True)
def acn_term(X, T, i, j):
    """|(t_i x t_j) . (x_j - x_i)| / |x_j - x_i|^3."""
    dx = X[j, 0] - X[i, 0]
    dy = X[j, 1] - X[i, 1]
    dz = X[j, 2] - X[i, 2]
    cx = T[i, 1] * T[j, 2] - T[i, 2] * T[j, 1]
    cy = T[i, 2] * T[j, 0] - T[i, 0] * T[j, 2]
    cz = T[i, 0] * T[j, 1] - T[i, 1] * T[j, 0]
    chord = math.sqrt(dx * dx + dy * dy + dz * dz)
    if chord == 0.0:
        return np.inf
    return abs(cx * dx + cy * dy + cz * dz) / (chord * chord * chord)


@njit(parallel=True, cache=True)
def acn_blocks(X, T, W):
    """Sum over unordered pairs i < j of w_i w_j acn_term(i, j)."""
    m = X.shape[0]
    nb = (m + BLOCK - 1) // BLOCK
    out = np.zeros((nb, 2))
    for bb in prange(nb):
        b = np.int64(bb)
        s = 0.0
        c = 0.0
        for i in range(b * BLOCK, min(m, (b + 1) * BLOCK)):
            for j in range(i + 1, m):
                s, c = _neumaier(s, c, W[i] * W[j] * acn_term(X, T, i, j))
        out[b, 0] = s
        out[b, 1] = c
    return out


@njit(cache=True)
def acn_local(X, T, W, nodes):
    """Ordered-pair acn sum (without the 1/4pi factor) over pairs touching `nodes`."""
    m = X.shape[0]
    rank = np.full(m, -1)
    for r in range(nodes.shape[0]):
        rank[nodes[r]] = r
    s = 0.0
    c = 0.0
    for r in range(nodes.shape[0]):
        a = nodes[r]
        for j in range(m):
            if j == a or (rank[j] >= 0 and rank[j] < r):
                continue
            s, c = _neumaier(s, c, 2.0 * W[a] * W[j] * acn_term(X, T, a, j))
    return s + c
