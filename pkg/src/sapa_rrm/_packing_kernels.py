"""Compiled extreme-point DBLF and shaking kernels.

Boxes are described by parallel arrays (w, h, d) in placement order; x and y
are integer element offsets and z is a continuous time offset. Extreme points
(EPs) are kept sorted deepest-bottom-left, i.e. by (z, y, x) ascending.
"""

import numpy as np
from numba import njit

Z_EPS = 1e-12


@njit(cache=True)
def _ep_less(za, ya, xa, zb, yb, xb):
    if za < zb - Z_EPS:
        return True
    if za > zb + Z_EPS:
        return False
    if ya != yb:
        return ya < yb
    return xa < xb


@njit(cache=True)
def _same_point(za, ya, xa, zb, yb, xb):
    return xa == xb and ya == yb and abs(za - zb) <= Z_EPS


@njit(cache=True)
def _overlaps(x, y, z, w, h, d, px, py, pz, pw, ph, pd, m):
    for j in range(m):
        if (
            x < px[j] + pw[j]
            and px[j] < x + w
            and y < py[j] + ph[j]
            and py[j] < y + h
            and z < pz[j] + pd[j] - Z_EPS
            and pz[j] < z + d - Z_EPS
        ):
            return True
    return False


@njit(cache=True)
def _inside_any(x, y, z, px, py, pz, pw, ph, pd, m):
    for j in range(m):
        if (
            px[j] <= x < px[j] + pw[j]
            and py[j] <= y < py[j] + ph[j]
            and pz[j] - Z_EPS <= z < pz[j] + pd[j] - Z_EPS
        ):
            return True
    return False


@njit(cache=True)
def _project_y(x, y, z, px, py, pz, pw, ph, pd, m):
    best = 0
    for j in range(m):
        top = py[j] + ph[j]
        if top <= y and top > best and px[j] <= x < px[j] + pw[j] and pz[j] - Z_EPS <= z < pz[j] + pd[j] - Z_EPS:
            best = top
    return best


@njit(cache=True)
def _project_x(x, y, z, px, py, pz, pw, ph, pd, m):
    best = 0
    for j in range(m):
        right = px[j] + pw[j]
        if right <= x and right > best and py[j] <= y < py[j] + ph[j] and pz[j] - Z_EPS <= z < pz[j] + pd[j] - Z_EPS:
            best = right
    return best


@njit(cache=True)
def _project_z(x, y, z, px, py, pz, pw, ph, pd, m):
    best = 0.0
    for j in range(m):
        top = pz[j] + pd[j]
        if top <= z + Z_EPS and top > best and px[j] <= x < px[j] + pw[j] and py[j] <= y < py[j] + ph[j]:
            best = top
    return best


@njit(cache=True)
def _insert_ep(ex, ey, ez, ne, x, y, z, W, H, px, py, pz, pw, ph, pd, m):
    """Insert (x, y, z) into the sorted EP arrays; returns the new count."""
    if x >= W or y >= H:
        return ne
    if _inside_any(x, y, z, px, py, pz, pw, ph, pd, m):
        return ne
    pos = ne
    for e in range(ne):
        if _same_point(ez[e], ey[e], ex[e], z, y, x):
            return ne
        if _ep_less(z, y, x, ez[e], ey[e], ex[e]):
            pos = e
            break
    if pos < ne:
        # the rest may still hold a duplicate within tolerance
        for e in range(pos, ne):
            if _same_point(ez[e], ey[e], ex[e], z, y, x):
                return ne
    for e in range(ne, pos, -1):
        ex[e] = ex[e - 1]
        ey[e] = ey[e - 1]
        ez[e] = ez[e - 1]
    ex[pos] = x
    ey[pos] = y
    ez[pos] = z
    return ne + 1


@njit(cache=True)
def _add_box_eps(i, ex, ey, ez, ne, W, H, px, py, pz, pw, ph, pd):
    """Drop EPs covered by box ``i`` and add the projections of its corners."""
    m = i + 1
    k = 0
    for e in range(ne):
        if not (
            px[i] <= ex[e] < px[i] + pw[i]
            and py[i] <= ey[e] < py[i] + ph[i]
            and pz[i] - Z_EPS <= ez[e] < pz[i] + pd[i] - Z_EPS
        ):
            ex[k] = ex[e]
            ey[k] = ey[e]
            ez[k] = ez[e]
            k += 1
    ne = k
    x, y, z = px[i], py[i], pz[i]
    xr, yt, zt = x + pw[i], y + ph[i], z + pd[i]
    # corner (x+w, y, z) projected along -y and -z
    ne = _insert_ep(ex, ey, ez, ne, xr, _project_y(xr, y, z, px, py, pz, pw, ph, pd, m), z, W, H, px, py, pz, pw, ph, pd, m)
    ne = _insert_ep(ex, ey, ez, ne, xr, y, _project_z(xr, y, z, px, py, pz, pw, ph, pd, m), W, H, px, py, pz, pw, ph, pd, m)
    # corner (x, y+h, z) projected along -x and -z
    ne = _insert_ep(ex, ey, ez, ne, _project_x(x, yt, z, px, py, pz, pw, ph, pd, m), yt, z, W, H, px, py, pz, pw, ph, pd, m)
    ne = _insert_ep(ex, ey, ez, ne, x, yt, _project_z(x, yt, z, px, py, pz, pw, ph, pd, m), W, H, px, py, pz, pw, ph, pd, m)
    # corner (x, y, z+d) projected along -x and -y
    ne = _insert_ep(ex, ey, ez, ne, _project_x(x, y, zt, px, py, pz, pw, ph, pd, m), y, zt, W, H, px, py, pz, pw, ph, pd, m)
    ne = _insert_ep(ex, ey, ez, ne, x, _project_y(x, y, zt, px, py, pz, pw, ph, pd, m), zt, W, H, px, py, pz, pw, ph, pd, m)
    return ne


@njit(cache=True)
def _with_floor(ex, ey, ez, ne, top, W, H, px, py, pz, pw, ph, pd, m):
    # (0, 0, top) always admits any box that fits the cross-section
    return _insert_ep(ex, ey, ez, ne, 0, 0, top, W, H, px, py, pz, pw, ph, pd, m)


@njit(cache=True)
def dblf_kernel(W, H, w, h, d):
    n = w.shape[0]
    px = np.zeros(n, np.int64)
    py = np.zeros(n, np.int64)
    pz = np.zeros(n, np.float64)
    cap = 7 * n + 8
    ex = np.zeros(cap, np.int64)
    ey = np.zeros(cap, np.int64)
    ez = np.zeros(cap, np.float64)
    ne = 1
    top = 0.0
    for i in range(n):
        # placed boxes 0..i-1 live in px/py/pz with sizes w/h/d; the floor
        # point (0, 0, top) is an implicit candidate that always fits
        x, y, z = 0, 0, top
        for e in range(ne):
            if _ep_less(top, 0, 0, ez[e], ey[e], ex[e]):
                break
            if ex[e] + w[i] <= W and ey[e] + h[i] <= H:
                if not _overlaps(ex[e], ey[e], ez[e], w[i], h[i], d[i], px, py, pz, w, h, d, i):
                    x, y, z = ex[e], ey[e], ez[e]
                    break
        px[i] = x
        py[i] = y
        pz[i] = z
        ne = _add_box_eps(i, ex, ey, ez, ne, W, H, px, py, pz, w, h, d)
        if pz[i] + d[i] > top:
            top = pz[i] + d[i]
    return px, py, pz


@njit(cache=True)
def gaps_kernel(W, H, x, y, z, w, h, d):
    """Replay EP generation over a placement sequence; returns sorted gaps."""
    n = w.shape[0]
    cap = 7 * n + 8
    ex = np.zeros(cap, np.int64)
    ey = np.zeros(cap, np.int64)
    ez = np.zeros(cap, np.float64)
    ne = 1
    top = 0.0
    for i in range(n):
        ne = _add_box_eps(i, ex, ey, ez, ne, W, H, x, y, z, w, h, d)
        if z[i] + d[i] > top:
            top = z[i] + d[i]
    ne = _with_floor(ex, ey, ez, ne, top, W, H, x, y, z, w, h, d, n)
    return ex[:ne].copy(), ey[:ne].copy(), ez[:ne].copy()


@njit(cache=True)
def _height(z, d):
    top = 0.0
    for i in range(z.shape[0]):
        if z[i] + d[i] > top:
            top = z[i] + d[i]
    return top


@njit(cache=True)
def _key_greater(a, b, k1, k2, k3):
    if k1[a] != k1[b]:
        return k1[a] > k1[b]
    if k2[a] != k2[b]:
        return k2[a] > k2[b]
    return k3[a] > k3[b]


@njit(cache=True)
def sort_kernel(x, y, z, w, h, d, criterion):
    """Stable descending order of placed boxes under criterion 1 or 2.

    1: z+d; y+h; x+w    2: z+d; x+w; y+h
    """
    n = w.shape[0]
    k1 = z + d
    if criterion == 1:
        k2 = (y + h).astype(np.float64)
        k3 = (x + w).astype(np.float64)
    else:
        k2 = (x + w).astype(np.float64)
        k3 = (y + h).astype(np.float64)
    order = np.arange(n)
    for i in range(1, n):
        cur = order[i]
        j = i - 1
        while j >= 0 and _key_greater(cur, order[j], k1, k2, k3):
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = cur
    return order


@njit(cache=True)
def shake_kernel(W, H, w, h, d, criteria, k):
    """Forward/backward shaking around DBLF.

    Returns ``(order, x, y, z, height)`` of the best solution, where ``order``
    indexes the input arrays in placement order.
    """
    best_order = np.arange(w.shape[0])
    bx, by, bz = dblf_kernel(W, H, w, h, d)
    best_h = _height(bz, d)
    for _ in range(k):
        for c in criteria:
            # I' = sort(S*, c)
            bw, bh, bd = w[best_order], h[best_order], d[best_order]
            o1 = sort_kernel(bx, by, bz, bw, bh, bd, c)
            ord1 = best_order[o1]
            w1, h1, d1 = w[ord1], h[ord1], d[ord1]
            x1, y1, z1 = dblf_kernel(W, H, w1, h1, d1)
            h_1 = _height(z1, d1)
            if h_1 < best_h:
                best_order, bx, by, bz, best_h = ord1, x1, y1, z1, h_1
            # I'' = sort(S', c)
            o2 = sort_kernel(x1, y1, z1, w1, h1, d1, c)
            ord2 = ord1[o2]
            w2, h2, d2 = w[ord2], h[ord2], d[ord2]
            x2, y2, z2 = dblf_kernel(W, H, w2, h2, d2)
            h_2 = _height(z2, d2)
            if h_2 < best_h:
                best_order, bx, by, bz, best_h = ord2, x2, y2, z2, h_2
    return best_order, bx, by, bz, best_h


@njit(cache=True)
def initial_order_kernel(w, h, d):
    """Descending array area, then descending depth, then ascending index."""
    n = w.shape[0]
    area = (w * h).astype(np.float64)
    order = np.arange(n)
    for i in range(1, n):
        cur = order[i]
        j = i - 1
        while j >= 0:
            o = order[j]
            if area[cur] > area[o] or (area[cur] == area[o] and d[cur] > d[o]):
                order[j + 1] = o
                j -= 1
            else:
                break
        order[j + 1] = cur
    return order


@njit(cache=True)
def sapa_height_kernel(W, H, w, h, d, criteria, k):
    order = initial_order_kernel(w, h, d)
    best_order, bx, by, bz, best_h = shake_kernel(W, H, w[order], h[order], d[order], criteria, k)
    return order[best_order], bx, by, bz, best_h
