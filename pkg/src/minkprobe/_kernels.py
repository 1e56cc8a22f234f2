"""Hot inner loops, compiled with numba when available.

Set ``MINKPROBE_DISABLE_NUMBA=1`` to force the pure-numpy path. Both
implementations are importable as ``<name>_numba`` / ``<name>_numpy`` so the
test-suite and ``benchmarks/bench_kernels.py`` can compare them directly.
"""
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("MINKPROBE_DISABLE_NUMBA", "0") in ("", "0")
BACKEND = "numba" if USE_NUMBA else "numpy"

_CHUNK = 4096


# --------------------------------------------------------------------------
# numpy implementations

def support_max_numpy(points, dirs):
    """max_k <points[k], dirs[i]> for every row of ``dirs``."""
    out = np.empty(len(dirs))
    for s in range(0, len(dirs), _CHUNK):
        out[s:s + _CHUNK] = (dirs[s:s + _CHUNK] @ points.T).max(axis=1)
    return out


def hinge_sums_numpy(dirs, atoms, coef):
    """sum_j coef[j] * max(<dirs[i], atoms[j]>, 0) for every row of ``dirs``."""
    out = np.empty(len(dirs))
    for s in range(0, len(dirs), _CHUNK):
        g = dirs[s:s + _CHUNK] @ atoms.T
        np.maximum(g, 0.0, out=g)
        out[s:s + _CHUNK] = g @ coef
    return out


def _arc_minimum(starts, ends, sx, sy):
    # on an arc with fixed active set, f(theta) = sx cos(theta) + sy sin(theta)
    fa = sx * np.cos(starts) + sy * np.sin(starts)
    fb = sx * np.cos(ends) + sy * np.sin(ends)
    best = np.minimum(fa, fb)
    arg = np.where(fa <= fb, starts, ends)
    r = np.hypot(sx, sy)
    tstar = np.arctan2(sy, sx) + np.pi
    # shift the interior candidate into [start, start + 2pi)
    tstar = starts + np.mod(tstar - starts, 2.0 * np.pi)
    inside = (tstar < ends) & (r > 0)
    better = inside & (-r < best)
    best = np.where(better, -r, best)
    arg = np.where(better, tstar, arg)
    return best, arg


def rotundity_2d_numpy(normals, weights):
    """Exact min over the circle of sum_j w_j max(<y, n_j>, 0).

    Returns ``(value, minimizing angle)``.
    """
    alpha = np.arctan2(normals[:, 1], normals[:, 0])
    ev = np.concatenate([alpha - np.pi / 2, alpha + np.pi / 2])
    ev = np.mod(ev, 2.0 * np.pi)
    order0 = np.sort(ev)
    gaps = np.diff(np.concatenate([order0, order0[:1] + 2 * np.pi]))
    k = int(np.argmax(gaps))
    theta0 = order0[k] + 0.5 * gaps[k]
    y0 = np.array([np.cos(theta0), np.sin(theta0)])
    active = normals @ y0 > 0
    s0 = (weights[active, None] * normals[active]).sum(axis=0)
    sign = np.concatenate([np.ones_like(alpha), -np.ones_like(alpha)])
    wn = np.concatenate([normals, normals]) * (np.concatenate([weights, weights]) * sign)[:, None]
    rel = np.mod(ev - theta0, 2.0 * np.pi)
    order = np.argsort(rel, kind="stable")
    rel = rel[order]
    cs = np.cumsum(wn[order], axis=0)
    sx = np.concatenate([[s0[0]], s0[0] + cs[:, 0]])
    sy = np.concatenate([[s0[1]], s0[1] + cs[:, 1]])
    bounds = np.concatenate([[0.0], rel, [2.0 * np.pi]]) + theta0
    best, arg = _arc_minimum(bounds[:-1], bounds[1:], sx, sy)
    i = int(np.argmin(best))
    return max(float(best[i]), 0.0), float(np.mod(arg[i], 2.0 * np.pi))


def greedy_farthest_numpy(supp, eps):
    """Gonzalez farthest-point selection under the sup-norm.

    Starts from row 0 and adds the row farthest from the current selection
    until every row lies within ``eps`` of it.
    """
    sel = [0]
    dist = np.abs(supp - supp[0]).max(axis=1)
    while True:
        j = int(np.argmax(dist))
        if dist[j] <= eps:
            break
        sel.append(j)
        np.minimum(dist, np.abs(supp - supp[j]).max(axis=1), out=dist)
    return np.array(sel, dtype=np.int64)


def _basis_rows(normals):
    # right-handed (e1, e2, n) for every row
    a = np.where(np.abs(normals[:, :1]) < 0.9, np.array([[1.0, 0.0, 0.0]]), np.array([[0.0, 1.0, 0.0]]))
    e1 = np.cross(normals, a)
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    e2 = np.cross(normals, e1)
    return e1, e2


def facet_areas_3d_numpy(prim, simplices, normals):
    """Facet areas of P(h) from its dual hull.

    ``prim[s]`` is the primal vertex dual to hull triangle ``simplices[s]``;
    the facet of constraint ``i`` is the polygon of the primal vertices of
    the triangles incident to ``i``, taken in angular order.
    """
    k = len(normals)
    fac = simplices.ravel()
    pts = prim[np.repeat(np.arange(len(prim)), 3)]
    cnt = np.bincount(fac, minlength=k).astype(float)
    cen = np.column_stack([np.bincount(fac, weights=pts[:, a], minlength=k) for a in range(3)])
    cen /= np.maximum(cnt, 1.0)[:, None]
    e1, e2 = _basis_rows(normals)
    rel = pts - cen[fac]
    ang = np.arctan2((rel * e2[fac]).sum(1), (rel * e1[fac]).sum(1))
    order = np.lexsort((ang, fac))
    fac, rel = fac[order], rel[order]
    start = np.searchsorted(fac, fac, side="left")
    stop = np.searchsorted(fac, fac, side="right")
    pos = np.arange(len(fac))
    nxt = np.where(pos + 1 < stop, pos + 1, start)
    cr = np.cross(rel, rel[nxt])
    contrib = 0.5 * (cr * normals[fac]).sum(1)
    areas = np.bincount(fac, weights=contrib, minlength=k)
    areas[cnt < 3] = 0.0
    return areas


# --------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    # points are read column-wise with the 2D/3D dot products unrolled so the
    # inner reductions vectorize; fastmath only reorders these sums
    @numba.njit(cache=True, fastmath=True)
    def support_max_numba(points, dirs):
        n, d = dirs.shape
        pt = np.ascontiguousarray(points.T)
        m = pt.shape[1]
        out = np.empty(n)
        if d == 2:
            px, py = pt[0], pt[1]
            for i in range(n):
                x, y = dirs[i, 0], dirs[i, 1]
                best = -np.inf
                for k in range(m):
                    best = max(best, px[k] * x + py[k] * y)
                out[i] = best
        elif d == 3:
            px, py, pz = pt[0], pt[1], pt[2]
            for i in range(n):
                x, y, z = dirs[i, 0], dirs[i, 1], dirs[i, 2]
                best = -np.inf
                for k in range(m):
                    best = max(best, px[k] * x + py[k] * y + pz[k] * z)
                out[i] = best
        else:
            for i in range(n):
                best = -np.inf
                for k in range(m):
                    s = 0.0
                    for a in range(d):
                        s += pt[a, k] * dirs[i, a]
                    best = max(best, s)
                out[i] = best
        return out

    @numba.njit(cache=True, fastmath=True)
    def hinge_sums_numba(dirs, atoms, coef):
        n, d = dirs.shape
        at = np.ascontiguousarray(atoms.T)
        m = at.shape[1]
        out = np.empty(n)
        if d == 2:
            ax, ay = at[0], at[1]
            for i in range(n):
                x, y = dirs[i, 0], dirs[i, 1]
                acc = 0.0
                for j in range(m):
                    acc += coef[j] * max(ax[j] * x + ay[j] * y, 0.0)
                out[i] = acc
        elif d == 3:
            ax, ay, az = at[0], at[1], at[2]
            for i in range(n):
                x, y, z = dirs[i, 0], dirs[i, 1], dirs[i, 2]
                acc = 0.0
                for j in range(m):
                    acc += coef[j] * max(ax[j] * x + ay[j] * y + az[j] * z, 0.0)
                out[i] = acc
        else:
            for i in range(n):
                acc = 0.0
                for j in range(m):
                    s = 0.0
                    for a in range(d):
                        s += at[a, j] * dirs[i, a]
                    acc += coef[j] * max(s, 0.0)
                out[i] = acc
        return out

    @numba.njit(cache=True)
    def _rotundity_sweep(rel, wnx, wny, s0x, s0y, theta0):
        twopi = 2.0 * np.pi
        sx = s0x
        sy = s0y
        best = np.inf
        arg = theta0
        m = rel.shape[0]
        for k in range(m + 1):
            a = theta0 + (0.0 if k == 0 else rel[k - 1])
            b = theta0 + (twopi if k == m else rel[k])
            if k > 0:
                sx += wnx[k - 1]
                sy += wny[k - 1]
            fa = sx * np.cos(a) + sy * np.sin(a)
            fb = sx * np.cos(b) + sy * np.sin(b)
            if fa < best:
                best = fa
                arg = a
            if fb < best:
                best = fb
                arg = b
            r = np.hypot(sx, sy)
            if r > 0.0:
                t = np.arctan2(sy, sx) + np.pi
                t = a + ((t - a) % twopi)
                if t < b and -r < best:
                    best = -r
                    arg = t
        return best, arg

    def rotundity_2d_numba(normals, weights):
        alpha = np.arctan2(normals[:, 1], normals[:, 0])
        ev = np.mod(np.concatenate([alpha - np.pi / 2, alpha + np.pi / 2]), 2.0 * np.pi)
        order0 = np.sort(ev)
        gaps = np.diff(np.concatenate([order0, order0[:1] + 2 * np.pi]))
        k = int(np.argmax(gaps))
        theta0 = order0[k] + 0.5 * gaps[k]
        y0 = np.array([np.cos(theta0), np.sin(theta0)])
        active = normals @ y0 > 0
        s0 = (weights[active, None] * normals[active]).sum(axis=0)
        sign = np.concatenate([np.ones_like(alpha), -np.ones_like(alpha)])
        wn = np.concatenate([normals, normals]) * (np.concatenate([weights, weights]) * sign)[:, None]
        rel = np.mod(ev - theta0, 2.0 * np.pi)
        order = np.argsort(rel, kind="stable")
        best, arg = _rotundity_sweep(rel[order], np.ascontiguousarray(wn[order, 0]),
                                     np.ascontiguousarray(wn[order, 1]),
                                     s0[0], s0[1], theta0)
        return max(float(best), 0.0), float(np.mod(arg, 2.0 * np.pi))

    @numba.njit(cache=True)
    def _sup_dist_row(supp, j, dist):
        n, d = supp.shape
        for i in range(n):
            m = 0.0
            for a in range(d):
                v = abs(supp[i, a] - supp[j, a])
                if v > m:
                    m = v
            if m < dist[i]:
                dist[i] = m

    @numba.njit(cache=True)
    def _greedy_farthest(supp, eps):
        n = supp.shape[0]
        dist = np.full(n, np.inf)
        sel = np.empty(n, dtype=np.int64)
        sel[0] = 0
        count = 1
        _sup_dist_row(supp, 0, dist)
        while True:
            j = 0
            for i in range(1, n):
                if dist[i] > dist[j]:
                    j = i
            if dist[j] <= eps:
                break
            sel[count] = j
            count += 1
            _sup_dist_row(supp, j, dist)
        return sel[:count].copy()

    def greedy_farthest_numba(supp, eps):
        return _greedy_farthest(np.ascontiguousarray(supp, dtype=np.float64), float(eps))

    @numba.njit(cache=True)
    def facet_areas_3d_numba(prim, simplices, normals):
        k = normals.shape[0]
        ns = simplices.shape[0]
        ptr = np.zeros(k + 1, dtype=np.int64)
        for s in range(ns):
            for a in range(3):
                ptr[simplices[s, a] + 1] += 1
        for i in range(k):
            ptr[i + 1] += ptr[i]
        fill = ptr[:-1].copy()
        inc = np.empty(3 * ns, dtype=np.int64)
        for s in range(ns):
            for a in range(3):
                i = simplices[s, a]
                inc[fill[i]] = s
                fill[i] += 1
        areas = np.zeros(k)
        for i in range(k):
            m = ptr[i + 1] - ptr[i]
            if m < 3:
                continue
            nx, ny, nz = normals[i, 0], normals[i, 1], normals[i, 2]
            if abs(nx) < 0.9:
                ax, ay, az = 1.0, 0.0, 0.0
            else:
                ax, ay, az = 0.0, 1.0, 0.0
            e1x, e1y, e1z = ny * az - nz * ay, nz * ax - nx * az, nx * ay - ny * ax
            nr = np.sqrt(e1x * e1x + e1y * e1y + e1z * e1z)
            e1x /= nr
            e1y /= nr
            e1z /= nr
            e2x, e2y, e2z = ny * e1z - nz * e1y, nz * e1x - nx * e1z, nx * e1y - ny * e1x
            cx = cy = cz = 0.0
            for t in range(m):
                s = inc[ptr[i] + t]
                cx += prim[s, 0]
                cy += prim[s, 1]
                cz += prim[s, 2]
            cx /= m
            cy /= m
            cz /= m
            ang = np.empty(m)
            for t in range(m):
                s = inc[ptr[i] + t]
                rx, ry, rz = prim[s, 0] - cx, prim[s, 1] - cy, prim[s, 2] - cz
                ang[t] = np.arctan2(rx * e2x + ry * e2y + rz * e2z, rx * e1x + ry * e1y + rz * e1z)
            order = np.argsort(ang)
            acc = 0.0
            for t in range(m):
                p = inc[ptr[i] + order[t]]
                q = inc[ptr[i] + order[(t + 1) % m]]
                px, py, pz = prim[p, 0] - cx, prim[p, 1] - cy, prim[p, 2] - cz
                qx, qy, qz = prim[q, 0] - cx, prim[q, 1] - cy, prim[q, 2] - cz
                acc += (py * qz - pz * qy) * nx + (pz * qx - px * qz) * ny + (px * qy - py * qx) * nz
            areas[i] = 0.5 * acc
        return areas


else:  # pragma: no cover
    support_max_numba = support_max_numpy
    hinge_sums_numba = hinge_sums_numpy
    rotundity_2d_numba = rotundity_2d_numpy
    greedy_farthest_numba = greedy_farthest_numpy
    facet_areas_3d_numba = facet_areas_3d_numpy


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


if USE_NUMBA:
    def support_max(points, dirs):
        return support_max_numba(_c(points), _c(dirs))

    def hinge_sums(dirs, atoms, coef):
        return hinge_sums_numba(_c(dirs), _c(atoms), _c(coef))

    rotundity_2d = rotundity_2d_numba
    greedy_farthest = greedy_farthest_numba

    def facet_areas_3d(prim, simplices, normals):
        return facet_areas_3d_numba(_c(prim), np.ascontiguousarray(simplices, dtype=np.int64), _c(normals))
else:
    def support_max(points, dirs):
        return support_max_numpy(_c(points), _c(dirs))

    def hinge_sums(dirs, atoms, coef):
        return hinge_sums_numpy(_c(dirs), _c(atoms), _c(coef))

    rotundity_2d = rotundity_2d_numpy
    greedy_farthest = greedy_farthest_numpy

    def facet_areas_3d(prim, simplices, normals):
        return facet_areas_3d_numpy(_c(prim), np.asarray(simplices, dtype=np.int64), _c(normals))
