"""Exact polytope geometry in dimensions 2 and 3.

Polygons are stored as counterclockwise vertex arrays, polyhedra as vertex
arrays plus outward-oriented facet cycles. Everything is double precision.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError, cKDTree

from . import _kernels as K
from .errors import DimensionMismatch, Empty, Unbounded
from .nets import circle_net, icosphere, sphere_net

INACTIVE_AREA = 1e-12
_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def _hull_2d(points: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Indices of the strictly convex hull of planar points, counterclockwise.

    Andrew's monotone chain; points within ``rtol`` (relative) of an edge
    line are discarded so no collinear vertex survives.
    """
    pts = np.asarray(points, dtype=float)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    scale = max(float(np.abs(pts).max()), 1e-300)
    eps = rtol * scale * scale

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(pts[lower[-2]], pts[lower[-1]], pts[i]) <= eps:
            lower.pop()
        lower.append(int(i))
    upper: list[int] = []
    for i in order[::-1]:
        while len(upper) >= 2 and cross(pts[upper[-2]], pts[upper[-1]], pts[i]) <= eps:
            upper.pop()
        upper.append(int(i))
    hull = lower[:-1] + upper[:-1]
    # drop exact duplicates that survive when all points coincide
    out: list[int] = []
    for i in hull:
        if not out or np.any(pts[i] != pts[out[-1]]):
            out.append(i)
    if len(out) > 1 and np.all(pts[out[0]] == pts[out[-1]]):
        out.pop()
    return np.array(out, dtype=np.int64)


def _plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(normal, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    return e1, e2


def _newell(cycle_pts: np.ndarray) -> np.ndarray:
    """Twice the vector area of a planar polygon (Newell's method)."""
    nxt = np.roll(cycle_pts, -1, axis=0)
    return np.cross(cycle_pts, nxt).sum(axis=0)


def _polyhedron_from_points(points: np.ndarray):
    pts = np.asarray(points, dtype=float)
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise Empty(f"points do not span a 3D body: {exc}") from None
    scale = max(float(np.abs(pts).max()), 1e-300)
    eq = hull.equations
    # merge coplanar neighbouring triangles into facets (union-find)
    parent = np.arange(len(hull.simplices))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for s, nbrs in enumerate(hull.neighbors):
        for t in nbrs:
            if t < s:
                continue
            if (eq[s, :3] @ eq[t, :3] > 1.0 - 1e-11
                    and abs(eq[s, 3] - eq[t, 3]) <= 1e-11 * scale):
                ra, rb = find(s), find(t)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for s in range(len(hull.simplices)):
        groups.setdefault(find(s), []).append(s)
    facets = []
    for root, members in groups.items():
        idx = np.unique(hull.simplices[members].ravel())
        n = eq[members, :3].mean(axis=0)
        n /= np.linalg.norm(n)
        e1, e2 = _plane_basis(n)
        local = np.column_stack([pts[idx] @ e1, pts[idx] @ e2])
        ring = idx[_hull_2d(local)]
        if len(ring) < 3:
            continue
        # (e1, e2, n) is right-handed, so the in-plane ccw ring is outward
        facets.append(ring)
    used = np.unique(np.concatenate(facets))
    remap = -np.ones(len(pts), dtype=np.int64)
    remap[used] = np.arange(len(used))
    return pts[used], tuple(remap[f] for f in facets)


@dataclass(frozen=True, eq=False)
class Polytope:
    """Bounded convex body with non-empty interior in dimension 2 or 3.

    Parameters
    ----------
    vertices : array, shape (n, d)
        Extreme points; counterclockwise for ``d == 2``.
    facets : tuple of int arrays, optional
        Outward-oriented vertex cycles (3D only).
    """

    vertices: np.ndarray
    facets: tuple | None = None

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if v.ndim != 2 or v.shape[1] not in (2, 3):
            raise DimensionMismatch(f"vertices must have shape (n, 2|3), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite vertex coordinates")
        if v.shape[1] == 3 and self.facets is None:
            raise ValueError("3D polytopes need facet cycles; use Polytope.from_points")
        if self.facets is not None:
            object.__setattr__(self, "facets",
                               tuple(np.asarray(f, dtype=np.int64) for f in self.facets))

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_points(cls, points) -> "Polytope":
        """Convex hull of a point cloud."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise DimensionMismatch(f"points must have shape (n, 2|3), got {pts.shape}")
        if pts.shape[1] == 2:
            idx = _hull_2d(pts)
            if len(idx) < 3:
                raise Empty("points do not span a 2D body")
            return cls(pts[idx])
        verts, facets = _polyhedron_from_points(pts)
        return cls(verts, facets)

    @classmethod
    def from_dict(cls, data: dict) -> "Polytope":
        dim = int(data["dim"])
        verts = np.asarray(data["vertices"], dtype=float).reshape(-1, dim)
        if dim == 2:
            return cls.from_points(verts)
        return cls(verts, tuple(np.asarray(f) for f in data["facets"]))

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "vertices": self.vertices.tolist()}
        if self.dim == 3:
            out["facets"] = [f.tolist() for f in self.facets]
        return out

    # -- basic attributes ----------------------------------------------
    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @cached_property
    def _facet_vectors(self) -> np.ndarray:
        """Area-weighted outward normals, one row per facet."""
        v = self.vertices
        if self.dim == 2:
            e = np.roll(v, -1, axis=0) - v
            return np.column_stack([e[:, 1], -e[:, 0]])
        return np.array([0.5 * _newell(v[f]) for f in self.facets])

    @cached_property
    def facet_areas(self) -> np.ndarray:
        a = np.linalg.norm(self._facet_vectors, axis=1)
        a.setflags(write=False)
        return a

    @cached_property
    def facet_normals(self) -> np.ndarray:
        n = self._facet_vectors / self.facet_areas[:, None]
        n.setflags(write=False)
        return n

    @cached_property
    def facet_offsets(self) -> np.ndarray:
        """Support values at the facet normals."""
        return support(self, self.facet_normals)

    def halfspaces(self) -> "HalfspaceRep":
        return HalfspaceRep(self.facet_normals, self.facet_offsets)

    @cached_property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        if self.dim == 2:
            nxt = np.roll(v, -1, axis=0)
            cr = v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]
            a = cr.sum() / 2.0
            return ((v + nxt) * cr[:, None]).sum(axis=0) / (6.0 * a)
        o = v.mean(axis=0)
        acc = np.zeros(3)
        vol = 0.0
        for f in self.facets:
            p = v[f] - o
            for k in range(1, len(f) - 1):
                dv = np.linalg.det(np.array([p[0], p[k], p[k + 1]])) / 6.0
                vol += dv
                acc += dv * (p[0] + p[k] + p[k + 1]) / 4.0
        return o + acc / vol

    @property
    def diameter(self) -> float:
        v = self.vertices
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d * d).sum(axis=2)).max())

    @property
    def radius(self) -> float:
        """max |x| over the body (radius of the origin-centred enclosing ball)."""
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def translate(self, t) -> "Polytope":
        return Polytope(self.vertices + np.asarray(t, dtype=float), self.facets)

    def scale(self, s: float) -> "Polytope":
        return Polytope(self.vertices * float(s), self.facets)


@dataclass(frozen=True, eq=False)
class HalfspaceRep:
    """The set {x : <x, normals[i]> <= offsets[i] for all i}."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        n = np.array(self.normals, dtype=float)
        h = np.array(self.offsets, dtype=float).ravel()
        if n.ndim != 2 or n.shape[1] not in (2, 3) or len(n) != len(h):
            raise DimensionMismatch("normals (k, d) and offsets (k,) disagree")
        norms = np.linalg.norm(n, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            n = n / norms[:, None]
        object.__setattr__(self, "normals", n)
        object.__setattr__(self, "offsets", h)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @classmethod
    def from_dict(cls, data: dict) -> "HalfspaceRep":
        return cls(np.asarray(data["normals"], dtype=float), np.asarray(data["offsets"], dtype=float))

    def to_dict(self) -> dict:
        return {"normals": self.normals.tolist(), "offsets": self.offsets.tolist()}


def load_polytope(path) -> Polytope:
    with open(path) as fh:
        return Polytope.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# support function, volumes, facet data

def support(body: Polytope, u) -> np.ndarray | float:
    """Support function h(u) = max over vertices of <v, u>.

    Accepts a single direction or an array of directions (one per row).
    """
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        return float((body.vertices @ u).max())
    return K.support_max(body.vertices, u)


support_value = support


def facet_data(body: Polytope) -> list[tuple[np.ndarray, float]]:
    """Outward unit normal and (d-1)-area for each facet above the inactive threshold."""
    keep = body.facet_areas >= INACTIVE_AREA
    return [(n.copy(), float(a)) for n, a in zip(body.facet_normals[keep], body.facet_areas[keep])]


def volume_vertices(body: Polytope) -> float:
    """Volume by shoelace (2D) or tetrahedral fans about a vertex (3D)."""
    v = body.vertices
    if body.dim == 2:
        nxt = np.roll(v, -1, axis=0)
        return float(0.5 * (v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]).sum())
    o = v[0]
    total = 0.0
    for f in body.facets:
        p = v[f] - o
        a = p[0]
        b = p[1:-1]
        c = p[2:]
        total += float(np.einsum("j,ij->i", a, np.cross(b, c)).sum())
    return total / 6.0


def volume_integral(body: Polytope) -> float:
    """(1/d) sum_i h(n_i) area_i over the facets."""
    return float(body.facet_offsets @ body.facet_areas) / body.dim


def volume(body: Polytope) -> float:
    return volume_vertices(body)


def mixed_volume_v1(body: Polytope, other: Polytope) -> float:
    """First mixed volume V_1(body, other) = (1/d) sum_i h_other(n_i) area_i(body)."""
    if body.dim != other.dim:
        raise DimensionMismatch("bodies must share a dimension")
    return float(support(other, body.facet_normals) @ body.facet_areas) / body.dim


# ---------------------------------------------------------------------------
# halfspace intersection

def _check_spanning(normals: np.ndarray) -> None:
    d = normals.shape[1]
    if len(normals) <= d or np.linalg.matrix_rank(normals, tol=1e-10) < d:
        raise Unbounded("normals do not span the ambient space")
    # positive spanning <=> some strictly positive combination vanishes
    k = len(normals)
    res = linprog(np.zeros(k), A_eq=normals.T, b_eq=np.zeros(d),
                  bounds=[(1.0, None)] * k, method="highs")
    if res.status != 0:
        raise Unbounded("normals do not positively span the ambient space")


def chebyshev_center(normals: np.ndarray, offsets: np.ndarray) -> tuple[np.ndarray, float]:
    """Centre and radius of the largest ball inside {<x, n_i> <= h_i}."""
    k, d = normals.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    a_ub = np.hstack([normals, np.ones((k, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=offsets, bounds=[(None, None)] * d + [(0, None)],
                  method="highs")
    if res.status == 2:
        raise Empty("halfspaces have empty intersection")
    if res.status == 3:
        raise Unbounded("intersection is unbounded")
    if res.status != 0:
        raise Empty(f"Chebyshev LP failed: {res.message}")
    return res.x[:d], float(res.x[-1])


def _dedupe(points: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Merge points closer than ``tol``; returns (representatives, labels)."""
    n = len(points)
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in cKDTree(points).query_pairs(tol, p=np.inf, output_type="ndarray"):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(n)])
    uniq, labels = np.unique(roots, return_inverse=True)
    return points[uniq], labels


def dual_hull(normals: np.ndarray, offsets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Primal vertices of {<x, n_i> <= h_i} (all h_i > 0) from the dual hull.

    Returns ``(prim, simplices)``: one primal vertex per triangle (edge in
    2D) of the hull of the dual points ``n_i / h_i``, and that simplex's
    constraint indices. Non-simple vertices appear once per simplex.
    """
    d = normals.shape[1]
    if np.any(offsets <= 0):
        raise Empty("offsets must be positive about the interior point")
    try:
        hull = ConvexHull(normals / offsets[:, None])
    except QhullError as exc:
        raise Unbounded(f"dual hull failed: {exc}") from None
    eq = hull.equations
    if np.any(eq[:, -1] >= 0):
        raise Unbounded("origin is not interior to the dual hull")
    return eq[:, :d] / (-eq[:, -1])[:, None], hull.simplices


def facet_areas_centered(normals: np.ndarray, offsets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Primal vertices and per-constraint facet areas (3D, origin interior)."""
    prim, simp = dual_hull(normals, offsets)
    areas = K.facet_areas_3d(prim, simp, normals)
    areas[areas < INACTIVE_AREA] = 0.0
    return prim, areas


def intersect_centered(normals: np.ndarray, offsets: np.ndarray):
    """Intersect halfspaces whose offsets are all positive (origin inside).

    Returns ``(vertices, cycles, areas)`` where ``cycles[i]`` indexes the
    facet polygon of constraint ``i`` (empty when inactive) and ``areas[i]``
    its (d-1)-area. Inactive constraints have area 0.
    """
    k, d = normals.shape
    prim, simplices = dual_hull(normals, offsets)
    scale = float(np.abs(prim).max())
    verts, labels = _dedupe(prim, 1e-13 * scale)
    areas = np.zeros(k)
    cycles: list[np.ndarray] = [np.empty(0, dtype=np.int64) for _ in range(k)]
    incident: dict[int, list[int]] = {}
    for s, simp in enumerate(simplices):
        for i in simp:
            incident.setdefault(int(i), []).append(s)
    for i, simp in incident.items():
        ids = np.unique(labels[simp])
        if len(ids) < d:
            continue
        if d == 2:
            t = np.array([-normals[i, 1], normals[i, 0]])
            ids = ids[np.argsort(verts[ids] @ t)][[0, -1]]
            area = float(np.linalg.norm(verts[ids[1]] - verts[ids[0]]))
        else:
            e1, e2 = _plane_basis(normals[i])
            p = verts[ids] - verts[ids].mean(axis=0)
            ids = ids[np.argsort(np.arctan2(p @ e2, p @ e1))]
            area = 0.5 * float(_newell(verts[ids]) @ normals[i])
        if area >= INACTIVE_AREA:
            cycles[i] = ids
            areas[i] = area
    return verts, cycles, areas


def halfspace_intersection(rep: HalfspaceRep) -> Polytope:
    """Polytope {x : <x, n_i> <= h_i}, via the dual convex hull.

    Raises
    ------
    Unbounded
        The normals do not positively span the ambient space.
    Empty
        The offsets are infeasible or leave no interior.
    """
    normals, offsets = rep.normals, rep.offsets
    _check_spanning(normals)
    c, r = chebyshev_center(normals, offsets)
    scale = max(float(np.abs(offsets).max()), float(np.abs(c).max()), 1e-300)
    if r <= 1e-12 * scale:
        raise Empty("intersection has empty interior")
    verts, cycles, areas = intersect_centered(normals, offsets - normals @ c)
    used = sorted({int(j) for cyc in cycles for j in cyc})
    return Polytope.from_points(verts[used] + c)


def active_constraints(rep: HalfspaceRep, body: Polytope, atol: float = 1e-9) -> np.ndarray:
    """Mask of constraints that support a facet of ``body``."""
    s = support(body, rep.normals)
    scale = max(body.radius, 1.0)
    mask = np.abs(s - rep.offsets) <= atol * scale
    out = np.zeros(len(rep.offsets), dtype=bool)
    for i in np.nonzero(mask)[0]:
        out[i] = np.any(body.facet_normals @ rep.normals[i] > 1 - 1e-9)
    return out


# ---------------------------------------------------------------------------
# Hausdorff distance

def _closest_on_polygon(points: np.ndarray, body: Polytope) -> np.ndarray:
    v = body.vertices
    a = v
    b = np.roll(v, -1, axis=0)
    ab = b - a
    ap = points[:, None, :] - a[None, :, :]
    t = np.clip((ap * ab[None]).sum(axis=2) / (ab * ab).sum(axis=1)[None], 0.0, 1.0)
    proj = a[None] + t[..., None] * ab[None]
    dist = ((points[:, None, :] - proj) ** 2).sum(axis=2)
    j = np.argmin(dist, axis=1)
    return proj[np.arange(len(points)), j]


def _closest_on_triangles(p: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray):
    """Closest points from each p to each triangle (a, b, c); returns (P, T, 3)."""
    p = p[:, None, :]
    ab, ac = (b - a)[None], (c - a)[None]
    ap = p - a[None]
    d1 = (ab * ap).sum(-1)
    d2 = (ac * ap).sum(-1)
    bp = p - b[None]
    d3 = (ab * bp).sum(-1)
    d4 = (ac * bp).sum(-1)
    cp = p - c[None]
    d5 = (ab * cp).sum(-1)
    d6 = (ac * cp).sum(-1)
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = va + vb + vc
        v = vb / denom
        w = vc / denom
        out = a[None] + ab * v[..., None] + ac * w[..., None]
        # edge regions
        t_ab = np.clip(d1 / (d1 - d3), 0, 1)
        t_ac = np.clip(d2 / (d2 - d6), 0, 1)
        t_bc = np.clip((d4 - d3) / ((d4 - d3) + (d5 - d6)), 0, 1)
    m_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    m_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    m_bc = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
    out = np.where(m_bc[..., None], b[None] + (c - b)[None] * t_bc[..., None], out)
    out = np.where(m_ac[..., None], a[None] + ac * t_ac[..., None], out)
    out = np.where(m_ab[..., None], a[None] + ab * t_ab[..., None], out)
    m_a = (d1 <= 0) & (d2 <= 0)
    m_b = (d3 >= 0) & (d4 <= d3)
    m_c = (d6 >= 0) & (d5 <= d6)
    out = np.where(m_a[..., None], np.broadcast_to(a[None], out.shape), out)
    out = np.where(m_b[..., None], np.broadcast_to(b[None], out.shape), out)
    out = np.where(m_c[..., None], np.broadcast_to(c[None], out.shape), out)
    return out


def _closest_on_polyhedron(points: np.ndarray, body: Polytope) -> np.ndarray:
    v = body.vertices
    tris = np.array([(f[0], f[k], f[k + 1]) for f in body.facets for k in range(1, len(f) - 1)])
    a, b, c = v[tris[:, 0]], v[tris[:, 1]], v[tris[:, 2]]
    out = np.empty_like(points)
    for s in range(0, len(points), 256):
        q = _closest_on_triangles(points[s:s + 256], a, b, c)
        dist = ((q - points[s:s + 256, None, :]) ** 2).sum(-1)
        j = np.argmin(dist, axis=1)
        out[s:s + 256] = q[np.arange(len(q)), j]
    return out


def _vertex_witness_dirs(src: Polytope, dst: Polytope) -> np.ndarray:
    """Directions from the projection onto ``dst`` to each outside vertex of ``src``."""
    pts = src.vertices
    s = pts @ dst.facet_normals.T - dst.facet_offsets[None]
    outside = s.max(axis=1) > 0
    if not np.any(outside):
        return np.empty((0, src.dim))
    p = pts[outside]
    q = _closest_on_polygon(p, dst) if src.dim == 2 else _closest_on_polyhedron(p, dst)
    d = p - q
    n = np.linalg.norm(d, axis=1)
    ok = n > 0
    return d[ok] / n[ok, None]


def _candidate_dirs(a: Polytope, b: Polytope, net: np.ndarray) -> np.ndarray:
    parts = [a.facet_normals, b.facet_normals, net,
             _vertex_witness_dirs(a, b), _vertex_witness_dirs(b, a)]
    return np.vstack([p for p in parts if len(p)])


def _abs_gap(a: Polytope, b: Polytope, dirs: np.ndarray) -> np.ndarray:
    return np.abs(support(a, dirs) - support(b, dirs))


def _refine_2d(a: Polytope, b: Polytope, theta: float, width: float, tol: float = 1e-7):
    def f(t):
        u = np.array([[np.cos(t), np.sin(t)]])
        return float(_abs_gap(a, b, u)[0])

    g = (np.sqrt(5.0) - 1.0) / 2.0
    lo, hi = theta - width, theta + width
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    best = max(f(theta), f1, f2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
        best = max(best, f1, f2)
    return best


def _refine_3d(a: Polytope, b: Polytope, u: np.ndarray, step: float, tol: float = 1e-7):
    e1, e2 = _plane_basis(u)
    best = float(_abs_gap(a, b, u[None])[0])
    while step > tol:
        ang = np.linspace(0, 2 * np.pi, 8, endpoint=False)
        cand = u[None] + step * (np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2)
        cand /= np.linalg.norm(cand, axis=1)[:, None]
        vals = _abs_gap(a, b, cand)
        j = int(np.argmax(vals))
        if vals[j] > best:
            best = float(vals[j])
            u = cand[j]
            e1, e2 = _plane_basis(u)
        else:
            step *= 0.5
    return best


def hausdorff(a: Polytope, b: Polytope, refine: bool = True) -> float:
    """Hausdorff distance sup_u |h_a(u) - h_b(u)| between convex polytopes.

    The supremum is taken over facet normals of both bodies, the directions
    from each outside vertex to its projection on the other body (where the
    supremum is attained), and a uniform direction net; the best net
    candidates are then refined locally.
    """
    if a.dim != b.dim:
        raise DimensionMismatch("bodies must share a dimension")
    net = sphere_net(a.dim, "fine")
    dirs = _candidate_dirs(a, b, net)
    vals = _abs_gap(a, b, dirs)
    best = float(vals.max())
    if not refine:
        return best
    top = np.argsort(vals)[-3:]
    for j in top:
        u = dirs[j]
        if a.dim == 2:
            best = max(best, _refine_2d(a, b, float(np.arctan2(u[1], u[0])), 2 * np.pi / len(net)))
        else:
            best = max(best, _refine_3d(a, b, u, 0.02))
    return best


def min_translate_hausdorff(a: Polytope, b: Polytope, max_rounds: int = 12) -> tuple[float, np.ndarray]:
    """min over x of d_H(a + x, b) and the minimizing translation.

    A Chebyshev linear program over a candidate direction set is solved in
    rounds; each round re-verifies with :func:`hausdorff` and adds the
    witness directions of the verified translate. The verified value is
    returned.
    """
    if a.dim != b.dim:
        raise DimensionMismatch("bodies must share a dimension")
    d = a.dim
    x0 = b.centroid - a.centroid
    scale = max(a.diameter, b.diameter)
    best_x = x0
    best_val = hausdorff(a.translate(x0), b)
    if best_val <= 1e-15 * scale:
        return best_val, best_x
    dirs = np.vstack([a.facet_normals, b.facet_normals, sphere_net(d, "coarse")])
    shifted = a.translate(x0)
    dirs = np.vstack([dirs, _vertex_witness_dirs(shifted, b), _vertex_witness_dirs(b, shifted)])
    for _ in range(max_rounds):
        # residual r(u) = h_b(u) - h_a(u) - <x0, u>, in units of ``scale``
        r = (support(b, dirs) - support(a, dirs) - dirs @ x0) / scale
        k = len(dirs)
        a_ub = np.vstack([np.hstack([dirs, -np.ones((k, 1))]),
                          np.hstack([-dirs, -np.ones((k, 1))])])
        b_ub = np.concatenate([r, -r])
        c = np.zeros(d + 1)
        c[-1] = 1.0
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * (d + 1),
                      method="highs", options=_HIGHS)
        if res.status != 0:
            break
        x = x0 + res.x[:d] * scale
        lp_val = res.x[-1] * scale
        moved = a.translate(x)
        val = hausdorff(moved, b)
        if val < best_val:
            best_val, best_x = val, x
        if val - lp_val <= 1e-10 * scale:
            break
        extra = [_vertex_witness_dirs(moved, b), _vertex_witness_dirs(b, moved)]
        extra = [e for e in extra if len(e)]
        if not extra:
            break
        dirs = np.vstack([dirs] + extra)
    return best_val, np.asarray(best_x)


# ---------------------------------------------------------------------------
# named and random bodies

def square(side: float = 1.0, center=(0.5, 0.5)) -> Polytope:
    c = np.asarray(center, dtype=float)
    h = side / 2.0
    return Polytope(np.array([[-h, -h], [h, -h], [h, h], [-h, h]]) + c)


def box(lo, hi) -> Polytope:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if len(lo) == 2:
        return Polytope(np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]))
    corners = np.array([[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])])
    return Polytope.from_points(corners)


def cube(side: float = 1.0) -> Polytope:
    return box([0, 0, 0], [side] * 3)


def ngon(n: int, radius: float = 1.0) -> Polytope:
    return Polytope(radius * circle_net(n))


def tetrahedron() -> Polytope:
    """Regular tetrahedron with vertices on the unit sphere."""
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)
    return Polytope.from_points(v)


def icosphere_body(level: int) -> Polytope:
    return Polytope.from_points(icosphere(level)[0])


def named_body(name: str) -> Polytope:
    """Built-in bodies: square, cube, tetrahedron, ngon:K, icosphere:L."""
    kind, _, arg = name.partition(":")
    if kind == "square":
        return square()
    if kind == "cube":
        return cube()
    if kind == "tetrahedron":
        return tetrahedron()
    if kind == "ngon":
        return ngon(int(arg or 64))
    if kind == "icosphere":
        return icosphere_body(int(arg or 2))
    raise ValueError(f"unknown body {name!r}")


def random_polygon(rng: np.random.Generator, n_min: int = 5, n_max: int = 50,
                   r_min: float = 0.1, r_max: float = 10.0) -> Polytope:
    """Convex polygon with vertices at random angles on a circle of random radius."""
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        r = float(np.exp(rng.uniform(np.log(r_min), np.log(r_max))))
        theta = np.sort(rng.uniform(0, 2 * np.pi, n))
        gaps = np.diff(np.concatenate([theta, theta[:1] + 2 * np.pi]))
        if gaps.min() < 1e-3 or gaps.max() >= np.pi - 1e-3:
            continue
        pts = r * np.column_stack([np.cos(theta), np.sin(theta)])
        p = Polytope.from_points(pts)
        if len(p.vertices) == n:
            return p


def random_polytope(rng: np.random.Generator, dim: int, k_min: int = 6, k_max: int = 30,
                    min_area_frac: float = 1e-3) -> Polytope:
    """Random intersection of halfspaces with ``k_min``..``k_max`` active facets.

    Bodies whose smallest facet carries less than ``min_area_frac`` of the
    total boundary measure are redrawn.
    """
    while True:
        k = int(rng.integers(k_min, k_max + 1))
        n = rng.normal(size=(k, dim))
        n /= np.linalg.norm(n, axis=1)[:, None]
        h = rng.uniform(0.6, 1.4, size=k)
        try:
            p = halfspace_intersection(HalfspaceRep(n, h))
        except (Unbounded, Empty):
            continue
        a = p.facet_areas
        if k_min <= len(a) <= k_max and a.min() >= min_area_frac * a.sum():
            return p
