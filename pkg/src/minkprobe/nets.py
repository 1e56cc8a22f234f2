"""Deterministic direction nets on S^1 and S^2."""
from functools import lru_cache

import numpy as np


def circle_net(n: int, offset: float = 0.0) -> np.ndarray:
    """Return ``n`` equally spaced unit vectors in the plane, shape (n, 2)."""
    theta = offset + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(theta), np.sin(theta)])


@lru_cache(maxsize=None)
def _icosphere(level: int):
    t = (1.0 + 5.0 ** 0.5) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    pts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        cache = {}

        def midpoint(a, b):
            key = (a, b) if a < b else (b, a)
            idx = cache.get(key)
            if idx is None:
                m = pts[a] + pts[b]
                pts.append(m / np.linalg.norm(m))
                idx = cache[key] = len(pts) - 1
            return idx

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    v = np.array(pts)
    f = np.array(faces, dtype=np.int64)
    v.setflags(write=False)
    f.setflags(write=False)
    return v, f


def icosphere(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertices (unit vectors) and triangles of a subdivided icosahedron.

    Level 3, 4 and 5 give 642, 2562 and 10242 vertices.
    """
    return _icosphere(int(level))


@lru_cache(maxsize=None)
def icosphere_spacing(level: int) -> float:
    """Largest chordal edge length of the level-``level`` icosphere.

    Every point of the sphere lies within this chordal distance of a net
    vertex, so it bounds the covering radius of the net.
    """
    v, f = icosphere(level)
    e = np.concatenate([v[f[:, 0]] - v[f[:, 1]], v[f[:, 1]] - v[f[:, 2]],
                        v[f[:, 2]] - v[f[:, 0]]])
    return float(np.sqrt((e * e).sum(axis=1)).max())


def sphere_net(dim: int, size: str = "fine") -> np.ndarray:
    """Default direction net for ``dim`` with a named density."""
    if dim == 2:
        return circle_net({"coarse": 256, "probe": 1024, "fine": 4096}[size])
    if dim == 3:
        return icosphere({"coarse": 3, "probe": 4, "fine": 5}[size])[0]
    raise ValueError(f"unsupported dimension {dim}")
