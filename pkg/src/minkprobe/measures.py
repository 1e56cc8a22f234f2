"""Finite atomic measures on the unit sphere.

Surface area measures of polytopes, empirical measures of sampled normals,
their summaries (mass, mean, weak rotundity) and the two zero-mean
projections used before reconstruction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import _kernels as K
from .errors import DegenerateSupport, DimensionMismatch, EmptyInput, NotProbability
from .geometry import INACTIVE_AREA, Polytope, _plane_basis
from .nets import circle_net, icosphere, icosphere_spacing

MERGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteSphericalMeasure:
    """Weighted Dirac atoms ``sum_i w_i delta_{n_i}`` on S^{d-1}.

    Zero-weight atoms are dropped on construction; negative weights are an
    error.
    """

    directions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        n = np.array(self.directions, dtype=float)
        w = np.array(self.weights, dtype=float).ravel()
        if n.ndim != 2 or n.shape[1] not in (2, 3) or len(n) != len(w):
            raise DimensionMismatch(f"directions {n.shape} and weights {w.shape} disagree")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        norms = np.linalg.norm(n, axis=1)
        if np.any(norms == 0):
            raise ValueError("zero direction")
        bad = np.abs(norms - 1.0) > 1e-12
        if np.any(bad):
            n[bad] /= norms[bad, None]
        keep = w > 0
        n, w = n[keep], w[keep]
        n.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "directions", n)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def mean(self) -> np.ndarray:
        return self.weights @ self.directions

    def scaled(self, s: float) -> "DiscreteSphericalMeasure":
        return DiscreteSphericalMeasure(self.directions, self.weights * float(s))

    def canonicalize(self, tol: float = MERGE_TOL) -> "DiscreteSphericalMeasure":
        """Merge atoms whose directions differ by less than ``tol``."""
        if len(self) == 0:
            return self
        labels = _cluster(self.directions, tol)
        k = labels.max() + 1
        w = np.bincount(labels, weights=self.weights, minlength=k)
        first = np.full(k, -1)
        for i, lab in enumerate(labels):
            if first[lab] < 0:
                first[lab] = i
        return DiscreteSphericalMeasure(self.directions[first], w)

    # -- JSON -------------------------------------------------------------
    def to_dict(self) -> dict:
        return {"dim": self.dim,
                "atoms": [{"n": n.tolist(), "w": float(w)}
                          for n, w in zip(self.directions, self.weights)]}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteSphericalMeasure":
        dim = int(data["dim"])
        atoms = data["atoms"]
        if not atoms:
            return cls(np.empty((0, dim)), np.empty(0))
        n = np.array([a["n"] for a in atoms], dtype=float).reshape(-1, dim)
        w = np.array([a["w"] for a in atoms], dtype=float)
        return cls(n, w)


def load_measure(path) -> DiscreteSphericalMeasure:
    with open(path) as fh:
        return DiscreteSphericalMeasure.from_dict(json.load(fh))


def _cluster(points: np.ndarray, tol: float) -> np.ndarray:
    """Labels grouping points within ``tol`` (sup-norm, transitive)."""
    from scipy.spatial import cKDTree

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
    return np.unique(roots, return_inverse=True)[1]


def uniform_measure(dim: int, mass: float = 1.0) -> DiscreteSphericalMeasure:
    """Equal-weight atoms on the 4096-point circle or the 10242-point icosphere."""
    n = circle_net(4096) if dim == 2 else icosphere(5)[0]
    return DiscreteSphericalMeasure(n, np.full(len(n), mass / len(n)))


# ---------------------------------------------------------------------------

def surface_area_measure(body: Polytope) -> DiscreteSphericalMeasure:
    """Facet normals weighted by facet areas."""
    keep = body.facet_areas >= INACTIVE_AREA
    return DiscreteSphericalMeasure(body.facet_normals[keep], body.facet_areas[keep])


@dataclass(frozen=True)
class MeasureSummary:
    total_mass: float
    mean: np.ndarray
    rotundity: float
    rotundity_tol: float
    minimizer: np.ndarray

    def to_dict(self) -> dict:
        return {"total_mass": self.total_mass, "mean": self.mean.tolist(),
                "rotundity": self.rotundity, "rotundity_tol": self.rotundity_tol}


def rotundity_objective(mu: DiscreteSphericalMeasure, y) -> np.ndarray:
    """f(y) = sum_i w_i max(<y, n_i>, 0), one value per row of ``y``."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    return K.hinge_sums(y, mu.directions, mu.weights)


def rotundity(mu: DiscreteSphericalMeasure) -> tuple[float, float, np.ndarray]:
    """Weak rotundity min_y f(y) with its tolerance and minimizing direction.

    In 2D the minimum is exact: f is a sinusoid between consecutive
    breakpoints, so it suffices to check breakpoints and interior minima.
    In 3D an icosphere net (level 5) is refined by local pattern search; the
    tolerance is ``2 * spacing * mass`` since f is mass-Lipschitz.
    """
    if len(mu) == 0:
        raise EmptyInput("empty measure")
    if mu.dim == 2:
        val, theta = K.rotundity_2d(mu.directions, mu.weights)
        return val, 1e-12 * mu.mass, np.array([np.cos(theta), np.sin(theta)])
    net = icosphere(5)[0]
    f = rotundity_objective(mu, net)
    best_val = float(f.min())
    best_y = net[int(np.argmin(f))]
    for j in np.argsort(f, kind="stable")[:4]:
        y, v = _descend(mu, net[j], float(f[j]))
        if v < best_val:
            best_val, best_y = v, y
    return best_val, 2.0 * icosphere_spacing(5) * mu.mass, best_y


def _descend(mu, y, val, step=0.02, tol=1e-9):
    e1, e2 = _plane_basis(y)
    ang = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    while step > tol:
        cand = y[None] + step * (np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2)
        cand /= np.linalg.norm(cand, axis=1)[:, None]
        vals = rotundity_objective(mu, cand)
        j = int(np.argmin(vals))
        if vals[j] < val:
            y, val = cand[j], float(vals[j])
            e1, e2 = _plane_basis(y)
        else:
            step *= 0.5
    return y, val


def summarize(mu: DiscreteSphericalMeasure) -> MeasureSummary:
    rot, tol, y = rotundity(mu)
    return MeasureSummary(mu.mass, mu.mean, rot, tol, y)


# ---------------------------------------------------------------------------
# sampling

def _uniform_ball(rng: np.random.Generator, n: int, dim: int, radius: float) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    g /= np.linalg.norm(g, axis=1)[:, None]
    r = radius * rng.random(n) ** (1.0 / dim)
    return g * r[:, None]


def sample_normals(body: Polytope, n: int, seed=0, noise_radius: float = 0.0) -> np.ndarray:
    """Draw ``n`` outer normals at area-uniform random points of the boundary.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``. With
    ``noise_radius > 0`` each normal is perturbed by a uniform vector of the
    ball of that radius and renormalized.
    """
    if noise_radius < 0:
        raise ValueError("noise_radius must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mu = surface_area_measure(body)
    if n <= 0:
        return np.empty((0, body.dim))
    idx = rng.choice(len(mu), size=int(n), p=mu.weights / mu.mass)
    out = mu.directions[idx].copy()
    if noise_radius > 0:
        out += _uniform_ball(rng, len(out), body.dim, noise_radius)
        out /= np.linalg.norm(out, axis=1)[:, None]
    return out


def empirical_measure(normals) -> DiscreteSphericalMeasure:
    """(1/N) sum_i delta_{n_i}; exactly repeated directions are merged."""
    x = np.asarray(normals, dtype=float)
    if x.ndim != 2 or len(x) == 0:
        raise EmptyInput("no normals given")
    uniq, counts = np.unique(x, axis=0, return_counts=True)
    return DiscreteSphericalMeasure(uniq, counts / len(x))


# ---------------------------------------------------------------------------
# zero-mean projections

def zero_mean_project_radial(nu: DiscreteSphericalMeasure) -> DiscreteSphericalMeasure:
    """Re-centre the atoms at the mean and re-weight by their distance to it.

    Atom x_i with weight w_i becomes (x_i - m)/|x_i - m| with weight
    lam * |x_i - m| * w_i where lam normalizes the total mass to one. A point
    mass (|m| = 1) is replaced by the discretized uniform measure.
    """
    if len(nu) == 0:
        raise EmptyInput("empty measure")
    if abs(nu.mass - 1.0) > 1e-12:
        raise NotProbability(f"total mass {nu.mass!r} is not 1")
    m = nu.mean
    if np.linalg.norm(m) >= 1.0 - 1e-12:
        return uniform_measure(nu.dim)
    diff = nu.directions - m
    a = np.linalg.norm(diff, axis=1)
    lam = 1.0 / float(nu.weights @ a)
    return DiscreteSphericalMeasure(diff / a[:, None], lam * a * nu.weights)


def _polish_mean(dirs: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimal-norm correction of the positive weights so the mean vanishes."""
    for _ in range(3):
        r = b @ dirs
        s = b > 0
        if np.abs(r).max() == 0 or not np.any(s):
            break
        delta = np.linalg.lstsq(dirs[s].T, -r, rcond=None)[0]
        cand = b.copy()
        cand[s] += delta
        if np.any(cand[s] < 0):
            break
        b = cand
    return b


def zero_mean_project_tv(nu: DiscreteSphericalMeasure) -> tuple[DiscreteSphericalMeasure, float]:
    """Closest zero-mean measure on the same atoms in total variation.

    Solves min sum_i |w_i - b_i| subject to sum_i b_i n_i = 0, b >= 0, as a
    linear program with the absolute values split into positive and
    negative parts. Returns the projected measure and the optimal objective.
    """
    if len(nu) == 0:
        raise EmptyInput("empty measure")
    dirs, w = nu.directions, nu.weights
    k, d = dirs.shape
    # variables [b (k), p (k), q (k)] with w - b = p - q
    c = np.concatenate([np.zeros(k), np.ones(2 * k)])
    eye = np.eye(k)
    a_eq = np.vstack([np.hstack([dirs.T, np.zeros((d, 2 * k))]),
                      np.hstack([eye, eye, -eye])])
    b_eq = np.concatenate([np.zeros(d), w])
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * (3 * k), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise DegenerateSupport(f"TV projection failed: {res.message}")
    b = np.where(res.x[:k] > 1e-15 * nu.mass, res.x[:k], 0.0)
    if b.sum() <= 1e-12 * nu.mass:
        raise DegenerateSupport("atoms lie in an open halfspace; only the zero measure has zero mean")
    b = _polish_mean(dirs, b)
    return DiscreteSphericalMeasure(dirs, b), float(np.abs(w - b).sum())
