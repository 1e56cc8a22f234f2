"""Discrete Minkowski problem: a polytope with prescribed facet normals and areas.

In the plane the polygon is built exactly by chaining edges in angular
order. In space the support offsets ``h`` are found by maximizing
``Vol(P(h))`` on the hyperplane ``sum_i w_i h_i = d``; at a critical point
the facet areas are proportional to the weights.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSupport, DimensionMismatch, Empty, EmptyMeasure, NotZeroMean, Unbounded
from .geometry import Polytope, facet_areas_centered
from .measures import DiscreteSphericalMeasure

log = logging.getLogger(__name__)

MATCH_ANGLE = 1e-6
LOGVOL_NOISE = 1e-14


@dataclass
class ReconstructionReport:
    body: Polytope
    area_residual_linf: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {"body": self.body.to_dict(), "residual": self.area_residual_linf,
                "iterations": self.iterations, "converged": self.converged}


def verify_reconstruction(mu: DiscreteSphericalMeasure, body: Polytope) -> float:
    """Largest relative mismatch between facet areas of ``body`` and atoms of ``mu``.

    Each facet is matched to the nearest atom within 1e-6 radians; facets of
    the same atom pool their areas. Unmatched atoms and unmatched facets
    count as a relative residual of 1.
    """
    if mu.dim != body.dim:
        raise DimensionMismatch(f"measure is {mu.dim}D but body is {body.dim}D")
    n, a = body.facet_normals, body.facet_areas
    cos = np.clip(n @ mu.directions.T, -1.0, 1.0)
    j = np.argmax(cos, axis=1)
    ang = np.arccos(cos[np.arange(len(n)), j])
    matched = ang <= MATCH_ANGLE
    got = np.bincount(j[matched], weights=a[matched], minlength=len(mu))
    rel = np.abs(got - mu.weights) / np.maximum(mu.weights, 1e-300)
    res = float(rel.max()) if len(rel) else 0.0
    if not np.all(matched):
        res = max(res, 1.0)
    return res


def _check_input(mu: DiscreteSphericalMeasure, dim: int, mean_tol: float) -> None:
    if mu.dim != dim:
        raise DimensionMismatch(f"expected a {dim}D measure")
    if len(mu) == 0:
        raise EmptyMeasure("measure has no atoms")
    if np.linalg.norm(mu.mean) > mean_tol * mu.mass:
        raise NotZeroMean(f"|mean| = {np.linalg.norm(mu.mean):.3e} exceeds {mean_tol:g} * mass")


def reconstruct_2d(mu: DiscreteSphericalMeasure) -> ReconstructionReport:
    """Polygon whose edge lengths and outer normals are the atoms of ``mu``.

    Edges of length w_i and direction n_i rotated by +90 degrees are chained
    in angular order from the origin; the closure defect (at most 1e-9 of
    the mass) is spread evenly over the vertices.
    """
    mu = mu.canonicalize()
    _check_input(mu, 2, 1e-9)
    ang = np.arctan2(mu.directions[:, 1], mu.directions[:, 0])
    order = np.argsort(ang, kind="stable")
    srt = np.sort(ang)
    gaps = np.diff(np.concatenate([srt, srt[:1] + 2 * np.pi]))
    if len(mu) < 3 or gaps.max() >= np.pi - 1e-12:
        raise DegenerateSupport("normals lie in a closed half-plane")
    n = mu.directions[order]
    edges = mu.weights[order, None] * np.column_stack([-n[:, 1], n[:, 0]])
    verts = np.vstack([np.zeros(2), np.cumsum(edges, axis=0)[:-1]])
    gap = edges.sum(axis=0)
    verts -= np.arange(len(verts))[:, None] / len(verts) * gap
    body = Polytope(verts)
    return ReconstructionReport(body, verify_reconstruction(mu, body), 0, True)


def _state(normals, h):
    verts, areas = facet_areas_centered(normals, h)
    vol = float(h @ areas) / normals.shape[1]
    return verts, areas, vol


def _lbfgs_direction(g, pairs):
    """Two-loop recursion for ascent on a concave function (``y = -(g_new - g)``)."""
    q = -g.copy()
    coeffs = []
    for sv, yv in reversed(pairs):
        a = (sv @ q) / (yv @ sv)
        coeffs.append(a)
        q -= a * yv
    sv, yv = pairs[-1]
    q *= (sv @ yv) / (yv @ yv)
    for (sv, yv), a in zip(pairs, reversed(coeffs)):
        b = (yv @ q) / (yv @ sv)
        q += (a - b) * sv
    return -q


def reconstruct_3d(mu: DiscreteSphericalMeasure, tol: float = 1e-6, max_iter: int = 10_000,
                   memory: int = 10, keep_history: bool = False) -> ReconstructionReport:
    """Polyhedron whose facet areas match ``mu``.

    Maximizes ``log Vol(P(h))`` over the hyperplane ``sum_i w_i h_i = d``,
    where it is concave. The volume gradient is the vector of facet areas,
    projected onto the hyperplane; search directions come from a limited
    memory (L-BFGS) model built from those projected gradients, falling back
    to the projected gradient itself. Step lengths use Armijo backtracking
    (initial step 1, factor 0.5, at most 60 halvings), so the volume never
    decreases. After each accepted step the body is re-centred on the mean
    of its vertices so every offset stays positive. The final body is scaled
    by ``t^(-1/(d-1))`` where ``A = t w`` at the optimum.
    """
    mu = mu.canonicalize(1e-9)
    _check_input(mu, 3, 1e-7)
    normals, w = mu.directions, mu.weights
    d = 3
    if len(mu) < 4 or np.linalg.matrix_rank(normals, tol=1e-9) < d:
        raise DegenerateSupport("normals do not span R^3")
    ww = float(w @ w)

    def project(v):
        return v - (w @ v) / ww * w

    h = np.ones(len(w))
    h *= d / float(w @ h)
    try:
        verts, areas, vol = _state(normals, h)
    except (Unbounded, Empty) as exc:
        raise DegenerateSupport(f"normals do not positively span R^3: {exc}") from None
    f = np.log(vol)
    g = project(areas / vol)
    history = [vol] if keep_history else []
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    it = 0
    converged = False
    for it in range(max_iter + 1):
        t = areas.sum() / w.sum()
        resid = float(np.abs(areas / (t * w) - 1.0).max())
        if resid <= tol:
            converged = True
            break
        if it == max_iter:
            break
        direction = project(_lbfgs_direction(g, pairs)) if pairs else g
        slope = float(g @ direction)
        if slope <= 0:
            pairs.clear()
            direction, slope = g, float(g @ g)
        alpha = 1.0
        accepted = False
        for _ in range(61):
            cand = h + alpha * direction
            if np.all(cand > 0):
                try:
                    c_state = _state(normals, cand)
                except (Unbounded, Empty):
                    c_state = None
                if c_state is not None and c_state[2] > 0:
                    cf = np.log(c_state[2])
                    # log-volume is only known to ~1e-15; steps inside that noise still count
                    if cf >= f + 1e-4 * alpha * slope - LOGVOL_NOISE:
                        accepted = True
                        break
            alpha *= 0.5
        if not accepted:
            log.debug("line search stalled at iteration %d (residual %.3e)", it, resid)
            break
        verts, areas, vol = c_state
        g_new = project(areas / vol)
        sv, yv = cand - h, g - g_new
        if sv @ yv > 1e-12 * np.sqrt((sv @ sv) * (yv @ yv)):
            pairs.append((sv, yv))
            if len(pairs) > memory:
                pairs.pop(0)
        f, g = cf, g_new
        centre = verts.mean(axis=0)
        h = cand - normals @ centre
        verts = verts - centre
        # a closure defect makes the shift leave the hyperplane; step back onto it
        h = h + (d - float(w @ h)) / ww * w
        if keep_history:
            history.append(vol)
    t = areas.sum() / w.sum()
    body = Polytope.from_points(verts * t ** (-1.0 / (d - 1)))
    resid = verify_reconstruction(mu, body)
    return ReconstructionReport(body, resid, it, converged and resid <= tol, history)


def reconstruct(mu: DiscreteSphericalMeasure, tol: float = 1e-6, **kw) -> ReconstructionReport:
    """Dispatch on dimension."""
    if mu.dim == 2:
        return reconstruct_2d(mu)
    return reconstruct_3d(mu, tol=tol, **kw)
