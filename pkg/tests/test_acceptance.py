"""Acceptance suite: one pass/fail line per criterion, tolerances pinned below.

Each test writes its verdict line straight to the terminal, so the lines
appear under plain ``pytest`` as well as with ``-s``. Independent oracles
come from ``oracles.py`` and from scipy.
"""
import math
import time

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from conftest import random_measure
from oracles import tv_projection_grid, tv_projection_vertices
from minkprobe.distances import bronshtein_net, d_bl, d_c_lower, d_c_sandwich, d_tv
from minkprobe.errors import DegenerateSupport
from minkprobe.experiments import (ExperimentConfig, devroye_bound, records_csv, run_trials,
                                   scaling_study, tail_study)
from minkprobe.geometry import (min_translate_hausdorff, mixed_volume_v1, random_polygon,
                                random_polytope)
from minkprobe.measures import (DiscreteSphericalMeasure, surface_area_measure,
                                zero_mean_project_radial, zero_mean_project_tv)
from minkprobe.minkowski import reconstruct_2d, reconstruct_3d

pytestmark = pytest.mark.slow

# pinned tolerances and budgets
C1_ETA_REL, C1_SECONDS = 1e-8, 10.0
C2_RESIDUAL, C2_ETA_REL, C2_SECONDS = 1e-6, 1e-3, 300.0
C3_SLACK, C3_EQ_REL = -1e-9, 1e-9
C4_TOL = 1e-9
C5_RADIAL_MEAN, C5_DC_TOL, C5_TV_MEAN, C5_AGREE, C5_GRID = 1e-12, 1e-9, 1e-10, 2e-3, 1e-3
C6_SLOPE, C6_SECONDS = (-0.7, -0.3), 600.0
C7_SIGMAS, C7_SECONDS = 3.0, 120.0
C8_MIN_CONVERGED, C8_MEDIAN_ETA = 18, 0.5
C9_WORKERS = (1, 4, 8)

SEED = 20240601


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, text: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {text}", flush=True)
        assert ok, f"criterion {n}: {text}"
    return emit


# -- 1. 2D round trip ----------------------------------------------------------------

def test_criterion_1_polygon_round_trip(report):
    rng = np.random.default_rng(SEED + 1)
    polys = [random_polygon(rng, 5, 50, 0.1, 10.0) for _ in range(200)]
    t0 = time.perf_counter()
    worst = 0.0
    for p in polys:
        r = reconstruct_2d(surface_area_measure(p))
        worst = max(worst, min_translate_hausdorff(p, r.body)[0] / p.diameter)
    dt = time.perf_counter() - t0
    report(1, worst <= C1_ETA_REL and dt < C1_SECONDS,
           f"max eta/diam = {worst:.2e} (<= {C1_ETA_REL:g}), {dt:.1f} s (< {C1_SECONDS:g} s)")


# -- 2. 3D round trip ----------------------------------------------------------------

def test_criterion_2_polytope_round_trip(report):
    rng = np.random.default_rng(SEED + 2)
    bodies = [random_polytope(rng, 3, 6, 30) for _ in range(50)]
    t0 = time.perf_counter()
    res, eta = [], []
    for p in bodies:
        r = reconstruct_3d(surface_area_measure(p), tol=C2_RESIDUAL)
        res.append(r.area_residual_linf)
        eta.append(min_translate_hausdorff(p, r.body)[0] / p.diameter)
    dt = time.perf_counter() - t0
    ok = max(res) <= C2_RESIDUAL and max(eta) <= C2_ETA_REL and dt < C2_SECONDS
    report(2, ok, f"max residual = {max(res):.2e} (<= {C2_RESIDUAL:g}), max eta/diam = "
                  f"{max(eta):.2e} (<= {C2_ETA_REL:g}), {dt:.1f} s (< {C2_SECONDS:g} s)")


# -- 3. Minkowski inequality ---------------------------------------------------------

def test_criterion_3_minkowski_inequality(report):
    rng = np.random.default_rng(SEED + 3)
    worst, worst_eq = math.inf, 0.0
    for dim in (2, 3):
        for _ in range(200):
            k, l = random_polytope(rng, dim), random_polytope(rng, dim)
            # volumes from qhull, independent of the library's formulas
            vk, vl = ConvexHull(k.vertices).volume, ConvexHull(l.vertices).volume
            worst = min(worst, mixed_volume_v1(k, l) ** dim - vk ** (dim - 1) * vl)
            eq = mixed_volume_v1(k, k.translate(rng.normal(size=dim) * 3)) ** dim
            worst_eq = max(worst_eq, abs(eq - vk ** dim) / vk ** dim)
    report(3, worst >= C3_SLACK and worst_eq <= C3_EQ_REL,
           f"min slack = {worst:.2e} (>= {C3_SLACK:g}), translate equality rel err = "
           f"{worst_eq:.2e} (<= {C3_EQ_REL:g}); 200 pairs in each of d = 2, 3")


# -- 4. distance ordering ------------------------------------------------------------

def test_criterion_4_distance_ordering(report):
    rng = np.random.default_rng(SEED + 4)
    nets = {2: bronshtein_net(2, 0.2), 3: bronshtein_net(3, 0.3)}
    eps = {2: 0.2, 3: 0.3}
    bad = []
    for i in range(500):
        dim = 2 + i % 2
        mu, nu = random_measure(rng, dim), random_measure(rng, dim)
        s = d_c_sandwich(mu, nu, net_epsilon=eps[dim], net=nets[dim])
        tv, bl = d_tv(mu, nu), d_bl(mu, nu)
        if not (s.lower <= bl and bl <= 2 * tv + C4_TOL and s.lower <= s.upper):
            bad.append((i, s.lower, bl, tv, s.upper))
    report(4, not bad, f"{500 - len(bad)}/500 pairs satisfy d_c_lower <= d_bl <= 2 d_tv + "
                       f"{C4_TOL:g} and d_c_lower <= d_c_upper")


# -- 5. zero-mean projections --------------------------------------------------------

def _spanning_measure(rng, dim, k):
    """Probability measure on k atoms whose normals positively span."""
    while True:
        n = rng.normal(size=(k, dim))
        n /= np.linalg.norm(n, axis=1)[:, None]
        w = rng.uniform(0.1, 0.5, k)
        mu = DiscreteSphericalMeasure(n, w / w.sum())
        try:
            zero_mean_project_tv(mu)
        except DegenerateSupport:
            continue
        return mu


def test_criterion_5_zero_mean_projections(report):
    rng = np.random.default_rng(SEED + 5)
    rad_mean, dc_gap = 0.0, -math.inf
    for i in range(200):
        dim = 2 + i % 2
        nu = random_measure(rng, dim, k_max=20, mass=1.0)
        bar = zero_mean_project_radial(nu)
        rad_mean = max(rad_mean, float(np.linalg.norm(bar.mean)))
        gap = d_c_lower(nu, bar)[0] - 2 * float(np.linalg.norm(nu.mean))
        dc_gap = max(dc_gap, gap)

    tv_mean, agree_v, agree_g, n_grid = 0.0, 0.0, 0.0, 0
    for i in range(40):
        dim = 2 + i % 2
        k = int(rng.integers(dim + 1, 7))
        nu = _spanning_measure(rng, dim, k)
        out, obj = zero_mean_project_tv(nu)
        tv_mean = max(tv_mean, float(np.linalg.norm(out.mean)))
        agree_v = max(agree_v, abs(obj - tv_projection_vertices(nu.directions, nu.weights)))
        if k - dim <= 2:
            # the grid value can only sit above the optimum, by at most ~k * step
            g = tv_projection_grid(nu.directions, nu.weights, step=C5_GRID)
            agree_g = max(agree_g, abs(obj - g))
            n_grid += 1
    ok = (rad_mean <= C5_RADIAL_MEAN and dc_gap <= C5_DC_TOL and tv_mean <= C5_TV_MEAN
          and agree_v <= C5_AGREE and agree_g <= C5_AGREE)
    report(5, ok, f"radial |mean| = {rad_mean:.1e} (<= {C5_RADIAL_MEAN:g}), "
                  f"max d_c_lower - 2|m| = {dc_gap:.1e} (<= {C5_DC_TOL:g}); "
                  f"TV |mean| = {tv_mean:.1e} (<= {C5_TV_MEAN:g}), "
                  f"|obj - enumeration| = {agree_v:.1e}, |obj - grid {C5_GRID:g}| = "
                  f"{agree_g:.1e} on {n_grid} instances (<= {C5_AGREE:g})")


# -- 6-9. experiment studies ---------------------------------------------------------

def _configs(out_dir):
    return {
        "scaling": ExperimentConfig(body="square", n_schedule=(100, 1000, 10000, 100000),
                                    trials=30, seed=SEED, projection="radial",
                                    out_dir=str(out_dir / "scaling")),
        "tail": ExperimentConfig(body="square", n_schedule=(2000,), trials=500, seed=SEED,
                                 study="tail", epsilons=(0.2,), distances=False,
                                 out_dir=str(out_dir / "tail")),
        "reference": ExperimentConfig(body="cube", n_schedule=(300,), trials=20, seed=SEED,
                                      noise_radius=0.05, projection="radial",
                                      out_dir=str(out_dir / "reference")),
    }


def _run(cfgs, workers):
    """Run the three studies; return their CSV texts, results and wall times."""
    out, secs = {}, {}
    t0 = time.perf_counter()
    res = scaling_study(cfgs["scaling"], workers=workers, write=False)
    secs["scaling"] = time.perf_counter() - t0
    out["scaling"] = records_csv(res.records)
    t0 = time.perf_counter()
    summary, per_trial = tail_study(cfgs["tail"], epsilons=[0.2], workers=workers, write=False)
    secs["tail"] = time.perf_counter() - t0
    out["tail"], out["tail_trials"] = summary, per_trial
    recs = run_trials(cfgs["reference"], workers=workers)
    out["reference"] = records_csv(recs)
    return out, {"scaling": res, "reference": recs}, secs


@pytest.fixture(scope="module")
def studies(tmp_path_factory):
    cfgs = _configs(tmp_path_factory.mktemp("studies"))
    csvs, results, secs = _run(cfgs, workers=1)
    return cfgs, csvs, results, secs


def test_criterion_6_square_scaling(studies, report):
    _, _, results, secs = studies
    res = results["scaling"]
    lo, hi = C6_SLOPE
    ok = lo <= res.slope <= hi and secs["scaling"] < C6_SECONDS
    meds = ", ".join(f"{m:.3g}" for m in res.medians)
    report(6, ok, f"slope = {res.slope:.3f} (in [{lo}, {hi}]; 95% CI [{res.ci[0]:.3f}, "
                  f"{res.ci[1]:.3f}]), medians [{meds}], {secs['scaling']:.0f} s "
                  f"(< {C6_SECONDS:g} s)")


def test_criterion_7_devroye_tail(studies, report):
    _, csvs, _, secs = studies
    head, row = csvs["tail"].strip().split("\n")
    r = dict(zip(head.split(","), row.split(",")))
    n, trials, freq = int(r["N"]), int(r["trials"]), float(r["freq_tv"])
    bound = devroye_bound(n, 0.2)
    slack = C7_SIGMAS * math.sqrt(min(bound, 1.0) * (1 - min(bound, 1.0)) / trials)
    ok = freq <= bound + slack and secs["tail"] < C7_SECONDS
    report(7, ok, f"P(d_tv >= 0.2) = {freq:.3f} <= {bound:.4f} + {slack:.4f} "
                  f"({C7_SIGMAS:g} sigma, {trials} trials), {secs['tail']:.1f} s "
                  f"(< {C7_SECONDS:g} s)")


def test_criterion_8_reference_scenario(studies, report):
    _, _, results, _ = studies
    recs = results["reference"]
    conv = sum(r.converged for r in recs)
    eta = [r.eta for r in recs if r.converged and np.isfinite(r.eta)]
    med = float(np.median(eta)) if eta else math.inf
    report(8, conv >= C8_MIN_CONVERGED and med <= C8_MEDIAN_ETA,
           f"converged {conv}/{len(recs)} (>= {C8_MIN_CONVERGED}), median eta = {med:.3f} "
           f"(<= {C8_MEDIAN_ETA:g})")


def test_criterion_9_determinism(studies, report):
    cfgs, base, _, _ = studies
    diffs = []
    for w in C9_WORKERS[1:]:
        csvs, _, _ = _run(cfgs, workers=w)
        diffs += [f"{name}@{w}" for name in base if csvs[name] != base[name]]
    report(9, not diffs, f"CSVs of criteria 6-8 byte-identical across workers {C9_WORKERS}"
                         + (f"; differing: {diffs}" if diffs else ""))
