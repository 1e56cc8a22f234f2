"""Monte-Carlo harness for the sampling pipeline.

Each trial draws ``N`` outer normals of a unit-area body, projects their
empirical measure to zero mean, reconstructs a polytope and measures the
translation-minimized Hausdorff error. Studies collect trials into CSV
tables: error against ``N`` (scaling), tail frequencies of the total
variation distance (tail) and Cheng-Yau radius ratios.

Trials are independent; trial ``(N, i)`` uses the generator seeded by
``SeedSequence([seed, N, i])`` and rows are sorted by ``(N, i)`` before
writing, so tables are byte-identical for any number of workers.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from scipy import stats
from threadpoolctl import threadpool_limits

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from . import _kernels
from .distances import d_bl, d_c_lower, d_tv, default_probes
from .errors import DegenerateSupport, InsufficientTrials, MalformedCSV, MinkprobeError
from .geometry import Polytope, chebyshev_center, load_polytope, min_translate_hausdorff, named_body
from .measures import (empirical_measure, rotundity, sample_normals, surface_area_measure,
                       zero_mean_project_radial, zero_mean_project_tv)
from .minkowski import reconstruct

log = logging.getLogger(__name__)

PROJECTIONS = ("radial", "tv")
STUDIES = ("trials", "scaling", "tail")


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one study.

    ``body`` is a built-in name (``square``, ``cube``, ``ngon:64``, ...) or
    the path of a polytope JSON file. ``epsilons`` is only used by the
    tail study; ``distances`` switches off the per-trial distance columns.
    """

    body: str
    n_schedule: tuple[int, ...]
    trials: int
    seed: int = 0
    noise_radius: float = 0.0
    projection: str = "radial"
    tol: float = 1e-6
    out_dir: str = "results"
    study: str = "trials"
    epsilons: tuple[float, ...] = ()
    distances: bool = True

    def __post_init__(self):
        ns = list(self.n_schedule)
        if not ns:
            raise ValueError("N_schedule is empty")
        if any(int(b) <= int(a) for a, b in zip(ns, ns[1:])):
            raise ValueError("N_schedule must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.projection not in PROJECTIONS:
            raise ValueError(f"projection must be one of {PROJECTIONS}")
        if self.study not in STUDIES:
            raise ValueError(f"study must be one of {STUDIES}")
        if self.noise_radius < 0:
            raise ValueError("noise_radius must be non-negative")

    @classmethod
    def from_toml(cls, path) -> "ExperimentConfig":
        """Read a TOML file; relative ``body`` and ``out_dir`` paths resolve against it."""
        path = Path(path)
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        known = {f.name for f in fields(cls)} | {"N_schedule"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "N_schedule" in raw:
            raw["n_schedule"] = raw.pop("N_schedule")
        for key in ("body", "n_schedule", "trials"):
            if key not in raw:
                raise ValueError(f"missing config key {key!r}")
        raw["n_schedule"] = tuple(int(n) for n in raw["n_schedule"])
        raw["epsilons"] = tuple(float(e) for e in raw.get("epsilons", ()))
        body = str(raw["body"])
        if body.endswith(".json") and not Path(body).is_absolute():
            raw["body"] = str(path.parent / body)
        out = Path(raw.get("out_dir", "results"))
        raw["out_dir"] = str(out if out.is_absolute() else path.parent / out)
        return cls(**raw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_schedule"] = list(self.n_schedule)
        d["epsilons"] = list(self.epsilons)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def load_body(spec: str) -> Polytope:
    """Built-in name or polytope JSON path."""
    if spec.endswith(".json") or os.path.sep in spec:
        return load_polytope(spec)
    return named_body(spec)


def unit_area(body: Polytope) -> tuple[Polytope, float]:
    """Rescale so the boundary measure has mass one; returns the body and the factor."""
    mass = float(body.facet_areas.sum())
    s = mass ** (-1.0 / (body.dim - 1))
    return body.scale(s), s


# ---------------------------------------------------------------------------
# trials

@dataclass
class TrialRecord:
    body: str
    N: int
    trial: int
    seed: int
    noise_radius: float
    projection: str
    scale: float
    mean_norm: float = math.nan
    d_tv: float = math.nan
    d_bl: float = math.nan
    d_c_lower: float = math.nan
    residual: float = math.nan
    iterations: int = 0
    converged: bool = False
    eta: float = math.nan
    error: str = ""
    wall_time: float = field(default=0.0, compare=False)

    def row(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in RESULT_COLUMNS]


RESULT_COLUMNS = ["body", "N", "trial", "seed", "noise_radius", "projection", "scale",
                  "mean_norm", "d_tv", "d_bl", "d_c_lower", "residual", "iterations",
                  "converged", "eta", "error"]


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def trial_seed(seed: int, n: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(n), int(trial)])


def _project(nu, mode):
    if mode == "tv":
        return zero_mean_project_tv(nu)[0]
    return zero_mean_project_radial(nu)


def run_trial(cfg: ExperimentConfig, n: int, trial_index: int,
              body: Polytope | None = None) -> TrialRecord:
    """One pass of sample, project, reconstruct and compare.

    Domain errors do not propagate: the record keeps ``converged = false``
    and the error name. Fewer sampled directions than needed to span the
    space count as ``DegenerateSupport`` even though the radial projection
    could still return a (data-independent) measure.
    """
    t0 = time.perf_counter()
    raw = body if body is not None else load_body(cfg.body)
    k, s = unit_area(raw)
    ss = trial_seed(cfg.seed, n, trial_index)
    rec = TrialRecord(cfg.body, int(n), int(trial_index), int(ss.generate_state(1)[0]),
                      float(cfg.noise_radius), cfg.projection, float(s))
    try:
        with threadpool_limits(1):
            normals = sample_normals(k, n, np.random.default_rng(ss), cfg.noise_radius)
            nu = empirical_measure(normals)
            rec.mean_norm = float(np.linalg.norm(nu.mean))
            if cfg.distances:
                mu_k = surface_area_measure(k)
                rec.d_tv = d_tv(nu, mu_k)
                rec.d_bl = d_bl(nu, mu_k)
                rec.d_c_lower = d_c_lower(nu, mu_k)[0]
            if np.linalg.matrix_rank(nu.directions, tol=1e-9) < k.dim:
                raise DegenerateSupport("sampled normals do not span the space")
            report = reconstruct(_project(nu, cfg.projection), tol=cfg.tol)
            rec.residual = float(report.area_residual_linf)
            rec.iterations = int(report.iterations)
            rec.converged = bool(report.converged)
            rec.eta = float(min_translate_hausdorff(k, report.body)[0])
    except MinkprobeError as err:
        rec.error = type(err).__name__
        rec.converged = False
    rec.wall_time = time.perf_counter() - t0
    return rec


def _run_task(args):
    cfg, n, i, body = args
    return run_trial(cfg, n, i, body)


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get("MINKPROBE_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def _map(fn, tasks, workers):
    if workers == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (8 * workers))))


def run_trials(cfg: ExperimentConfig, workers: int | None = None) -> list[TrialRecord]:
    """All trials of the schedule, sorted by (N, trial)."""
    body = load_body(cfg.body)
    w = worker_count(workers)
    out = []
    for n in cfg.n_schedule:
        tasks = [(cfg, n, i, body) for i in range(cfg.trials)]
        recs = _map(_run_task, tasks, w)
        ok = [r.eta for r in recs if r.converged]
        log.info("N=%d trials=%d converged=%d median_eta=%s", n, len(recs), len(ok),
                 f"{np.median(ok):.4g}" if ok else "nan")
        out.extend(recs)
    out.sort(key=lambda r: (r.N, r.trial))
    return out


def records_csv(records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(RESULT_COLUMNS)
    for r in records:
        wr.writerow(r.row())
    return buf.getvalue()


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_timings(path: Path, records) -> None:
    lines = ["N,trial,wall_time"] + [f"{r.N},{r.trial},{r.wall_time:.6f}" for r in records]
    _write(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# scaling study

@dataclass
class ScalingResult:
    records: list[TrialRecord]
    n_values: np.ndarray
    medians: np.ndarray
    slope: float
    intercept: float
    ci: tuple[float, float]
    predicted_slope: float
    general_exponent: float
    general_bound: np.ndarray
    general_ok: bool
    monotone_inversions: int
    stability: dict

    def summary(self) -> dict:
        return {"N": self.n_values.tolist(), "median_eta": self.medians.tolist(),
                "slope": self.slope, "intercept": self.intercept, "ci95": list(self.ci),
                "predicted_slope_polytope": self.predicted_slope,
                "general_exponent": self.general_exponent,
                "general_bound": self.general_bound.tolist(), "general_ok": self.general_ok,
                "monotone_inversions": self.monotone_inversions, "stability": self.stability}


def median_table(records: list[TrialRecord]) -> tuple[np.ndarray, np.ndarray]:
    """Median error per N over converged trials with a finite error."""
    ns = sorted({r.N for r in records})
    med = []
    for n in ns:
        e = [r.eta for r in records if r.N == n and r.converged and np.isfinite(r.eta)]
        med.append(float(np.median(e)) if e else math.nan)
    return np.array(ns, dtype=float), np.array(med)


def fit_slope(n_values, medians) -> tuple[float, float, tuple[float, float]]:
    """Least-squares slope of log(median) against log(N) with a 95% interval."""
    ok = np.isfinite(medians) & (medians > 0)
    x, y = np.log(n_values[ok]), np.log(medians[ok])
    if len(x) < 3:
        raise InsufficientTrials("need at least 3 N values with a finite median error")
    fit = stats.linregress(x, y)
    q = stats.t.ppf(0.975, len(x) - 2)
    return float(fit.slope), float(fit.intercept), (float(fit.slope - q * fit.stderr),
                                                    float(fit.slope + q * fit.stderr))


def stability_check(records: list[TrialRecord], dim: int, q: float = 0.25) -> dict:
    """Error against the convex-dual lower bound.

    Reports max eta / d_c_lower^(1/d) and whether the largest error among
    trials in the lowest ``q`` quantile of d_c_lower stays below the largest
    error above it.
    """
    rows = [(r.d_c_lower, r.eta) for r in records
            if r.converged and np.isfinite(r.eta) and np.isfinite(r.d_c_lower)]
    if not rows:
        return {"ratio_max": math.nan, "quantile_ok": True}
    dc, eta = np.array(rows).T
    pos = dc > 0
    ratio = float(np.max(eta[pos] / dc[pos] ** (1.0 / dim))) if np.any(pos) else math.nan
    cut = np.quantile(dc, q)
    lo, hi = eta[dc <= cut], eta[dc > cut]
    ok = bool(len(hi) == 0 or lo.max() <= hi.max())
    return {"ratio_max": ratio, "quantile_ok": ok}


def scaling_study(cfg: ExperimentConfig, workers: int | None = None,
                  write: bool = True) -> ScalingResult:
    """Median error against N with a log-log fit.

    The fitted slope is compared with -1/(2(d-1)), the rate for polytopes.
    For the general rate ``N ~ eta^(d(1-d)/2 - 2d)`` the constant is fitted
    at the smallest N and the one-sided bound is checked at the others.
    """
    if len(set(cfg.n_schedule)) < 3 or cfg.trials < 20:
        raise InsufficientTrials("scaling study needs >= 3 N values and >= 20 trials each")
    body = load_body(cfg.body)
    d = body.dim
    records = run_trials(cfg, workers)
    ns, med = median_table(records)
    slope, icpt, ci = fit_slope(ns, med)
    a = d * (1 - d) / 2 - 2 * d
    c = ns[0] * med[0] ** (-a)
    bound = (ns / c) ** (1.0 / a)
    general_ok = bool(np.all(med[1:] <= bound[1:] * (1 + 1e-12)))
    inversions = int(np.sum(np.diff(med) > 0))
    res = ScalingResult(records, ns, med, slope, icpt, ci, -1.0 / (2 * (d - 1)), a, bound,
                        general_ok, inversions, stability_check(records, d))
    if write:
        out = Path(cfg.out_dir)
        _write(out / "results.csv", records_csv(records))
        _write(out / "scaling.json", json.dumps(res.summary(), indent=2, sort_keys=True) + "\n")
        _write_timings(out / "timings.csv", records)
        write_manifest(cfg, out, ["results.csv", "scaling.json"])
    return res


# ---------------------------------------------------------------------------
# tail study

TAIL_COLUMNS = ["N", "epsilon", "trials", "freq_tv", "freq_dc", "bound", "slack",
                "applicable", "holds"]
TAIL_TRIAL_COLUMNS = ["N", "trial", "seed", "d_tv", "d_c_lower"]


def devroye_bound(n: int, eps: float) -> float:
    return 3.0 * math.exp(-n * eps * eps / 25.0)


def devroye_applicable(n: int, eps: float, k: int) -> bool:
    """The bound is only claimed for eps >= sqrt(20 k / N)."""
    return n > 0 and eps >= math.sqrt(20.0 * k / n) * (1 - 1e-12)


def _tail_task(args):
    cfg, n, i, body = args
    ss = trial_seed(cfg.seed, n, i)
    with threadpool_limits(1):
        nu = empirical_measure(sample_normals(body, n, np.random.default_rng(ss),
                                              cfg.noise_radius))
        mu_k = surface_area_measure(body)
        tv = d_tv(nu, mu_k)
        dc = d_c_lower(nu, mu_k, probes=default_probes(nu, mu_k, max_doublings=0))[0]
    return int(n), int(i), int(ss.generate_state(1)[0]), tv, dc


def tail_study(cfg: ExperimentConfig, epsilons=None, workers: int | None = None,
               write: bool = True) -> tuple[str, str]:
    """Frequencies of ``d_tv >= eps`` over trials against the Devroye bound.

    Returns the summary CSV (one row per (N, eps)) and the per-trial CSV.
    A cell holds when the frequency is at most the bound plus three
    binomial standard deviations; cells where eps is below sqrt(20 k / N)
    are flagged as not applicable. The convex-dual frequencies are recorded
    without a bound. Non-positive N values produce no rows.
    """
    eps_list = [float(e) for e in (epsilons if epsilons is not None else cfg.epsilons)]
    body, _ = unit_area(load_body(cfg.body))
    k = len(body.facet_areas)
    w = worker_count(workers)
    trials = []
    for n in cfg.n_schedule:
        if n <= 0:
            continue
        tasks = [(cfg, n, i, body) for i in range(cfg.trials)]
        trials.extend(_map(_tail_task, tasks, w))
        log.info("N=%d tail trials=%d", n, cfg.trials)
    trials.sort(key=lambda t: (t[0], t[1]))

    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(TAIL_COLUMNS)
    for n in sorted({t[0] for t in trials}):
        tv = np.array([t[3] for t in trials if t[0] == n])
        dc = np.array([t[4] for t in trials if t[0] == n])
        for eps in eps_list:
            f_tv = float(np.mean(tv >= eps))
            f_dc = float(np.mean(dc >= eps))
            b = devroye_bound(n, eps)
            p = min(b, 1.0)
            slack = 3.0 * math.sqrt(p * (1 - p) / len(tv))
            app = devroye_applicable(n, eps, k)
            holds = (f_tv <= b + slack) if app else True
            wr.writerow([_fmt(v) for v in (n, eps, len(tv), f_tv, f_dc, b, slack, app, holds)])
    summary = buf.getvalue()

    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(TAIL_TRIAL_COLUMNS)
    for t in trials:
        wr.writerow([_fmt(v) for v in t])
    per_trial = buf.getvalue()
    if write:
        out = Path(cfg.out_dir)
        _write(out / "tail.csv", summary)
        _write(out / "tail_trials.csv", per_trial)
        write_manifest(cfg, out, ["tail.csv", "tail_trials.csv"])
    return summary, per_trial


# ---------------------------------------------------------------------------
# Cheng-Yau diagnostic

def _ball_from(pts: list[np.ndarray]) -> tuple[np.ndarray, float]:
    """Smallest ball with all of ``pts`` (at most d + 1) on its boundary."""
    if not pts:
        return np.zeros(0), -1.0
    p0 = pts[0]
    if len(pts) == 1:
        return p0.copy(), 0.0
    a = np.array([p - p0 for p in pts[1:]])
    # centre = p0 + a^T x with (a a^T) x = |a|^2 / 2
    g = a @ a.T
    x = np.linalg.lstsq(g, 0.5 * np.einsum("ij,ij->i", a, a), rcond=None)[0]
    c = p0 + a.T @ x
    return c, float(np.linalg.norm(c - p0))


def min_enclosing_ball(points) -> tuple[np.ndarray, float]:
    """Welzl's move-to-front algorithm; exact up to rounding for small dimensions."""
    pts = [np.asarray(p, dtype=float) for p in np.asarray(points, dtype=float)]
    rng = np.random.default_rng(0)
    pts = [pts[i] for i in rng.permutation(len(pts))]
    d = len(pts[0])

    def mb(n, boundary):
        c, r = _ball_from(boundary)
        if len(boundary) == d + 1:
            return c, r
        for i in range(n):
            if r < 0 or np.linalg.norm(pts[i] - c) > r * (1 + 1e-12) + 1e-15:
                c, r = mb(i, boundary + [pts[i]])
        return c, r

    return mb(len(pts), [])


CY_COLUMNS = ["body", "dim", "mass", "rotundity", "inradius", "circumradius",
              "ratio_R", "ratio_r"]


def cheng_yau_diagnostic(bodies, labels=None) -> str:
    """Inradius, circumradius, mass and rotundity per body, with the two ratios.

    ``ratio_R = R rotund / mass^(d/(d-1))`` and ``ratio_r = r mass^d / rotund^d``.
    Only positivity and finiteness are checked.
    """
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CY_COLUMNS)
    for i, body in enumerate(bodies):
        label = labels[i] if labels else f"body{i}"
        d = body.dim
        hs = body.halfspaces()
        _, r = chebyshev_center(hs.normals, hs.offsets)
        _, big_r = min_enclosing_ball(body.vertices)
        mu = surface_area_measure(body)
        rot = rotundity(mu)[0]
        mass = mu.mass
        ratio_big = big_r * rot / mass ** (d / (d - 1))
        ratio_small = r * mass ** d / rot ** d
        vals = [ratio_big, ratio_small, r, big_r, rot]
        if not all(np.isfinite(v) and v > 0 for v in vals):
            raise DegenerateSupport(f"non-positive Cheng-Yau quantity for {label}")
        wr.writerow([label, d] + [_fmt(float(v)) for v in (mass, rot, r, big_r,
                                                            ratio_big, ratio_small)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# manifest, plots, entry point

def write_manifest(cfg: ExperimentConfig, out: Path, files: list[str]) -> None:
    import scipy

    man = {"config": cfg.to_dict(), "config_sha256": cfg.digest(), "version": __version__,
           "numpy": np.__version__, "scipy": scipy.__version__, "backend": _kernels.BACKEND,
           "outputs": {f: hashlib.sha256((out / f).read_bytes()).hexdigest() for f in files}}
    _write(out / "manifest.json", json.dumps(man, indent=2, sort_keys=True) + "\n")


def run_experiment(cfg: ExperimentConfig, workers: int | None = None):
    """Dispatch on ``cfg.study``; writes outputs under ``cfg.out_dir``."""
    if cfg.study == "scaling":
        return scaling_study(cfg, workers)
    if cfg.study == "tail":
        return tail_study(cfg, workers=workers)
    records = run_trials(cfg, workers)
    out = Path(cfg.out_dir)
    _write(out / "results.csv", records_csv(records))
    _write_timings(out / "timings.csv", records)
    write_manifest(cfg, out, ["results.csv"])
    return records


def _read_csv(text: str, required: list[str]) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise MalformedCSV("CSV has no data rows")
    missing = [c for c in required if c not in rows[0]]
    if missing:
        raise MalformedCSV(f"missing columns {missing}")
    return rows


def _num(row, key, conv=float):
    try:
        return conv(row[key])
    except (TypeError, ValueError):
        raise MalformedCSV(f"bad value {row[key]!r} in column {key!r}") from None


def emit_plots(csv_path, kind: str, out_path) -> None:
    """Write an SVG of a results table; the output depends only on the CSV bytes.

    ``scaling``: per-trial errors, per-N medians and the fitted line on log
    axes. ``tail``: observed frequencies and the bound against epsilon.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    try:
        text = Path(csv_path).read_text()
    except OSError as err:
        raise MalformedCSV(f"cannot read {csv_path}: {err}") from None
    with matplotlib.rc_context({"svg.hashsalt": "minkprobe", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 4))
        if kind == "scaling":
            rows = _read_csv(text, ["N", "eta", "converged"])
            ok = [r for r in rows if r["converged"] == "true"]
            n = np.array([_num(r, "N") for r in ok])
            eta = np.array([_num(r, "eta") for r in ok])
            keep = np.isfinite(eta) & (eta > 0)
            n, eta = n[keep], eta[keep]
            if len(n) == 0:
                raise MalformedCSV("no converged trials with a positive error")
            ns = np.unique(n)
            med = np.array([np.median(eta[n == v]) for v in ns])
            ax.loglog(n, eta, ".", color="0.7", label="trials")
            ax.loglog(ns, med, "o", color="C0", label="median")
            if len(ns) >= 2:
                fit = stats.linregress(np.log(ns), np.log(med))
                xs = np.geomspace(ns[0], ns[-1], 50)
                ax.loglog(xs, np.exp(fit.intercept) * xs ** fit.slope, "-", color="C1",
                          label=f"slope {fit.slope:.3f}")
            ax.set_xlabel("N")
            ax.set_ylabel("min-translate Hausdorff error")
        elif kind == "tail":
            rows = _read_csv(text, ["N", "epsilon", "freq_tv", "bound"])
            for i, nv in enumerate(sorted({_num(r, "N", int) for r in rows})):
                sub = sorted((r for r in rows if int(r["N"]) == nv), key=lambda r: float(r["epsilon"]))
                e = [_num(r, "epsilon") for r in sub]
                ax.semilogy(e, [max(_num(r, "freq_tv"), 1e-4) for r in sub], "o-",
                            color=f"C{i}", label=f"N={nv} observed")
                ax.semilogy(e, [min(_num(r, "bound"), 1.0) for r in sub], "--",
                            color=f"C{i}", label=f"N={nv} bound")
            ax.set_xlabel("epsilon")
            ax.set_ylabel("P(d_TV >= epsilon)")
        else:
            plt.close(fig)
            raise ValueError(f"unknown plot kind {kind!r}")
        ax.legend(fontsize=8)
        fig.tight_layout()
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out_path, format="svg", metadata={"Date": None})
        plt.close(fig)
