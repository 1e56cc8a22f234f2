import math

import numpy as np
import pytest
from scipy.optimize import minimize

from minkprobe.errors import InsufficientTrials, MalformedCSV
from minkprobe.experiments import (ExperimentConfig, cheng_yau_diagnostic, devroye_applicable,
                                   devroye_bound, emit_plots, fit_slope, min_enclosing_ball,
                                   records_csv, run_experiment, run_trial, run_trials,
                                   scaling_study, tail_study, trial_seed, unit_area)
from minkprobe.geometry import box, ngon, random_polytope, square
from minkprobe.measures import sample_normals


def cfg(**kw):
    base = dict(body="square", n_schedule=(4,), trials=1, seed=0)
    base.update(kw)
    return ExperimentConfig(**base)


# -- configuration ------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ValueError):
        cfg(n_schedule=(10, 10))
    with pytest.raises(ValueError):
        cfg(trials=0)
    with pytest.raises(ValueError):
        cfg(projection="l2")


def test_config_from_toml(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('body = "cube"\nN_schedule = [100, 300]\ntrials = 3\nseed = 7\n'
                 'noise_radius = 0.05\nprojection = "tv"\ntol = 1e-6\nout_dir = "out"\n')
    c = ExperimentConfig.from_toml(p)
    assert c.n_schedule == (100, 300) and c.projection == "tv"
    assert c.out_dir == str(tmp_path / "out")
    p.write_text('body = "cube"\nN_schedule = [1]\ntrials = 1\nbogus = 2\n')
    with pytest.raises(ValueError):
        ExperimentConfig.from_toml(p)


# -- trials ---------------------------------------------------------------------------

def test_unit_area():
    k, s = unit_area(square())
    assert k.facet_areas.sum() == pytest.approx(1.0, rel=1e-12)
    assert s == pytest.approx(0.25)


def test_trial_exact_recovery_when_all_normals_seen():
    c = cfg()
    body, _ = unit_area(square())
    for i in range(100):
        x = sample_normals(body, 4, np.random.default_rng(trial_seed(0, 4, i)))
        if len(np.unique(x, axis=0)) == 4:
            break
    else:
        pytest.fail("no trial observed all four normals")
    rec = run_trial(c, 4, i)
    assert rec.converged and rec.eta <= 1e-8


def test_trial_single_normal_is_degenerate():
    rec = run_trial(cfg(n_schedule=(1,)), 1, 0)
    assert rec.error == "DegenerateSupport" and not rec.converged
    assert math.isnan(rec.eta)


def test_trial_reference_scenario():
    rec = run_trial(cfg(body="cube", n_schedule=(300,), noise_radius=0.05), 300, 0)
    assert rec.converged and np.isfinite(rec.eta) and rec.eta >= 0
    assert min(rec.d_tv, rec.d_bl, rec.d_c_lower, rec.mean_norm) >= 0


def test_trial_tv_projection():
    rec = run_trial(cfg(n_schedule=(200,), projection="tv"), 200, 3)
    assert rec.converged and rec.eta >= 0


def test_trials_deterministic_across_workers():
    c = cfg(n_schedule=(50, 100), trials=3, noise_radius=0.02)
    one = records_csv(run_trials(c, workers=1))
    two = records_csv(run_trials(c, workers=2))
    assert one == two
    assert one.count("\n") == 7


def test_run_experiment_writes_outputs(tmp_path):
    c = cfg(n_schedule=(50,), trials=2, out_dir=str(tmp_path))
    run_experiment(c, workers=1)
    assert (tmp_path / "results.csv").read_text().startswith("body,N,trial,seed")
    assert "wall_time" not in (tmp_path / "results.csv").read_text()
    assert (tmp_path / "timings.csv").exists() and (tmp_path / "manifest.json").exists()


# -- scaling --------------------------------------------------------------------------

def test_scaling_needs_enough_trials():
    with pytest.raises(InsufficientTrials):
        scaling_study(cfg(n_schedule=(100,), trials=30), write=False)
    with pytest.raises(InsufficientTrials):
        scaling_study(cfg(n_schedule=(100, 1000, 10000), trials=5), write=False)


def test_fit_slope_exact_power_law():
    n = np.array([1e2, 1e3, 1e4, 1e5])
    slope, icpt, ci = fit_slope(n, 3 * n ** -0.5)
    assert slope == pytest.approx(-0.5, abs=1e-12)
    assert icpt == pytest.approx(np.log(3), abs=1e-12)
    assert ci[0] <= slope <= ci[1]


def test_scaling_small_square(tmp_path):
    res = scaling_study(cfg(n_schedule=(100, 1000, 10000), trials=20, out_dir=str(tmp_path)),
                        workers=1)
    assert len(res.records) == 60
    assert -1.0 <= res.slope <= 0.0
    assert res.general_ok
    assert res.stability["quantile_ok"] and np.isfinite(res.stability["ratio_max"])
    assert res.monotone_inversions <= 1


# -- tail -----------------------------------------------------------------------------

def test_devroye_arithmetic():
    assert devroye_bound(2000, 0.2) == pytest.approx(3 * math.exp(-3.2))
    assert devroye_bound(2000, 0.2) == pytest.approx(0.122, abs=5e-4)
    assert devroye_applicable(2000, 0.2, 4)
    assert not devroye_applicable(2000, 0.1, 4)
    assert not devroye_applicable(0, 0.2, 4)


def test_tail_rows_and_flags():
    summary, per_trial = tail_study(cfg(n_schedule=(0, 500), trials=40, study="tail"),
                                    epsilons=[0.1, 0.5], workers=1, write=False)
    lines = summary.strip().split("\n")
    assert len(lines) == 3
    assert lines[1].split(",")[7] == "false"  # 0.1 < sqrt(80 / 500)
    assert lines[2].split(",")[7] == "true"
    assert per_trial.count("\n") == 41


def test_tail_empty_for_zero_n():
    summary, per_trial = tail_study(cfg(n_schedule=(0,), trials=5, study="tail"),
                                    epsilons=[0.2], workers=1, write=False)
    assert summary.strip().split("\n") == [summary.strip().split("\n")[0]]


# -- Cheng-Yau ------------------------------------------------------------------------

def _cy_row(text):
    head, row = text.strip().split("\n")[:2]
    return dict(zip(head.split(","), row.split(",")))


def test_cheng_yau_square():
    r = _cy_row(cheng_yau_diagnostic([square()], ["square"]))
    assert float(r["inradius"]) == pytest.approx(0.5, abs=1e-9)
    assert float(r["circumradius"]) == pytest.approx(np.sqrt(2) / 2, abs=1e-12)
    assert float(r["rotundity"]) == pytest.approx(1, abs=1e-12)
    assert float(r["mass"]) == pytest.approx(4, abs=1e-12)


def test_cheng_yau_disk_and_thin_rectangle():
    r = _cy_row(cheng_yau_diagnostic([ngon(256)]))
    assert float(r["inradius"]) == pytest.approx(1, abs=1e-3)
    assert float(r["circumradius"]) == pytest.approx(1, abs=1e-3)
    eps = 0.01
    r = _cy_row(cheng_yau_diagnostic([box([-1, -eps], [1, eps])]))
    # f(theta) = 2 eps |cos theta| + 2 |sin theta|, smallest at theta = 0
    assert float(r["rotundity"]) == pytest.approx(2 * eps, abs=1e-12)
    assert float(r["ratio_R"]) > 0 and float(r["ratio_r"]) > 0


def test_min_enclosing_ball_against_optimizer(rng):
    for dim in (2, 3):
        for _ in range(5):
            pts = random_polytope(rng, dim).vertices
            c, r = min_enclosing_ball(pts)
            assert np.linalg.norm(pts - c, axis=1).max() <= r * (1 + 1e-9)
            # min t subject to |p - x|^2 <= t for every vertex p
            x0 = np.append(pts.mean(0), (np.linalg.norm(pts - pts.mean(0), axis=1) ** 2).max())
            ref = minimize(lambda z: z[-1], x0, jac=lambda z: np.eye(dim + 1)[-1], method="SLSQP",
                           constraints=[{"type": "ineq",
                                         "fun": lambda z: z[-1] - ((pts - z[:-1]) ** 2).sum(1),
                                         "jac": lambda z: np.column_stack(
                                             [2 * (pts - z[:-1]), np.ones(len(pts))])}],
                           options={"ftol": 1e-15, "maxiter": 1000})
            assert r == pytest.approx(np.sqrt(ref.fun), abs=1e-7)


# -- plots ----------------------------------------------------------------------------

def test_plots_deterministic(tmp_path):
    c = cfg(n_schedule=(50, 100, 200, 400), trials=3, out_dir=str(tmp_path))
    run_experiment(c, workers=1)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plots(tmp_path / "results.csv", "scaling", a)
    emit_plots(tmp_path / "results.csv", "scaling", b)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().count("<svg") == 1
    summary, _ = tail_study(cfg(n_schedule=(500, 1000), trials=10, study="tail", out_dir=str(tmp_path)),
                            epsilons=[0.05, 0.1, 0.2], workers=1)
    emit_plots(tmp_path / "tail.csv", "tail", tmp_path / "t.svg")
    assert (tmp_path / "t.svg").stat().st_size > 0


def test_plots_malformed(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(MalformedCSV):
        emit_plots(p, "scaling", tmp_path / "x.svg")
    p.write_text("N,eta,converged\nabc,1,true\n")
    with pytest.raises(MalformedCSV):
        emit_plots(p, "scaling", tmp_path / "x.svg")
    p.write_text("foo\n1\n")
    with pytest.raises(MalformedCSV):
        emit_plots(p, "tail", tmp_path / "x.svg")
