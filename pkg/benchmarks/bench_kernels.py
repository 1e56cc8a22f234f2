"""Compare the numba and numpy kernel paths.

Times each kernel on inputs of realistic size (best of ``--repeat`` runs
after one warm-up call, so compilation is excluded), checks that both
paths agree, and optionally times a full 3D reconstruction in two
subprocesses with ``MINKPROBE_DISABLE_NUMBA`` unset and set.

    python benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from minkprobe import _kernels as K
from minkprobe.geometry import cube, dual_hull
from minkprobe.measures import empirical_measure, sample_normals, zero_mean_project_radial
from minkprobe.nets import circle_net, icosphere


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(rng):
    pts = rng.normal(size=(2000, 3))
    dirs = icosphere(4)[0]
    atoms = rng.normal(size=(400, 3))
    atoms /= np.linalg.norm(atoms, axis=1)[:, None]
    coef = rng.normal(size=400)
    n2 = circle_net(2000, 0.3) * 1.0
    w2 = rng.random(2000)
    supp = rng.random((3000, 64))
    mu = zero_mean_project_radial(empirical_measure(sample_normals(cube(), 300, 0, 0.05)))
    prim, simp = dual_hull(mu.directions, np.ones(len(mu)))
    return {
        "support_max": ((pts, dirs), K.support_max_numpy, K.support_max_numba),
        "hinge_sums": ((dirs, atoms, coef), K.hinge_sums_numpy, K.hinge_sums_numba),
        "rotundity_2d": ((n2, w2), K.rotundity_2d_numpy, K.rotundity_2d_numba),
        "greedy_farthest": ((supp, 0.35), K.greedy_farthest_numpy, K.greedy_farthest_numba),
        "facet_areas_3d": ((prim, simp.astype(np.int64), mu.directions),
                           K.facet_areas_3d_numpy, K.facet_areas_3d_numba),
    }


def _agree(a, b):
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return a.shape == b.shape and np.allclose(a, b, rtol=1e-9, atol=1e-12)


SCRIPT = """
import time
from minkprobe.geometry import cube
from minkprobe.measures import empirical_measure, sample_normals, zero_mean_project_radial
from minkprobe.minkowski import reconstruct_3d
c = cube().scale(6 ** -0.5)
mu = zero_mean_project_radial(empirical_measure(sample_normals(c, 300, 0, 0.05)))
reconstruct_3d(mu, max_iter=5)
t = time.perf_counter()
r = reconstruct_3d(mu)
print(time.perf_counter() - t, r.iterations)
"""


def end_to_end():
    out = {}
    for name, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, MINKPROBE_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True,
                             text=True, check=True)
        secs, iters = res.stdout.split()
        out[name] = (float(secs), int(iters))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}  agree")
    for name, (inp, f_np, f_nb) in cases(rng).items():
        t_np, r_np = best_of(f_np, inp, args.repeat)
        t_nb, r_nb = best_of(f_nb, inp, args.repeat)
        print(f"{name:<18}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}  {_agree(r_np, r_nb)}")
    if args.end_to_end:
        res = end_to_end()
        print("\nreconstruct_3d, noisy cube N=300")
        for name, (secs, iters) in res.items():
            print(f"  {name:<6} {secs:8.2f} s  ({iters} iterations)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
