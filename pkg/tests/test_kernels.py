import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from minkprobe import _kernels as K
from minkprobe.geometry import dual_hull, random_polytope

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def unit(rng, n, d):
    x = rng.normal(size=(n, d))
    return x / np.linalg.norm(x, axis=1)[:, None]


@given(seed=st.integers(0, 2**32 - 1), d=st.sampled_from([2, 3, 4]),
       n=st.integers(1, 300), m=st.integers(1, 200))
def test_support_and_hinge_parity(seed, d, n, m):
    rng = np.random.default_rng(seed)
    pts, dirs, atoms = rng.normal(size=(m, d)), unit(rng, n, d), unit(rng, m, d)
    coef = rng.normal(size=m)
    # fused multiply-adds may change the last bit
    a, b = K.support_max_numpy(pts, dirs), K.support_max_numba(pts, dirs)
    assert np.allclose(a, b, rtol=1e-14, atol=1e-14 * np.abs(pts).max())
    a, b = K.hinge_sums_numpy(dirs, atoms, coef), K.hinge_sums_numba(dirs, atoms, coef)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(coef).sum())


@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 60))
def test_rotundity_parity(seed, k):
    rng = np.random.default_rng(seed)
    n, w = unit(rng, k, 2), rng.uniform(0.01, 1, k)
    (va, ta), (vb, tb) = K.rotundity_2d_numpy(n, w), K.rotundity_2d_numba(n, w)
    assert va == pytest.approx(vb, abs=1e-12 * w.sum())


@given(seed=st.integers(0, 2**32 - 1), eps=st.floats(0.05, 0.8))
def test_greedy_parity(seed, eps):
    rng = np.random.default_rng(seed)
    supp = rng.random((int(rng.integers(1, 300)), 16))
    assert np.array_equal(K.greedy_farthest_numpy(supp, eps), K.greedy_farthest_numba(supp, eps))


def test_facet_area_parity(rng):
    for _ in range(20):
        p = random_polytope(rng, 3)
        n = p.facet_normals
        h = p.facet_offsets - n @ p.centroid
        prim, simp = dual_hull(n, h)
        a = K.facet_areas_3d_numpy(prim, simp.astype(np.int64), n)
        b = K.facet_areas_3d_numba(prim, simp.astype(np.int64), n)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-15)
        assert np.allclose(a, p.facet_areas, rtol=1e-9)


def test_env_flag_selects_numpy():
    code = "from minkprobe import _kernels as K; print(K.BACKEND)"
    env = dict(os.environ, MINKPROBE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
    env["MINKPROBE_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numba"


def test_numpy_path_end_to_end():
    code = ("from minkprobe.geometry import random_polytope, min_translate_hausdorff\n"
            "from minkprobe.measures import surface_area_measure\n"
            "from minkprobe.minkowski import reconstruct_3d\n"
            "import numpy as np\n"
            "p = random_polytope(np.random.default_rng(1), 3)\n"
            "r = reconstruct_3d(surface_area_measure(p))\n"
            "print(r.converged, min_translate_hausdorff(p, r.body)[0] <= 1e-3 * p.diameter)")
    env = dict(os.environ, MINKPROBE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.split() == ["True", "True"], out.stderr
