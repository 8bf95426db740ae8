import os
import subprocess
import sys

import numpy as np
import pytest

from tchedge import _kernels
from tchedge.lp import FLOAT, _solve_float_std, _standardize, solve_lp
from test_lp import small_max


def random_tableau(rng, m, n):
    """Feasible standard-form tableau with a slack basis."""
    A = rng.integers(-3, 5, size=(m, n)).astype(float)
    b = rng.integers(0, 10, size=m).astype(float)
    T = np.hstack([A, np.eye(m), b[:, None]])
    cost = np.concatenate([rng.integers(-5, 3, size=n).astype(float), np.zeros(m), [0.0]])
    basis = np.arange(n, n + m, dtype=np.int64)
    return T, basis, cost


@pytest.mark.skipif(not _kernels.JIT_ENABLED, reason="numba disabled")
@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("bland", [True, False])
def test_simplex_loop_jit_matches_numpy(seed, bland):
    rng = np.random.default_rng(seed)
    T, basis, cost = random_tableau(rng, int(rng.integers(2, 8)), int(rng.integers(2, 8)))
    n = T.shape[1] - 1
    enter_ok = np.ones(n, dtype=np.bool_)
    is_art = np.zeros(n, dtype=np.bool_)
    out = []
    for use_jit in (True, False):
        T2, b2, c2 = T.copy(), basis.copy(), cost.copy()
        status, it, j = _kernels.simplex_loop(T2, b2, c2, enter_ok, is_art, False, bland, 1e-9, 1000,
                                              use_jit=use_jit)
        out.append((status, it, j, T2, b2, c2))
    (s1, i1, j1, T1, b1, c1), (s2, i2, j2, T2, b2, c2) = out
    assert (s1, i1, j1) == (s2, i2, j2)
    assert np.array_equal(b1, b2)
    assert np.allclose(T1, T2, atol=1e-9) and np.allclose(c1, c2, atol=1e-9)


def test_simplex_loop_reports_unbounded():
    # max x (min -x) with x - y <= 1: x can grow along with y
    T = np.array([[1.0, -1.0, 1.0, 1.0]])
    cost = np.array([-1.0, 0.0, 0.0, 0.0])
    basis = np.array([2], dtype=np.int64)
    ok = np.ones(3, dtype=np.bool_)
    art = np.zeros(3, dtype=np.bool_)
    for use_jit in (True, False):
        status, _, j = _kernels.simplex_loop(T.copy(), basis.copy(), cost.copy(), ok, art, False, True,
                                             1e-9, 100, use_jit=use_jit)
        assert status == _kernels.STATUS_UNBOUNDED and j == 1


@pytest.mark.parametrize("seed", range(10))
def test_floyd_warshall_jit_matches_numpy(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 7))
    S = rng.uniform(0.5, 2.0, size=d)
    R = np.outer(1 / S, S) * (1 + rng.uniform(0, 0.5, size=(d, d)))
    np.fill_diagonal(R, 1.0)
    a = _kernels.floyd_warshall(R, use_jit=True)
    b = _kernels.floyd_warshall(R, use_jit=False)
    assert np.allclose(a, b, rtol=1e-14)
    # closure property: no two-hop route is cheaper
    for k in range(d):
        assert np.all(a <= np.outer(a[:, k], a[k, :]) * (1 + 1e-12))


def test_float_solver_same_with_and_without_jit(monkeypatch):
    ref = solve_lp(small_max(), FLOAT)
    monkeypatch.setattr(_kernels, "JIT_ENABLED", False)
    assert solve_lp(small_max(), FLOAT).x == pytest.approx(ref.x)
    std = _standardize(small_max())
    assert _solve_float_std(std, True, 1e-9, 100)[0] == "optimal"


def test_env_flag_disables_jit():
    env = dict(os.environ, TCHEDGE_DISABLE_JIT="1")
    out = subprocess.run([sys.executable, "-c", "import tchedge._kernels as k; print(k.JIT_ENABLED)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
