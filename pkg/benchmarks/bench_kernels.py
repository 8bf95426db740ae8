"""Compare the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Also times a full float-mode dual LP with the JIT switched on and off.
"""

import argparse
import random
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from tchedge import _kernels  # noqa: E402
from tchedge.dual import dual_price  # noqa: E402
from tchedge.lp import FLOAT  # noqa: E402
from instances import random_claim, random_market  # noqa: E402


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def tableau(seed, m, n):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0.0, 1.0, size=(m, n))
    T = np.hstack([A, np.eye(m), np.ones((m, 1))])
    cost = np.concatenate([-rng.uniform(0.5, 1.5, size=n), np.zeros(m + 1)])
    return T, np.arange(n, n + m, dtype=np.int64), cost


def simplex_case(m, n, use_jit):
    T0, b0, c0 = tableau(m * 7 + n, m, n)
    ok = np.ones(T0.shape[1] - 1, dtype=np.bool_)
    art = np.zeros(T0.shape[1] - 1, dtype=np.bool_)

    def go():
        _kernels.simplex_loop(T0.copy(), b0.copy(), c0.copy(), ok, art, False, False, 1e-9, 100_000,
                              use_jit=use_jit)
    return go


def fw_case(d, use_jit):
    rng = np.random.default_rng(d)
    S = rng.uniform(0.5, 2.0, size=d)
    R = np.outer(1 / S, S) * (1 + rng.uniform(0, 0.3, size=(d, d)))
    np.fill_diagonal(R, 1.0)
    return lambda: _kernels.floyd_warshall(R, use_jit=use_jit)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _kernels.JIT_ENABLED:
        print("numba unavailable or TCHEDGE_DISABLE_JIT set; only the numpy path can run")
        return 1

    rows = []
    for m, n in [(20, 40), (80, 160), (200, 400)]:
        simplex_case(m, n, True)()  # compile
        rows.append((f"simplex {m}x{n}", best_of(simplex_case(m, n, True), args.repeat),
                     best_of(simplex_case(m, n, False), args.repeat)))
    for d in (8, 32, 128):
        fw_case(d, True)()
        rows.append((f"floyd-warshall d={d}", best_of(fw_case(d, True), args.repeat),
                     best_of(fw_case(d, False), args.repeat)))

    rng = random.Random(1)
    market = random_market(rng, d=3, horizon=3, max_branch=3)
    while len(market.tree) < 30:
        market = random_market(rng, d=3, horizon=3, max_branch=3)
    claim = random_claim(rng, market.tree, 3)
    dual_price(market, claim, FLOAT)
    jit_lp = best_of(lambda: dual_price(market, claim, FLOAT), args.repeat)
    _kernels.JIT_ENABLED = False
    try:
        np_lp = best_of(lambda: dual_price(market, claim, FLOAT), args.repeat)
    finally:
        _kernels.JIT_ENABLED = True
    rows.append((f"dual LP, {len(market.tree)} nodes", jit_lp, np_lp))

    print(f"{'case':<28}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, a, b in rows:
        print(f"{name:<28}{a * 1e3:>12.3f}{b * 1e3:>12.3f}{b / a:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
