"""Float hot loops: dense simplex pivoting and min-product Floyd-Warshall.

Each kernel exists as a numba ``@njit`` function and as a plain numpy
function with identical semantics.  The jitted versions are used unless
numba is missing or ``TCHEDGE_DISABLE_JIT`` is set to a truthy value.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FLAG = os.environ.get("TCHEDGE_DISABLE_JIT", "").strip().lower()
JIT_ENABLED = numba is not None and _FLAG not in ("1", "true", "yes", "on")

STATUS_OPTIMAL = 0
STATUS_UNBOUNDED = 1
STATUS_ITERATION_LIMIT = 2
STATUS_STALLED = 3  # too many consecutive degenerate pivots


def _simplex_loop_py(T, basis, cost, enter_ok, is_art, drive_art, bland, tol, max_iter, stall_limit):
    m = T.shape[0]
    n = T.shape[1] - 1
    it = 0
    streak = 0
    while True:
        cand = np.flatnonzero(enter_ok & (cost[:n] < -tol))
        if cand.size == 0:
            return STATUS_OPTIMAL, it, -1
        if it >= max_iter:
            return STATUS_ITERATION_LIMIT, it, -1
        j = cand[0] if bland else cand[np.argmin(cost[cand])]
        col = T[:, j]
        r = -1
        if drive_art:
            art_rows = np.flatnonzero(is_art[basis] & (np.abs(col) > tol))
            if art_rows.size:
                r = art_rows[np.argmin(basis[art_rows])]
        if r < 0:
            rows = np.flatnonzero(col > tol)
            if rows.size == 0:
                return STATUS_UNBOUNDED, it, j
            # Harris: bound the step with relaxed ratios, then take the largest pivot
            theta = ((T[rows, n] + tol) / col[rows]).min()
            ok = rows[T[rows, n] / col[rows] <= theta]
            r = ok[np.argmax(col[ok])]
        if T[r, n] <= tol:
            streak += 1
            if stall_limit > 0 and streak > stall_limit:
                return STATUS_STALLED, it, -1
        else:
            streak = 0
        T[r] /= T[r, j]
        f = T[:, j].copy()
        f[r] = 0.0
        T -= np.outer(f, T[r])
        np.maximum(T[:, n], 0.0, out=T[:, n])
        cost -= cost[j] * T[r]
        basis[r] = j
        it += 1


def _floyd_warshall_py(rates):
    dist = rates.copy()
    d = dist.shape[0]
    for k in range(d):
        dist = np.minimum(dist, np.outer(dist[:, k], dist[k, :]))
    return dist


if numba is not None:

    @numba.njit(cache=True)
    def _simplex_loop_jit(T, basis, cost, enter_ok, is_art, drive_art, bland, tol, max_iter, stall_limit):
        m = T.shape[0]
        n = T.shape[1] - 1
        it = 0
        streak = 0
        while True:
            j = -1
            best_cost = -tol
            for k in range(n):
                if enter_ok[k] and cost[k] < best_cost:
                    j = k
                    if bland:
                        break
                    best_cost = cost[k]
            if j < 0:
                return STATUS_OPTIMAL, it, -1
            if it >= max_iter:
                return STATUS_ITERATION_LIMIT, it, -1
            r = -1
            if drive_art:
                for i in range(m):
                    if is_art[basis[i]] and abs(T[i, j]) > tol:
                        if r < 0 or basis[i] < basis[r]:
                            r = i
            if r < 0:
                theta = np.inf
                for i in range(m):
                    if T[i, j] > tol:
                        v = (T[i, n] + tol) / T[i, j]
                        if v < theta:
                            theta = v
                if theta == np.inf:
                    return STATUS_UNBOUNDED, it, j
                big = 0.0
                for i in range(m):
                    if T[i, j] > tol and T[i, n] / T[i, j] <= theta and T[i, j] > big:
                        big = T[i, j]
                        r = i
            if T[r, n] <= tol:
                streak += 1
                if stall_limit > 0 and streak > stall_limit:
                    return STATUS_STALLED, it, -1
            else:
                streak = 0
            piv = T[r, j]
            for k in range(n + 1):
                T[r, k] /= piv
            for i in range(m):
                if i != r:
                    f = T[i, j]
                    if f != 0.0:
                        for k in range(n + 1):
                            T[i, k] -= f * T[r, k]
                        if T[i, n] < 0.0:
                            T[i, n] = 0.0
            f = cost[j]
            if f != 0.0:
                for k in range(n + 1):
                    cost[k] -= f * T[r, k]
            basis[r] = j
            it += 1

    @numba.njit(cache=True)
    def _floyd_warshall_jit(rates):
        dist = rates.copy()
        d = dist.shape[0]
        for k in range(d):
            for i in range(d):
                dik = dist[i, k]
                for j in range(d):
                    v = dik * dist[k, j]
                    if v < dist[i, j]:
                        dist[i, j] = v
        return dist

else:  # pragma: no cover
    _simplex_loop_jit = _simplex_loop_py
    _floyd_warshall_jit = _floyd_warshall_py


def simplex_loop(T, basis, cost, enter_ok, is_art, drive_art=False, bland=True, tol=1e-9,
                 max_iter=100_000, stall_limit=0, use_jit=None):
    """Run primal simplex pivots in place on a dense tableau.

    ``T`` is ``m x (n+1)`` with the right-hand side in the last column and
    ``cost`` the reduced-cost row (last entry minus the objective value).
    ``stall_limit > 0`` stops after that many consecutive degenerate pivots.
    Returns ``(status, iterations, entering_column_if_unbounded)``.
    """
    fn = _simplex_loop_jit if (JIT_ENABLED if use_jit is None else use_jit) else _simplex_loop_py
    status, it, j = fn(T, basis, cost, enter_ok, is_art, drive_art, bland, tol, max_iter, stall_limit)
    return int(status), int(it), int(j)


def floyd_warshall(rates, use_jit=None):
    """All-pairs minimal products of positive exchange rates."""
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    fn = _floyd_warshall_jit if (JIT_ENABLED if use_jit is None else use_jit) else _floyd_warshall_py
    return fn(rates)
