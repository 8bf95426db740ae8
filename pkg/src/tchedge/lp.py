"""Dense/sparse simplex LP kernel with exact rational and float modes.

Rational mode runs a revised simplex over exact rationals (gmpy2 ``mpq``
when available), with a sparse LU of the basis and eta-file updates.  By
default it is started from the final basis of a float tableau solve; the
exact phase then certifies that basis (usually with zero extra pivots) or
keeps pivoting until it is exactly optimal.  Every reported rational
result is therefore exact regardless of the float warm start.

Float mode runs the dense tableau kernel in :mod:`tchedge._kernels`.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import IterationLimit, NumericalBreakdown, ValidationError

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = Fraction

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
DEGENERATE_SWITCH = 50  # consecutive degenerate pivots before Dantzig falls back to Bland
REFACTOR_EVERY = 64

_RELATIONS = {"<=": "<=", "=": "=", "==": "=", ">=": ">="}


def to_q(v):
    """Exact internal rational from int/Fraction/float/mpq."""
    if isinstance(v, Fraction):
        return _mpq(v.numerator, v.denominator)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValidationError(f"non-finite coefficient {v}")
        return _mpq(Fraction(v).numerator, Fraction(v).denominator)
    return _mpq(v)


def to_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    return Fraction(int(q.numerator), int(q.denominator))


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValidationError(f"unknown scalar mode {mode!r}; use 'rational' or 'float'")
    return mode


# -- problem description -----------------------------------------------------

@dataclass
class Row:
    coeffs: dict[int, Any]
    relation: str
    rhs: Any


@dataclass
class LpProblem:
    """Linear program ``min/max c.x`` over rows ``a.x (<=|=|>=) b`` and bounds.

    ``lower[j] is None`` means unbounded below, ``upper[j] is None`` means
    unbounded above.  Rows are sparse ``{column: coefficient}`` mappings.
    """

    sense: str = "min"
    objective: list = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    lower: list = field(default_factory=list)
    upper: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.objective)

    def add_var(self, cost=0, lower=0, upper=None) -> int:
        self.objective.append(cost)
        self.lower.append(lower)
        self.upper.append(upper)
        return len(self.objective) - 1

    def add_vars(self, count: int, cost=0, lower=0, upper=None) -> list[int]:
        return [self.add_var(cost, lower, upper) for _ in range(count)]

    def add_row(self, coeffs: Mapping[int, Any] | Sequence, relation: str, rhs) -> int:
        if not isinstance(coeffs, Mapping):
            coeffs = {j: a for j, a in enumerate(coeffs)}
        rel = _RELATIONS.get(relation)
        if rel is None:
            raise ValidationError(f"unknown relation {relation!r}")
        self.rows.append(Row({j: a for j, a in coeffs.items() if a != 0}, rel, rhs))
        return len(self.rows) - 1

    def validate(self) -> None:
        if self.sense not in ("min", "max"):
            raise ValidationError(f"unknown sense {self.sense!r}")
        n = self.n
        if len(self.lower) != n or len(self.upper) != n:
            raise ValidationError("bounds and objective differ in length")
        for i, row in enumerate(self.rows):
            for j in row.coeffs:
                if not 0 <= j < n:
                    raise ValidationError(f"row {i} references column {j} outside 0..{n - 1}")
        for j in range(n):
            lo, hi = self.lower[j], self.upper[j]
            if lo is not None and hi is not None and lo > hi:
                raise ValidationError(f"variable {j} has lower bound above upper bound")


# -- outcomes ------------------------------------------------------------------

@dataclass
class Optimal:
    value: Any
    x: list
    duals: list
    reduced_costs: list
    iterations: int = 0
    status: str = "optimal"


@dataclass
class Infeasible:
    """``certificate[i]`` multiplies original row ``i`` (see :func:`verify_infeasibility`)."""

    certificate: list
    iterations: int = 0
    status: str = "infeasible"


@dataclass
class Unbounded:
    ray: list
    point: list
    iterations: int = 0
    status: str = "unbounded"


# -- standard form --------------------------------------------------------------

@dataclass
class _Standard:
    m: int
    cols: list[dict[int, Any]]  # std column -> {row: value}
    b: list
    c: list
    is_art: list[bool]
    unit_cols: list[int]
    var_map: list[tuple[Any, list[tuple[int, int]]]]  # original j -> (offset, [(col, sign)])
    row_sign: list[int]  # per original row
    n_orig_rows: int
    sense_sign: int  # +1 for min, -1 for max


def _standardize(prob: LpProblem) -> _Standard:
    prob.validate()
    zero = _mpq(0)
    cols: list[dict[int, Any]] = []
    c: list = []
    var_map = []
    bound_rows = []  # (std col, rhs)
    sense_sign = 1 if prob.sense == "min" else -1

    for j in range(prob.n):
        cj = to_q(prob.objective[j]) * sense_sign
        lo = None if prob.lower[j] is None else to_q(prob.lower[j])
        hi = None if prob.upper[j] is None else to_q(prob.upper[j])
        if lo is not None:
            k = len(cols)
            cols.append({})
            c.append(cj)
            var_map.append((lo, [(k, 1)]))
            if hi is not None:
                bound_rows.append((k, hi - lo))
        elif hi is not None:
            k = len(cols)
            cols.append({})
            c.append(-cj)
            var_map.append((hi, [(k, -1)]))
        else:
            k = len(cols)
            cols.extend(({}, {}))
            c.extend((cj, -cj))
            var_map.append((zero, [(k, 1), (k + 1, -1)]))

    rows: list[tuple[dict[int, Any], str, Any]] = []
    for row in prob.rows:
        rhs = to_q(row.rhs)
        coeffs: dict[int, Any] = {}
        for j, a in row.coeffs.items():
            a = to_q(a)
            off, parts = var_map[j]
            rhs -= a * off
            for k, s in parts:
                v = coeffs.get(k, zero) + a * s
                if v:
                    coeffs[k] = v
                else:
                    coeffs.pop(k, None)
        rows.append((coeffs, row.relation, rhs))
    for k, ub in bound_rows:
        rows.append(({k: _mpq(1)}, "<=", ub))

    m = len(rows)
    row_sign = []
    b = []
    slack_of_row: list[int | None] = []
    for i, (coeffs, rel, rhs) in enumerate(rows):
        # negate rows so that b >= 0; a ">= 0" row is negated too so its slack is a unit column
        sign = -1 if rhs < 0 or (rhs == 0 and rel == ">=") else 1
        row_sign.append(sign)
        b.append(rhs * sign)
        for k, a in coeffs.items():
            cols[k][i] = a * sign
        if rel == "=":
            slack_of_row.append(None)
        else:
            k = len(cols)
            cols.append({i: _mpq(sign if rel == "<=" else -sign)})
            c.append(zero)
            slack_of_row.append(k)

    is_art = [False] * len(cols)
    unit_cols = []
    for i in range(m):
        k = slack_of_row[i]
        if k is not None and cols[k][i] == 1:
            unit_cols.append(k)
        else:
            k = len(cols)
            cols.append({i: _mpq(1)})
            c.append(zero)
            is_art.append(True)
            unit_cols.append(k)
    return _Standard(m, cols, b, c, is_art, unit_cols, var_map,
                     row_sign[: len(prob.rows)], len(prob.rows), sense_sign)


# -- exact sparse LU with eta updates -------------------------------------------

class SingularBasis(Exception):
    pass


class _SparseLU:
    """Exact LU of a square sparse matrix given by columns ``{row: value}``."""

    def __init__(self, columns: Sequence[Mapping[int, Any]], m: int):
        rows = [dict() for _ in range(m)]
        colrows = [set() for _ in range(m)]
        for k, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    rows[i][k] = v
                    colrows[k].add(i)
        active = set(range(m))
        self.ops: list[tuple[int, list[tuple[int, Any]]]] = []
        self.piv: list[tuple[int, int]] = []
        for _ in range(m):
            q = min(active, key=lambda k: len(colrows[k]))
            if not colrows[q]:
                raise SingularBasis()
            p = min(colrows[q], key=lambda i: len(rows[i]))
            prow = rows[p]
            pv = prow[q]
            elim = []
            for i in list(colrows[q]):
                if i == p:
                    continue
                ri = rows[i]
                f = ri[q] / pv
                elim.append((i, f))
                for k, v in prow.items():
                    if k == q:
                        del ri[q]
                        colrows[q].discard(i)
                        continue
                    nv = ri.get(k, 0) - f * v
                    if nv:
                        if k not in ri:
                            colrows[k].add(i)
                        ri[k] = nv
                    elif k in ri:
                        del ri[k]
                        colrows[k].discard(i)
            for k in prow:
                colrows[k].discard(p)
            active.discard(q)
            self.ops.append((p, elim))
            self.piv.append((p, q))
        self.U = rows
        self.Ucol: dict[int, list[tuple[int, Any]]] = {}
        for p, q in self.piv:
            for k, v in rows[p].items():
                if k != q:
                    self.Ucol.setdefault(k, []).append((p, v))
        self.m = m

    def solve(self, rhs: Sequence) -> list:
        v = list(rhs)
        for p, elim in self.ops:
            vp = v[p]
            if vp:
                for i, f in elim:
                    v[i] -= f * vp
        x = [0] * self.m
        for p, q in reversed(self.piv):
            s = v[p]
            for k, val in self.U[p].items():
                if k != q:
                    s -= val * x[k]
            x[q] = s / self.U[p][q]
        return x

    def solve_transpose(self, rhs: Sequence) -> list:
        w = [0] * self.m
        for p, q in self.piv:
            s = rhs[q]
            for pp, val in self.Ucol.get(q, ()):
                s -= val * w[pp]
            w[p] = s / self.U[p][q]
        for p, elim in reversed(self.ops):
            s = w[p]
            for i, f in elim:
                s -= f * w[i]
            w[p] = s
        return w


class _ExactBasis:
    def __init__(self, std: _Standard, basis: list[int]):
        self.std = std
        self.basis = list(basis)
        self.refactor()

    def refactor(self):
        self.lu = _SparseLU([self.std.cols[j] for j in self.basis], self.std.m)
        self.etas: list[tuple[int, list]] = []

    def ftran(self, rhs):
        x = self.lu.solve(rhs)
        for r, d in self.etas:
            xr = x[r] / d[r]
            if xr:
                for i, di in enumerate(d):
                    if di:
                        x[i] -= di * xr
            x[r] = xr
        return x

    def btran(self, rhs):
        w = list(rhs)
        for r, d in reversed(self.etas):
            s = w[r]
            for i, di in enumerate(d):
                if i != r and di:
                    s -= di * w[i]
            w[r] = s / d[r]
        return self.lu.solve_transpose(w)

    def column(self, j):
        v = [0] * self.std.m
        for i, a in self.std.cols[j].items():
            v[i] = a
        return v

    def replace(self, r, j, d):
        self.basis[r] = j
        self.etas.append((r, d))
        if len(self.etas) >= REFACTOR_EVERY:
            self.refactor()


def _exact_phase(eb: _ExactBasis, cost, allowed, drive_art, bland, max_iter):
    """Returns ``(status, xB, y, iterations, entering, direction)``.

    Dantzig pricing switches to Bland's rule for good after a long run of
    degenerate pivots, so both rules terminate.
    """
    std = eb.std
    xB = eb.ftran(std.b)
    it = 0
    streak = 0
    while True:
        y = eb.btran([cost[j] for j in eb.basis])
        in_basis = set(eb.basis)
        enter, best = -1, 0
        for j in range(len(std.cols)):
            if j in in_basis or not allowed[j]:
                continue
            dj = cost[j]
            for i, a in std.cols[j].items():
                dj -= y[i] * a
            if dj < best:
                enter, best = j, dj
                if bland:
                    break
        if enter < 0:
            return "optimal", xB, y, it, -1, None
        if it >= max_iter:
            raise IterationLimit(f"simplex exceeded {max_iter} pivots")
        d = eb.ftran(eb.column(enter))
        r = -1
        if drive_art:
            for k, dk in enumerate(d):
                if dk and std.is_art[eb.basis[k]] and (r < 0 or eb.basis[k] < eb.basis[r]):
                    r = k
        if r < 0:
            ratio = None
            for k, dk in enumerate(d):
                if dk > 0:
                    q = xB[k] / dk
                    if ratio is None or q < ratio or (q == ratio and eb.basis[k] < eb.basis[r]):
                        ratio, r = q, k
            if r < 0:
                return "unbounded", xB, y, it, enter, d
        theta = xB[r] / d[r]
        if theta:
            streak = 0
            for k, dk in enumerate(d):
                if dk:
                    xB[k] -= theta * dk
        else:
            streak += 1
            if streak > DEGENERATE_SWITCH:
                bland = True
        xB[r] = theta
        eb.replace(r, enter, d)
        it += 1


# -- result mapping --------------------------------------------------------------

def _map_x(std: _Standard, xstd: Sequence, with_offset=True, conv=None) -> list:
    out = []
    for off, parts in std.var_map:
        off = conv(off) if conv else off
        v = off if with_offset else 0 * off
        for k, s in parts:
            v = v + s * xstd[k]
        out.append(v)
    return out


def _row_duals(std: _Standard, ystd: Sequence) -> list:
    return [std.sense_sign * std.row_sign[i] * ystd[i] for i in range(std.n_orig_rows)]


def _reduced_costs(prob: LpProblem, duals: Sequence, conv) -> list:
    r = [conv(c) for c in prob.objective]
    for i, row in enumerate(prob.rows):
        yi = duals[i]
        if yi:
            for j, a in row.coeffs.items():
                r[j] -= yi * conv(a)
    return r


def _objective(prob: LpProblem, x: Sequence, conv):
    return sum((conv(c) * xj for c, xj in zip(prob.objective, x)), conv(0))


def _default_max_iter(prob: LpProblem) -> int:
    return 10 * (len(prob.rows) + prob.n) ** 2 + 100


# -- float path -------------------------------------------------------------------

def _float_tableau(std: _Standard):
    m, n = std.m, len(std.cols)
    T = np.zeros((m, n + 1))
    for j, col in enumerate(std.cols):
        for i, a in col.items():
            T[i, j] = float(a)
    T[:, n] = [float(v) for v in std.b]
    return T


def _dual_cleanup(T, basis, cost, enter_ok, tol, max_iter):
    """Dual simplex pivots until the right-hand side is nonnegative again."""
    n = T.shape[1] - 1
    for _ in range(max_iter):
        neg = np.flatnonzero(T[:, n] < -tol)
        if neg.size == 0:
            return True
        r = neg[np.argmin(T[neg, n])]
        cand = np.flatnonzero(enter_ok & (T[r, :n] < -tol))
        if cand.size == 0:
            return False
        ratios = np.maximum(cost[cand], 0.0) / -T[r, cand]
        j = cand[np.argmin(ratios)]
        T[r] /= T[r, j]
        f = T[:, j].copy()
        f[r] = 0.0
        T -= np.outer(f, T[r])
        cost -= cost[j] * T[r]
        basis[r] = j
    return False


def _run_phase(T, basis, cost, c, b, unit, enter_ok, is_art, drive_art, bland, tol, max_iter):
    """One simplex phase with a perturbation fallback against stalling.

    When a long run of degenerate pivots is detected, the basic solution is
    shifted by small random amounts and the phase continues.  Afterwards the
    true right-hand side is restored through ``B^-1`` (the columns of the
    initial unit basis) and any slightly negative entries are removed by dual
    simplex pivots.
    """
    m, n = T.shape[0], T.shape[1] - 1
    stall_limit = 2 * m + 50
    status, it, j = _kernels.simplex_loop(T, basis, cost, enter_ok, is_art, drive_art, bland, tol,
                                          max_iter, stall_limit)
    if status != _kernels.STATUS_STALLED:
        return status, it, j
    rng = np.random.default_rng(12345)
    scale = 1.0 + np.abs(T[:, n])
    shift = np.where(is_art[basis], 0.0, rng.uniform(0.5, 1.0, m) * 1e-7 * scale)
    T[:, n] += shift
    cost[n] -= cost[basis] @ shift  # cost[basis] is ~0; keeps the row consistent
    status, it2, j = _kernels.simplex_loop(T, basis, cost, enter_ok, is_art, drive_art, bland, tol,
                                           max_iter, 0)
    it += it2
    if status != _kernels.STATUS_OPTIMAL:
        return status, it, j
    T[:, n] = T[:, unit] @ b
    y = c[unit] - cost[unit]
    cost[n] = -(y @ b)
    if not _dual_cleanup(T, basis, cost, enter_ok, tol, max_iter):
        raise NumericalBreakdown("could not restore feasibility after anti-stalling perturbation")
    status, it3, j = _kernels.simplex_loop(T, basis, cost, enter_ok, is_art, drive_art, bland, tol,
                                           max_iter, 0)
    return status, it + it3, j


def _solve_float_std(std: _Standard, bland: bool, tol: float, max_iter: int):
    """Two-phase dense tableau solve.

    Returns ``(status, T, basis, y_phase, entering, iterations)`` where
    ``y_phase`` are the standard-form row duals of the last phase run.
    """
    m, n = std.m, len(std.cols)
    T = _float_tableau(std)
    b = T[:, n].copy()
    basis = np.array(std.unit_cols, dtype=np.int64)
    is_art = np.array(std.is_art, dtype=np.bool_)
    unit = np.array(std.unit_cols, dtype=np.int64)
    iters = 0
    if is_art.any():
        c1 = np.append(is_art.astype(np.float64), 0.0)
        cost = c1.copy()
        art_rows = is_art[basis]
        cost -= T[art_rows].sum(axis=0)
        status, it, j = _run_phase(T, basis, cost, c1, b, unit, ~is_art, is_art, False, bland, tol, max_iter)
        iters += it
        if status == _kernels.STATUS_ITERATION_LIMIT:
            raise IterationLimit(f"simplex exceeded {max_iter} pivots")
        if -cost[n] > FEAS_TOL * max(1.0, float(np.abs(T[:, n]).max(initial=0.0))):
            y = c1[unit] - cost[unit]
            return "infeasible", T, basis, y, -1, iters
    c = np.array([float(v) for v in std.c] + [0.0])
    cost = c - c[basis] @ T
    status, it, j = _run_phase(T, basis, cost, c, b, unit, ~is_art, is_art, True, bland, tol, max_iter)
    iters += it
    if status == _kernels.STATUS_ITERATION_LIMIT:
        raise IterationLimit(f"simplex exceeded {max_iter} pivots")
    y = c[unit] - cost[unit]
    if status == _kernels.STATUS_UNBOUNDED:
        return "unbounded", T, basis, y, j, iters
    return "optimal", T, basis, y, -1, iters


def _solve_float(prob: LpProblem, std: _Standard, bland: bool, tol: float, max_iter: int):
    status, T, basis, y, j, iters = _solve_float_std(std, bland, tol, max_iter)
    n = len(std.cols)
    xstd = np.zeros(n)
    xstd[basis] = T[:, n]
    if status == "infeasible":
        cert = [-std.row_sign[i] * float(y[i]) for i in range(std.n_orig_rows)]
        return Infeasible(cert, iters)
    x = _map_x(std, [float(v) for v in xstd], True, float)
    if status == "unbounded":
        ray = np.zeros(n)
        ray[j] = 1.0
        ray[basis] = -T[:, j]
        return Unbounded(_map_x(std, [float(v) for v in ray], False, float), x, iters)
    _check_float_solution(prob, x, tol)
    duals = [float(v) for v in _row_duals(std, list(y))]
    rc = _reduced_costs(prob, duals, float)
    return Optimal(_objective(prob, x, float), x, duals, rc, iters)


def _check_float_solution(prob: LpProblem, x, tol):
    scale = 1.0 + max((abs(v) for v in x), default=0.0)
    for i, row in enumerate(prob.rows):
        lhs = sum(float(a) * x[j] for j, a in row.coeffs.items())
        rhs = float(row.rhs)
        big = max((abs(float(a)) for a in row.coeffs.values()), default=0.0)
        slack = FEAS_TOL * (1.0 + abs(rhs) + big * scale) + tol
        if (row.relation == "<=" and lhs > rhs + slack) or (
            row.relation == ">=" and lhs < rhs - slack) or (
            row.relation == "=" and abs(lhs - rhs) > slack):
            raise NumericalBreakdown(
                f"float solution violates row {i} by {abs(lhs - rhs):.3g}; retry in rational mode")
    for j, v in enumerate(x):
        lo, hi = prob.lower[j], prob.upper[j]
        if (lo is not None and v < float(lo) - FEAS_TOL * scale) or (
                hi is not None and v > float(hi) + FEAS_TOL * scale):
            raise NumericalBreakdown(f"float solution violates bounds of variable {j}")


# -- exact path -----------------------------------------------------------------

def _seed_basis(std: _Standard, bland: bool, max_iter: int):
    try:
        return list(_solve_float_std(std, bland, PIVOT_TOL, max_iter)[2])
    except Exception:
        return None


def _solve_exact(prob: LpProblem, std: _Standard, bland: bool, max_iter: int, seed: bool):
    allowed = [not a for a in std.is_art]
    eb = None
    if seed:
        basis = _seed_basis(std, bland, max_iter)
        if basis is not None:
            try:
                cand = _ExactBasis(std, basis)
                if all(v >= 0 for v in cand.ftran(std.b)):
                    eb = cand
            except SingularBasis:
                eb = None
    if eb is None:
        eb = _ExactBasis(std, std.unit_cols)

    iters = 0
    zero = _mpq(0)
    if any(std.is_art[j] for j in eb.basis):
        cost1 = [_mpq(1) if a else zero for a in std.is_art]
        _, xB, y, it, _, _ = _exact_phase(eb, cost1, allowed, False, bland, max_iter)
        iters += it
        infeas = sum((xB[k] for k, j in enumerate(eb.basis) if std.is_art[j]), zero)
        if infeas > 0:
            cert = [to_fraction(-std.row_sign[i] * y[i]) for i in range(std.n_orig_rows)]
            return Infeasible(cert, iters)
    status, xB, y, it, enter, d = _exact_phase(eb, std.c, allowed, True, bland, max_iter)
    iters += it
    xstd = [zero] * len(std.cols)
    for k, j in enumerate(eb.basis):
        xstd[j] = xB[k]
    x = [to_fraction(v) for v in _map_x(std, xstd, True)]
    if status == "unbounded":
        ray = [zero] * len(std.cols)
        ray[enter] = _mpq(1)
        for k, j in enumerate(eb.basis):
            ray[j] = -d[k]
        return Unbounded([to_fraction(v) for v in _map_x(std, ray, False)], x, iters)
    duals = [to_fraction(v) for v in _row_duals(std, y)]
    rc = _reduced_costs(prob, duals, Fraction)
    return Optimal(_objective(prob, x, Fraction), x, duals, rc, iters)


_float_tol: contextvars.ContextVar[float] = contextvars.ContextVar("float_tol", default=PIVOT_TOL)


@contextlib.contextmanager
def float_tolerance(tol: float):
    """Override the default float-mode pivot/feasibility tolerance in a block."""
    if not tol > 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    token = _float_tol.set(float(tol))
    try:
        yield
    finally:
        _float_tol.reset(token)


def solve_lp(problem: LpProblem, mode: str = RATIONAL, *, pricing: str = "bland",
             tol: float | None = None, max_iter: int | None = None, seed: bool = True):
    """Solve ``problem``; returns :class:`Optimal`, :class:`Infeasible` or :class:`Unbounded`.

    ``pricing`` is ``"bland"`` (default, anti-cycling) or ``"dantzig"``.
    ``tol`` applies to float mode only (default 1e-9, see :func:`float_tolerance`).
    In rational mode ``seed=False`` disables the float warm start.
    """
    check_mode(mode)
    if tol is None:
        tol = _float_tol.get()
    if pricing not in ("bland", "dantzig"):
        raise ValidationError(f"unknown pricing rule {pricing!r}")
    bland = pricing == "bland"
    std = _standardize(problem)
    if max_iter is None:
        max_iter = _default_max_iter(problem)
    if mode == FLOAT:
        return _solve_float(problem, std, bland, tol, max_iter)
    return _solve_exact(problem, std, bland, max_iter, seed)


# -- verification helpers ----------------------------------------------------------

def row_activity(problem: LpProblem, i: int, x: Sequence):
    return sum(a * x[j] for j, a in problem.rows[i].coeffs.items())


def is_feasible(problem: LpProblem, x: Sequence, tol=0) -> bool:
    """Check rows and bounds; ``tol=0`` is an exact check for rational data."""
    for i, row in enumerate(problem.rows):
        lhs = row_activity(problem, i, x)
        if row.relation == "<=" and lhs > row.rhs + tol:
            return False
        if row.relation == ">=" and lhs < row.rhs - tol:
            return False
        if row.relation == "=" and abs(lhs - row.rhs) > tol:
            return False
    for j, v in enumerate(x):
        if problem.lower[j] is not None and v < problem.lower[j] - tol:
            return False
        if problem.upper[j] is not None and v > problem.upper[j] + tol:
            return False
    return True


def verify_infeasibility(problem: LpProblem, certificate: Sequence) -> bool:
    """Exact check of a Farkas certificate over the variable box.

    With ``u`` the certificate, every feasible ``x`` satisfies
    ``(sum u_i a_i).x <= sum u_i b_i`` (sign rules: ``u_i >= 0`` on ``<=``
    rows, ``<= 0`` on ``>=`` rows).  The certificate is valid when the
    minimum of the left side over the bounds exceeds the right side.
    """
    comb = [Fraction(0)] * problem.n
    rhs = Fraction(0)
    for u, row in zip(certificate, problem.rows):
        u = Fraction(u)
        if (row.relation == "<=" and u < 0) or (row.relation == ">=" and u > 0):
            return False
        rhs += u * Fraction(row.rhs)
        for j, a in row.coeffs.items():
            comb[j] += u * Fraction(a)
    low = Fraction(0)
    for j, r in enumerate(comb):
        if r > 0:
            if problem.lower[j] is None:
                return False
            low += r * Fraction(problem.lower[j])
        elif r < 0:
            if problem.upper[j] is None:
                return False
            low += r * Fraction(problem.upper[j])
    return low > rhs
