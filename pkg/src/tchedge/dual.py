"""Dual side: consistent dual processes, stopping-time prices and certificates.

Normalisation used throughout: dual processes are scaled so that the
asset-1 component of the aggregate at the root equals one.  This loses no
generality because ``e_1`` is interior to every solvency cone, hence
``y^1 > 0`` for every nonzero ``y`` of the polar, and the zero process
contributes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cones import Market, cone_contains, constitution_value, lineality_basis, polar_constraints
from .errors import ArbitrageDetected, DimensionMismatch, SolverError
from .lp import FLOAT, RATIONAL, LpProblem, Optimal, check_mode, solve_lp
from .numeric import Vector, as_vector, dot, nullspace, unit
from .primal import Claim, HedgeResult, _check_dims, superhedge_price
from .tree import DEFAULT_STOPPING_CAP, EventTree, StoppingTime, count_stopping_times, enumerate_stopping_times

EXACT_THETA_LIMIT = 32
THETA_SCREEN_MARGIN = 1e-7


def aggregate(tree: EventTree, Z: Sequence[Sequence]) -> list[tuple]:
    """``Zbar(n) = Z(n) + sum_children p(c) Zbar(c)``, i.e. E[sum_{s>=t} Z_s | F_t]."""
    out: list = [None] * len(tree)
    for n in reversed(range(len(tree))):
        acc = list(Z[n])
        for c in tree.children[n]:
            p = tree.probs[c]
            acc = [a + p * b for a, b in zip(acc, out[c])]
        out[n] = tuple(acc)
    return out


@dataclass
class DualProcess:
    Z: list[tuple]
    Zbar: list[tuple] = field(default_factory=list)

    @classmethod
    def build(cls, tree: EventTree, Z: Sequence[Sequence]) -> "DualProcess":
        Z = [tuple(z) for z in Z]
        return cls(Z, aggregate(tree, Z))

    def expectation(self, tree: EventTree, claim: Claim):
        P = tree.unconditional()
        return sum((P[n] * dot(claim[n], self.Z[n]) for n in range(len(tree))), 0 * P[0])


def _d_constraints(lp: LpProblem, market: Market, zvars: list[list[int]]) -> None:
    """Rows ``g.Z(n) >= 0`` and ``g.Zbar(n) >= 0`` for non-unit polar rows."""
    tree = market.tree
    d = market.d
    units = {unit(d, i) for i in range(d)}
    for n in range(len(tree)):
        ineqs = [a for a in polar_constraints(market.cones[n]).inequalities if a not in units]
        for a in ineqs:
            lp.add_row({zvars[n][i]: a[i] for i in range(d)}, ">=", 0)
        if tree.children[n]:
            cond = tree.conditional_from(n)
            for a in ineqs:
                coeffs = {}
                for m, p in cond.items():
                    for i in range(d):
                        if a[i]:
                            coeffs[zvars[m][i]] = p * a[i]
                lp.add_row(coeffs, ">=", 0)


@dataclass
class DualResult:
    value: object
    process: DualProcess


def dual_price(market: Market, claim: Claim, mode: str = RATIONAL) -> DualResult:
    """``max E[sum theta.Z]`` over dual processes with ``Zbar(root)^1 = 1``."""
    _check_dims(market, claim)
    check_mode(mode)
    tree = market.tree
    d = market.d
    P = tree.unconditional()
    lp = LpProblem("max")
    zvars = [[lp.add_var(cost=P[n] * claim[n][i]) for i in range(d)] for n in range(len(tree))]
    _d_constraints(lp, market, zvars)
    lp.add_row({zvars[n][0]: P[n] for n in range(len(tree))}, "=", 1)
    res = solve_lp(lp, mode)
    if not isinstance(res, Optimal):
        raise ArbitrageDetected(f"dual price LP is {res.status}: no consistent dual process")
    Z = [tuple(res.x[v] for v in row) for row in zvars]
    return DualResult(res.value, DualProcess.build(tree, Z))


def is_consistent_dual(market: Market, Z, tol: float = 0) -> bool:
    """``Z(n)`` and ``Zbar(n)`` in the polar at every node (exact when tol=0)."""
    tree = market.tree
    if isinstance(Z, DualProcess):
        Z = Z.Z
    if len(Z) != len(tree):
        raise DimensionMismatch("dual process needs one vector per node")
    Zbar = aggregate(tree, Z)
    for n, cone in enumerate(market.cones):
        polar = polar_constraints(cone)
        if not (polar.contains(Z[n], tol) and polar.contains(Zbar[n], tol)):
            return False
    return True


@dataclass
class NaCertificate:
    epsilon: object
    process: DualProcess | None

    @property
    def arbitrage_free(self) -> bool:
        return self.process is not None


def strictly_positive_cps(market: Market, mode: str = RATIONAL) -> NaCertificate:
    """Largest ``eps`` with a dual process ``Z >= eps`` componentwise, ``sum Z^1 = 1``."""
    check_mode(mode)
    tree = market.tree
    d = market.d
    lp = LpProblem("max")
    zvars = [lp.add_vars(d) for _ in range(len(tree))]
    eps = lp.add_var(cost=1)
    _d_constraints(lp, market, zvars)
    for row in zvars:
        for v in row:
            lp.add_row({v: 1, eps: -1}, ">=", 0)
    lp.add_row({row[0]: 1 for row in zvars}, "=", 1)
    res = solve_lp(lp, mode)
    if not isinstance(res, Optimal):
        raise SolverError(f"positivity LP is {res.status}")
    if res.value > 0:
        Z = [tuple(res.x[v] for v in row) for row in zvars]
        return NaCertificate(res.value, DualProcess.build(tree, Z))
    return NaCertificate(res.value, None)


# -- stopping-time dual ------------------------------------------------------------

@dataclass
class ThetaResult:
    value: object
    stopping_time: StoppingTime
    process: list[tuple]  # martingale consistent price system attaining the value
    count: int


def _martingale_lp(market: Market):
    tree = market.tree
    d = market.d
    lp = LpProblem("max")
    zvars = [lp.add_vars(d) for _ in range(len(tree))]
    units = {unit(d, i) for i in range(d)}
    for n in range(len(tree)):
        for a in polar_constraints(market.cones[n]).inequalities:
            if a not in units:
                lp.add_row({zvars[n][i]: a[i] for i in range(d)}, ">=", 0)
        if tree.children[n]:
            for i in range(d):
                coeffs = {zvars[n][i]: 1}
                for c in tree.children[n]:
                    coeffs[zvars[c][i]] = -tree.probs[c]
                lp.add_row(coeffs, "=", 0)
    lp.add_row({zvars[0][0]: 1}, "=", 1)
    return lp, zvars


def _stopped_value(market, claim, lp, zvars, tau: StoppingTime, P, mode):
    lp.objective = [0] * lp.n
    for n in tau.stops:
        for i in range(market.d):
            lp.objective[zvars[n][i]] = P[n] * claim[n][i]
    return solve_lp(lp, mode)


def theta_price(market: Market, claim: Claim, cap: int = DEFAULT_STOPPING_CAP,
                mode: str = RATIONAL) -> ThetaResult:
    """``max_tau max_Z E[Z_tau . theta_tau]`` over martingale price systems with ``Z_0^1 = 1``.

    In rational mode with many stopping times, candidates are screened with
    float LPs and only those within a small margin of the best float value
    are re-solved exactly.
    """
    _check_dims(market, claim)
    check_mode(mode)
    tree = market.tree
    taus = enumerate_stopping_times(tree, cap)
    P = tree.unconditional()
    lp, zvars = _martingale_lp(market)

    if mode == RATIONAL and len(taus) > EXACT_THETA_LIMIT:
        screened = []
        for tau in taus:
            res = _stopped_value(market, claim, lp, zvars, tau, P, FLOAT)
            if not isinstance(res, Optimal):
                raise ArbitrageDetected("no martingale consistent price system exists")
            screened.append(res.value)
        top = max(screened)
        margin = THETA_SCREEN_MARGIN * (1 + abs(top))
        candidates = [t for t, v in zip(taus, screened) if v >= top - margin]
    else:
        candidates = taus

    best = None
    for tau in candidates:
        res = _stopped_value(market, claim, lp, zvars, tau, P, mode)
        if not isinstance(res, Optimal):
            raise ArbitrageDetected("no martingale consistent price system exists")
        if best is None or res.value > best[0]:
            best = (res.value, tau, res.x)
    value, tau, x = best
    Z = [tuple(x[v] for v in row) for row in zvars]
    return ThetaResult(value, tau, Z, len(taus))


def is_martingale_cps(market: Market, Z: Sequence[Sequence], tol: float = 0) -> bool:
    tree = market.tree
    for n in range(len(tree)):
        if not polar_constraints(market.cones[n]).contains(Z[n], tol):
            return False
        if tree.children[n]:
            for i in range(market.d):
                s = sum(tree.probs[c] * Z[c][i] for c in tree.children[n])
                if abs(s - Z[n][i]) > tol:
                    return False
    return True


# -- reports and counterexamples ------------------------------------------------------

@dataclass
class GapReport:
    h_primal: object
    h_dual: object
    h_theta: object | None
    gap: object | None  # h_primal - h_theta
    primal: HedgeResult
    dual: DualResult
    theta: ThetaResult | None


def duality_gap_report(market: Market, claim: Claim, mode: str = RATIONAL,
                       cap: int = DEFAULT_STOPPING_CAP, with_theta: bool = True) -> GapReport:
    primal = superhedge_price(market, claim, mode)
    dual = dual_price(market, claim, mode)
    tol = 0 if mode == RATIONAL else 1e-7 * (1 + abs(primal.value))
    if abs(primal.value - dual.value) > tol:
        raise SolverError(f"primal {primal.value} and dual {dual.value} prices disagree")
    theta = theta_price(market, claim, cap, mode) if with_theta else None
    h_theta = None if theta is None else theta.value
    gap = None if theta is None else primal.value - theta.value
    return GapReport(primal.value, dual.value, h_theta, gap, primal, dual, theta)


def build_counterexample_claim(market: Market, x: Sequence) -> Claim:
    """Claim paying ``c_0(x)`` units of asset 1 at the root and ``x`` afterwards."""
    x = as_vector(x)
    c0 = constitution_value(market.cones[0], x)
    root = tuple(c0 * v for v in unit(market.d, 0))
    return Claim(tuple(root if n == 0 else x for n in range(len(market.tree))))


@dataclass
class CounterexampleConditions:
    c0: Fraction
    c1: dict  # child id -> constitution value at time 1
    cond_ii: bool
    cond_i_sufficient: bool
    efficient_at_root: bool


def check_counterexample_conditions(market: Market, x: Sequence) -> CounterexampleConditions:
    """Decides condition (ii) and the sufficient test for condition (i).

    The general condition (i) is not decided; ``cond_i_sufficient`` is the
    test "no free two-way exchange at the root, ``x`` is not a multiple of
    asset 1, and the constitution value of ``x`` rises on some time-1 node".
    """
    x = as_vector(x)
    tree = market.tree
    K0 = market.cones[0]
    c0 = constitution_value(K0, x)
    diff = tuple(a - c0 * b for a, b in zip(x, unit(market.d, 0)))
    cond_ii = not cone_contains(K0, diff)
    efficient = not lineality_basis(K0)
    c1 = {tree.ids[n]: constitution_value(market.cones[n], x) for n in tree.children[0]}
    rises = any(v > c0 for v in c1.values())
    nonzero = any(v != 0 for v in diff)
    return CounterexampleConditions(c0, c1, cond_ii, efficient and nonzero and rises, efficient)


@dataclass
class NullStrategyReport:
    holds: bool
    node: object = None  # id of the node where a violation was found
    value: object = None
    transfers: list | None = None


def check_null_strategy_property(market: Market, mode: str = RATIONAL) -> NullStrategyReport:
    """Tests: transfers in -K summing to zero on every path lie in the lineality spaces.

    For each node ``n`` and each ``w`` spanning the orthogonal complement of
    the lineality space at ``n``, maximise ``+-w.xi(n)`` over box-normalised
    null strategies; any positive optimum is a violation.
    """
    check_mode(mode)
    tree = market.tree
    d = market.d
    lp = LpProblem("max")
    cvars = [lp.add_vars(len(c.generators), upper=1) for c in market.cones]
    for leaf in tree.leaves:
        path = tree.path(leaf)
        for i in range(d):
            coeffs = {}
            for m in path:
                for k, g in zip(cvars[m], market.cones[m].generators):
                    if g[i]:
                        coeffs[k] = -g[i]
            lp.add_row(coeffs, "=", 0)
    tol = 0 if mode == RATIONAL else 1e-9
    for n in range(len(tree)):
        gens = market.cones[n].generators
        lin = lineality_basis(market.cones[n])
        for w in nullspace(lin, d):
            for s in (1, -1):
                lp.objective = [0] * lp.n
                for k, g in zip(cvars[n], gens):
                    lp.objective[k] = -s * dot(w, g)
                res = solve_lp(lp, mode)
                if not isinstance(res, Optimal):
                    raise SolverError(f"null-strategy LP is {res.status}")
                if res.value > tol:
                    xi = [tuple(-sum(res.x[k] * g[i] for k, g in zip(cvars[m], market.cones[m].generators))
                                for i in range(d)) for m in range(len(tree))]
                    return NullStrategyReport(False, tree.ids[n], res.value, xi)
    return NullStrategyReport(True)
