"""Super-hedging prices and strategies for American claims.

A strategy is a transfer process ``xi`` with ``xi(n) in -K(n)``; it is
parameterised by nonnegative generator coefficients, ``xi(n) = -sum c_g g``,
so every LP solution carries its own membership witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .cones import Market, cone_contains
from .errors import (
    ArbitrageDetected,
    DimensionMismatch,
    InfeasibleClaim,
    MissingNode,
    NotMarketCone,
    UnknownNode,
    ValidationError,
)
from .lp import RATIONAL, Infeasible, LpProblem, Optimal, Unbounded, check_mode, solve_lp
from .numeric import Vector, as_vector, unit
from .tree import EventTree


@dataclass(frozen=True)
class Claim:
    """American claim: one vector of asset quantities per node (index order)."""

    values: tuple[Vector, ...]

    @property
    def d(self) -> int:
        return len(self.values[0])

    def __getitem__(self, n: int) -> Vector:
        return self.values[n]

    @classmethod
    def from_mapping(cls, tree: EventTree, mapping: Mapping) -> "Claim":
        unknown = [k for k in mapping if k not in tree.index]
        if unknown:
            raise UnknownNode(f"claim refers to unknown nodes {unknown[:5]}")
        missing = [i for i in tree.ids if i not in mapping]
        if missing:
            raise MissingNode(f"claim has no value for nodes {missing[:5]}")
        return cls.from_sequence(tree, [mapping[i] for i in tree.ids])

    @classmethod
    def from_sequence(cls, tree: EventTree, values: Sequence) -> "Claim":
        if len(values) != len(tree):
            raise DimensionMismatch(f"claim needs {len(tree)} node values, got {len(values)}")
        vals = tuple(as_vector(v) for v in values)
        if len({len(v) for v in vals}) != 1:
            raise DimensionMismatch("claim vectors have different lengths")
        return cls(vals)

    @classmethod
    def zeros(cls, tree: EventTree, d: int) -> "Claim":
        return cls(tuple((Fraction(0),) * d for _ in range(len(tree))))

    def scaled(self, a) -> "Claim":
        return Claim(tuple(tuple(a * v for v in vec) for vec in self.values))

    def shifted(self, vec: Sequence) -> "Claim":
        vec = as_vector(vec)
        return Claim(tuple(tuple(a + b for a, b in zip(v, vec)) for v in self.values))

    def as_mapping(self, tree: EventTree) -> dict:
        return {tree.ids[n]: v for n, v in enumerate(self.values)}


def _check_dims(market: Market, claim: Claim) -> None:
    if len(claim.values) != len(market.tree):
        raise DimensionMismatch("claim and market trees differ in size")
    if claim.d != market.d:
        raise DimensionMismatch(f"claim has {claim.d} assets, market has {market.d}")


@dataclass
class TransferPlan:
    """Initial holdings, per-node transfers and their generator witnesses."""

    initial: tuple
    transfers: list[tuple]  # xi(n)
    coefficients: list[dict[int, object]]  # generator index -> c >= 0, xi = -sum c g
    slack: list[dict[int, object]] = field(default_factory=list)  # V - theta = sum w g
    portfolio: list[tuple] = field(default_factory=list)  # V(n), post-transfer

    def verify(self, market: Market, claim: Claim | None = None, nodes=None, mode=RATIONAL) -> bool:
        """Independent re-check through cone membership LPs.

        Checks ``-xi(n) in K(n)`` everywhere and, when ``claim`` is given,
        ``V(n) - claim(n) in K(n)`` on ``nodes`` (default: all nodes).
        """
        tree = market.tree
        for n in range(len(tree)):
            if not cone_contains(market.cones[n], tuple(-v for v in self.transfers[n]), mode):
                return False
        if claim is not None:
            for n in (range(len(tree)) if nodes is None else nodes):
                gap = tuple(a - b for a, b in zip(self.portfolio[n], claim[n]))
                if not cone_contains(market.cones[n], gap, mode):
                    return False
        return True


@dataclass
class HedgeResult:
    value: object
    plan: TransferPlan


def _hedge_lp(market: Market, claim: Claim, dominated: Sequence[int], x=None, direction=None):
    """LP over (alpha, c, w); alpha is absent when ``x`` is fixed."""
    tree = market.tree
    d = market.d
    lp = LpProblem("min")
    alpha = None
    if x is None:
        alpha = lp.add_var(cost=1, lower=None)
        e = unit(d, 0) if direction is None else as_vector(direction)
        if len(e) != d:
            raise DimensionMismatch("direction has the wrong length")
    else:
        x = as_vector(x)
        if len(x) != d:
            raise DimensionMismatch("initial holdings have the wrong length")
    cvars = [lp.add_vars(len(market.cones[n].generators)) for n in range(len(tree))]
    wvars = {n: lp.add_vars(len(market.cones[n].generators)) for n in dominated}
    for n in dominated:
        path = tree.path(n)
        for i in range(d):
            coeffs: dict[int, object] = {}
            if alpha is not None and e[i]:
                coeffs[alpha] = e[i]
            for m in path:
                for k, g in zip(cvars[m], market.cones[m].generators):
                    if g[i]:
                        coeffs[k] = -g[i]
            for k, g in zip(wvars[n], market.cones[n].generators):
                if g[i]:
                    coeffs[k] = -g[i]
            rhs = claim[n][i] if x is None else claim[n][i] - x[i]
            lp.add_row(coeffs, "=", rhs)
    return lp, alpha, cvars, wvars


def _plan(market: Market, sol: Sequence, initial, cvars, wvars) -> TransferPlan:
    tree = market.tree
    d = market.d
    zero = 0 * initial[0]
    coefs, transfers = [], []
    for n in range(len(tree)):
        gens = market.cones[n].generators
        cn = {k: sol[v] for k, v in enumerate(cvars[n]) if sol[v]}
        coefs.append(cn)
        transfers.append(tuple(-sum((c * gens[k][i] for k, c in cn.items()), zero) for i in range(d)))
    portfolio = [None] * len(tree)
    for n in range(len(tree)):
        base = initial if n == 0 else portfolio[tree.parents[n]]
        portfolio[n] = tuple(a + b for a, b in zip(base, transfers[n]))
    slack = [
        {k: sol[v] for k, v in enumerate(wvars[n]) if sol[v]} if n in wvars else {}
        for n in range(len(tree))
    ]
    return TransferPlan(tuple(initial), transfers, coefs, slack, portfolio)


def _solve_hedge(market, claim, dominated, mode, direction=None):
    _check_dims(market, claim)
    check_mode(mode)
    lp, alpha, cvars, wvars = _hedge_lp(market, claim, dominated, direction=direction)
    res = solve_lp(lp, mode)
    if isinstance(res, Unbounded):
        raise ArbitrageDetected("super-hedging price is unbounded below: the market admits arbitrage")
    if isinstance(res, Infeasible):
        raise InfeasibleClaim("claim cannot be super-hedged; check that cones contain R^d_+")
    e = unit(market.d, 0) if direction is None else as_vector(direction)
    conv = Fraction if mode == RATIONAL else float
    initial = tuple(res.value * conv(v) for v in e)
    return HedgeResult(res.value, _plan(market, res.x, initial, cvars, wvars))


def superhedge_price(market: Market, claim: Claim, mode: str = RATIONAL, direction=None) -> HedgeResult:
    """Minimal ``a`` such that ``a * direction`` super-hedges ``claim`` at every node.

    ``direction`` defaults to one unit of asset 1.
    """
    return _solve_hedge(market, claim, range(len(market.tree)), mode, direction)


def european_price(market: Market, payoff, mode: str = RATIONAL) -> HedgeResult:
    """Super-hedging price of a payoff delivered at the horizon only.

    ``payoff`` is a mapping leaf id -> vector, or a :class:`Claim` whose
    leaf values are used.
    """
    tree = market.tree
    leaves = tree.leaves
    if isinstance(payoff, Claim):
        claim = payoff
    else:
        unknown = [k for k in payoff if k not in tree.index or tree.index[k] not in leaves]
        if unknown:
            raise UnknownNode(f"payoff refers to non-leaf or unknown nodes {unknown[:5]}")
        zero = (Fraction(0),) * market.d
        claim = Claim.from_sequence(tree, [
            payoff[tree.ids[n]] if n in leaves else zero for n in range(len(tree))])
    return _solve_hedge(market, claim, leaves, mode)


def gamma_contains(market: Market, claim: Claim, x: Sequence, mode: str = RATIONAL):
    """Whether holdings ``x`` super-hedge ``claim``; returns ``(bool, plan or None)``."""
    _check_dims(market, claim)
    check_mode(mode)
    lp, _, cvars, wvars = _hedge_lp(market, claim, range(len(market.tree)), x=x)
    res = solve_lp(lp, mode)
    if not isinstance(res, Optimal):
        return False, None
    conv = Fraction if mode == RATIONAL else float
    x = tuple(conv(v) for v in as_vector(x))
    return True, _plan(market, res.x, x, cvars, wvars)


@dataclass
class Exchanges:
    """``eta[i][j]``: units of asset ``j`` bought with asset ``i`` at node ``n``."""

    eta: list[list[list]]
    disposal: list[tuple]


def extract_exchanges(plan: TransferPlan, market: Market) -> Exchanges:
    if not market.is_market:
        raise NotMarketCone("exchange extraction needs price/cost cones")
    d = market.d
    etas, disposals = [], []
    for n, coefs in enumerate(plan.coefficients):
        cone = market.cones[n]
        zero = 0 * next(iter(coefs.values()), Fraction(0))
        eta = [[zero] * d for _ in range(d)]
        disposal = [zero] * d
        for k, c in coefs.items():
            if k in cone.exchanges:
                i, j = cone.exchanges[k]
                eta[i][j] += c
            else:
                i = next(i for i, v in enumerate(cone.generators[k]) if v)
                disposal[i] += c
        etas.append(eta)
        disposals.append(tuple(disposal))
    return Exchanges(etas, disposals)


def exchange_balance(ex: Exchanges, market: Market, n: int) -> tuple:
    """Net position change ``sum_j (eta^ji - eta^ij pi^ij)`` at node ``n``."""
    cone = market.cones[n]
    d = market.d
    eta = ex.eta[n]
    return tuple(
        sum((eta[j][i] - eta[i][j] * cone.rate(i, j) for j in range(d) if j != i), 0 * eta[0][0])
        for i in range(d))
