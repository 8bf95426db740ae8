"""Solvency cones, their polars, lineality spaces and constitution values.

Cones are kept in generator form (what strategies decompose over); polars
are kept as the inequality list ``y >= 0, g.y >= 0`` (what dual variables
must satisfy).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import (
    CycleArbitrage,
    DimensionMismatch,
    NegativeCost,
    NonPositivePrice,
    NotMarketCone,
    UnboundedBelow,
    ValidationError,
)
from .lp import FLOAT, RATIONAL, LpProblem, Optimal, Unbounded, check_mode, solve_lp
from .numeric import Vector, as_fraction, as_vector, dot, independent_subset, unit
from .tree import EventTree


@dataclass(frozen=True)
class SolvencyCone:
    """Finitely generated cone ``K = cone(generators)`` in ``R^d``.

    ``exchanges`` maps generator positions to ``(i, j)`` asset pairs when the
    cone was built from prices and costs; ``None`` for raw generator cones.
    """

    d: int
    generators: tuple[Vector, ...]
    prices: Vector | None = None
    costs: tuple[Vector, ...] | None = None
    exchanges: Mapping[int, tuple[int, int]] | None = None

    @property
    def is_market(self) -> bool:
        return self.exchanges is not None

    def rate(self, i: int, j: int) -> Fraction:
        """Units of asset ``i`` paid per unit of asset ``j`` received."""
        if self.prices is None or self.costs is None:
            raise NotMarketCone("cone has no price/cost provenance")
        return self.prices[j] / self.prices[i] * (1 + self.costs[i][j])


@dataclass(frozen=True)
class PolarCone:
    """``K* = {y : a.y >= 0 for every a in inequalities}``."""

    d: int
    inequalities: tuple[Vector, ...]

    def contains(self, y: Sequence, tol: float = 0) -> bool:
        if len(y) != self.d:
            raise DimensionMismatch(f"expected a vector of length {self.d}")
        return all(dot(a, y) >= -tol for a in self.inequalities)

    def violations(self, y: Sequence) -> list[int]:
        return [k for k, a in enumerate(self.inequalities) if dot(a, y) < 0]


def _validate_market(S: Sequence, lam: Sequence[Sequence]) -> tuple[Vector, tuple[Vector, ...]]:
    S = as_vector(S)
    d = len(S)
    if d < 2:
        raise ValidationError("a market needs at least two assets")
    if any(s <= 0 for s in S):
        raise NonPositivePrice(f"prices must be strictly positive, got {S}")
    lam = tuple(as_vector(r) for r in lam)
    if len(lam) != d or any(len(r) != d for r in lam):
        raise DimensionMismatch(f"cost matrix must be {d}x{d}")
    for i in range(d):
        if lam[i][i] != 0:
            raise ValidationError(f"cost matrix diagonal entry ({i},{i}) must be zero")
        for j in range(d):
            if lam[i][j] < 0:
                raise NegativeCost(f"cost ({i},{j}) is negative")
    return S, lam


def cone_from_market(S: Sequence, lam: Sequence[Sequence]) -> SolvencyCone:
    """Currency-market cone ``R^d_+ + cone{pi^ij e_i - e_j}``.

    ``pi^ij = (S^j / S^i)(1 + lam^ij)`` units of asset ``i`` buy one unit of
    asset ``j``.
    """
    S, lam = _validate_market(S, lam)
    d = len(S)
    gens = [unit(d, i) for i in range(d)]
    exchanges = {}
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            pi = S[j] / S[i] * (1 + lam[i][j])
            g = [Fraction(0)] * d
            g[i] = pi
            g[j] = Fraction(-1)
            exchanges[len(gens)] = (i, j)
            gens.append(tuple(g))
    return SolvencyCone(d, tuple(gens), S, lam, exchanges)


def bid_ask_costs(lam, mu) -> tuple[Vector, Vector]:
    """Two-asset cost matrix for ask factor ``1+lam`` and bid factor ``1-mu``.

    Buying asset 2 costs ``S2 (1+lam)`` units of asset 1, selling it yields
    ``S2 (1-mu)``; the latter is a currency-market cost ``mu / (1-mu)``.
    """
    lam, mu = as_fraction(lam), as_fraction(mu)
    if not 0 <= mu < 1:
        raise ValidationError(f"bid cost mu must lie in [0, 1), got {mu}")
    if lam < 0:
        raise NegativeCost(f"ask cost lam is negative: {lam}")
    return (Fraction(0), lam), (mu / (1 - mu), Fraction(0))


def bid_ask_cone(S2, lam, mu) -> SolvencyCone:
    """Cone ``{x : x1 + S2[(1-mu) x2^+ - (1+lam) x2^-] >= 0}`` with asset 1 as cash."""
    return cone_from_market((Fraction(1), as_fraction(S2)), bid_ask_costs(lam, mu))


def cone_from_generators(generators: Sequence[Sequence]) -> SolvencyCone:
    gens = tuple(as_vector(g) for g in generators)
    if not gens:
        raise ValidationError("a cone needs at least one generator")
    d = len(gens[0])
    if any(len(g) != d for g in gens):
        raise DimensionMismatch("generators have different lengths")
    if any(all(v == 0 for v in g) for g in gens):
        raise ValidationError("zero generator")
    cone = SolvencyCone(d, gens)
    for i in range(d):
        if not cone_contains(cone, unit(d, i)):
            raise ValidationError(f"cone must contain the unit vector e_{i + 1}")
    return cone


def polar_constraints(cone: SolvencyCone) -> PolarCone:
    rows: list[Vector] = [unit(cone.d, i) for i in range(cone.d)]
    seen = set(rows)
    for g in cone.generators:
        if g not in seen:
            seen.add(g)
            rows.append(g)
    return PolarCone(cone.d, tuple(rows))


def decompose(cone: SolvencyCone, x: Sequence, mode: str = RATIONAL):
    """Nonnegative generator coefficients ``c`` with ``x = sum c_g g``, or None."""
    check_mode(mode)
    x = as_vector(x)
    if len(x) != cone.d:
        raise DimensionMismatch(f"expected a vector of length {cone.d}, got {len(x)}")
    lp = LpProblem("min")
    cols = lp.add_vars(len(cone.generators))
    for i in range(cone.d):
        lp.add_row({k: g[i] for k, g in zip(cols, cone.generators)}, "=", x[i])
    res = solve_lp(lp, mode)
    return res.x if isinstance(res, Optimal) else None


def cone_contains(cone: SolvencyCone, x: Sequence, mode: str = RATIONAL) -> bool:
    x = as_vector(x)
    if len(x) != cone.d:
        raise DimensionMismatch(f"expected a vector of length {cone.d}, got {len(x)}")
    if all(v == 0 for v in x):
        return True
    return decompose(cone, x, mode) is not None


def lineality_basis(cone: SolvencyCone) -> list[Vector]:
    """Basis of ``K ∩ (-K)``.

    The lineality space is a face of ``K``, so it is spanned by the
    generators whose negatives also lie in ``K``.
    """
    two_sided = [g for g in cone.generators if cone_contains(cone, tuple(-v for v in g))]
    return [two_sided[i] for i in independent_subset(two_sided)]


def constitution_value(cone: SolvencyCone, x: Sequence, mode: str = RATIONAL,
                       direction: Sequence | None = None):
    """``min{c : c * direction - x in K}``; ``direction`` defaults to asset 1."""
    x = as_vector(x)
    if len(x) != cone.d:
        raise DimensionMismatch(f"expected a vector of length {cone.d}, got {len(x)}")
    e = unit(cone.d, 0) if direction is None else as_vector(direction)
    lp = LpProblem("min")
    c = lp.add_var(cost=1, lower=None)
    w = lp.add_vars(len(cone.generators))
    for i in range(cone.d):
        coeffs = {c: e[i]}
        coeffs.update({k: -g[i] for k, g in zip(w, cone.generators)})
        lp.add_row(coeffs, "=", x[i])
    res = solve_lp(lp, mode)
    if isinstance(res, Unbounded):
        raise UnboundedBelow("constitution value is unbounded below; cone generators are malformed")
    if not isinstance(res, Optimal):
        raise ValidationError("no multiple of the direction dominates x")
    return res.value


# -- transaction cost tightening ------------------------------------------------

def _min_product_closure(rates: list[list], mode: str):
    d = len(rates)
    if mode == FLOAT:
        arr = np.array([[float(v) for v in r] for r in rates])
        np.fill_diagonal(arr, 1.0)
        return _kernels.floyd_warshall(arr).tolist()
    dist = [list(r) for r in rates]
    for i in range(d):
        dist[i][i] = min(dist[i][i], Fraction(1))
    for k in range(d):
        for i in range(d):
            dik = dist[i][k]
            for j in range(d):
                v = dik * dist[k][j]
                if v < dist[i][j]:
                    dist[i][j] = v
    return dist


def tighten_rates(rates: Sequence[Sequence], mode: str = RATIONAL):
    """Cheapest multi-hop exchange rates; raises on money-making cycles."""
    check_mode(mode)
    R = [as_vector(r) for r in rates]
    d = len(R)
    if any(len(r) != d for r in R):
        raise DimensionMismatch("rate matrix must be square")
    if any(v <= 0 for i, r in enumerate(R) for j, v in enumerate(r) if i != j):
        raise NonPositivePrice("exchange rates must be strictly positive")
    dist = _min_product_closure(R, mode)
    tol = 1e-12 if mode == FLOAT else 0
    for i in range(d):
        if dist[i][i] < 1 - tol:
            raise CycleArbitrage(f"a cycle through asset {i + 1} multiplies wealth by {1 / dist[i][i]}")
    return dist


def tighten_costs(lam: Sequence[Sequence], S: Sequence, mode: str = RATIONAL):
    """Effective costs obtained by routing exchanges through other assets."""
    S, lam = _validate_market(S, lam)
    d = len(S)
    rates = [[S[j] / S[i] * (1 + lam[i][j]) if i != j else Fraction(1) for j in range(d)]
             for i in range(d)]
    dist = tighten_rates(rates, mode)
    if mode == FLOAT:
        return tuple(tuple(0.0 if i == j else dist[i][j] * float(S[i] / S[j]) - 1.0
                           for j in range(d)) for i in range(d))
    return tuple(tuple(Fraction(0) if i == j else dist[i][j] * S[i] / S[j] - 1
                       for j in range(d)) for i in range(d))


# -- markets -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Market:
    """An event tree with one solvency cone per node (indexed like the tree)."""

    tree: EventTree
    cones: tuple[SolvencyCone, ...]

    def __post_init__(self):
        if len(self.cones) != len(self.tree):
            raise DimensionMismatch("need exactly one cone per tree node")
        ds = {c.d for c in self.cones}
        if len(ds) != 1:
            raise DimensionMismatch("cones have different dimensions")

    @property
    def d(self) -> int:
        return self.cones[0].d

    def cone(self, node) -> SolvencyCone:
        return self.cones[self.tree.locate(node)]

    @property
    def is_market(self) -> bool:
        return all(c.is_market for c in self.cones)

    def polars(self) -> list[PolarCone]:
        return [polar_constraints(c) for c in self.cones]

    def tightened(self) -> "Market":
        if not self.is_market:
            raise NotMarketCone("tightening needs price/cost cones")
        return Market(self.tree, tuple(
            cone_from_market(c.prices, tighten_costs(c.costs, c.prices)) for c in self.cones))


def _per_node(tree: EventTree, values, name: str) -> list:
    if isinstance(values, Mapping):
        missing = [i for i in tree.ids if i not in values]
        if missing:
            raise ValidationError(f"{name} missing for nodes {missing[:5]}")
        return [values[i] for i in tree.ids]
    values = list(values)
    if len(values) != len(tree):
        raise DimensionMismatch(f"{name}: expected {len(tree)} entries, got {len(values)}")
    return values


def market_from_prices(tree: EventTree, prices, costs) -> Market:
    """``prices``/``costs`` are per-node mappings (by id) or sequences (by index).

    ``costs`` may also be a single ``d x d`` matrix used at every node.
    """
    P = _per_node(tree, prices, "prices")
    if not isinstance(costs, Mapping) and len(costs) and not isinstance(costs[0][0], (list, tuple)):
        C = [costs] * len(tree)
    else:
        C = _per_node(tree, costs, "costs")
    return Market(tree, tuple(cone_from_market(s, c) for s, c in zip(P, C)))


def bid_ask_market(tree: EventTree, S2, lam, mu) -> Market:
    """Two-asset market with cash as asset 1; scalars apply to every node."""
    def expand(v, name):
        if isinstance(v, (Mapping, list, tuple)):
            return _per_node(tree, v, name)
        return [v] * len(tree)

    return Market(tree, tuple(
        bid_ask_cone(s, l, m)
        for s, l, m in zip(expand(S2, "S2"), expand(lam, "lam"), expand(mu, "mu"))))


def market_from_generators(tree: EventTree, generators) -> Market:
    G = _per_node(tree, generators, "generators")
    return Market(tree, tuple(cone_from_generators(g) for g in G))
