import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tchedge.cones import (
    bid_ask_cone,
    bid_ask_costs,
    cone_contains,
    cone_from_generators,
    cone_from_market,
    constitution_value,
    decompose,
    lineality_basis,
    market_from_generators,
    polar_constraints,
    tighten_costs,
    tighten_rates,
)
from tchedge.errors import (
    CycleArbitrage,
    DimensionMismatch,
    NegativeCost,
    NonPositivePrice,
    NotMarketCone,
    ValidationError,
)
from tchedge.lp import FLOAT
from tchedge.numeric import dot, nullspace
from tchedge.tree import deterministic_tree
from instances import random_costs, triangle_violating_costs

F = Fraction


def test_symmetric_cost_polar_band():
    cone = cone_from_market((1, 1), [[0, F(1, 10)], [F(1, 10), 0]])
    polar = polar_constraints(cone)
    # y2/1.1 <= y1 <= 1.1 y2
    assert polar.contains((F(11, 10), 1))
    assert polar.contains((1, F(11, 10)))
    assert polar.contains((1, 1))
    assert not polar.contains((F(12, 10), 1))
    assert not polar.contains((1, F(12, 10)))
    assert not polar.contains((1, -F(1, 100)))


def test_generators_and_rates():
    cone = cone_from_market((2, 5), [[0, F(1, 4)], [0, 0]])
    assert cone.rate(0, 1) == F(5, 2) * F(5, 4)
    assert cone.rate(1, 0) == F(2, 5)
    assert (F(25, 8), -1) in cone.generators
    assert cone.exchanges[2] == (0, 1)


def test_membership():
    cone = bid_ask_cone(1, F(1, 10), F(1, 10))
    assert cone_contains(cone, (1, 0)) and cone_contains(cone, (0, 1))
    assert cone_contains(cone, (F(11, 10), -1))
    assert not cone_contains(cone, (F(109, 100), -1))
    assert cone_contains(cone, (F(-9, 10), 1))
    assert not cone_contains(cone, (F(-91, 100), 1))
    assert not cone_contains(cone, (-1, 0))
    assert cone_contains(cone, (0, 0))
    assert cone_contains(cone, (1.1, -1), FLOAT)


def test_decompose_returns_a_witness():
    cone = bid_ask_cone(3, F(1, 5), F(1, 10))
    x = (10, -2)
    c = decompose(cone, x)
    assert tuple(sum(ck * g[i] for ck, g in zip(c, cone.generators)) for i in range(2)) == (10, -2)
    assert all(v >= 0 for v in c)


@given(st.fractions(0, 1).filter(lambda v: v < 1), st.fractions(0, 2), st.fractions(F(1, 10), 10),
       st.tuples(st.integers(-20, 20), st.integers(-20, 20)))
@settings(max_examples=60, deadline=None)
def test_bid_ask_cone_matches_half_spaces(mu, lam, S2, x):
    cone = bid_ask_cone(S2, lam, mu)
    inside = x[0] + (1 + lam) * S2 * x[1] >= 0 and x[0] + (1 - mu) * S2 * x[1] >= 0
    assert cone_contains(cone, x) == inside


def test_lineality():
    free = cone_from_market((1, 2, 4), [[0] * 3] * 3)
    assert len(lineality_basis(free)) == 2
    assert lineality_basis(bid_ask_cone(1, F(1, 10), F(1, 10))) == []
    # asset 3 trades freely against asset 1, asset 2 does not
    m = F(1, 9)
    partial = cone_from_market((1, 1, 1), [[0, F(1, 10), 0], [m, 0, m], [0, F(1, 10), 0]])
    basis = lineality_basis(partial)
    assert len(basis) == 1
    v = basis[0]
    assert v[1] == 0 and v[0] == -v[2]
    assert len(nullspace(basis, 3)) == 2


def test_constitution_value():
    assert constitution_value(bid_ask_cone(1, F(1, 10), F(1, 10)), (0, 1)) == F(11, 10)
    assert constitution_value(bid_ask_cone(1, F(1, 2), F(1, 10)), (0, 1)) == F(3, 2)
    assert constitution_value(bid_ask_cone(1, F(1, 2), F(1, 10)), (0, -1)) == F(-9, 10)
    assert constitution_value(bid_ask_cone(2, 0, 0), (3, 0)) == 3
    with pytest.raises(DimensionMismatch):
        constitution_value(bid_ask_cone(1, 0, 0), (1, 2, 3))


def test_cone_from_generators_requires_orthant():
    cone_from_generators([(1, 0), (0, 1), (2, -1)])
    with pytest.raises(ValidationError):
        cone_from_generators([(1, 0), (2, -1)])
    with pytest.raises(ValidationError):
        cone_from_generators([(0, 0), (1, 0), (0, 1)])
    market = market_from_generators(deterministic_tree(1), [[(1, 0), (0, 1)]] * 2)
    with pytest.raises(NotMarketCone):
        market.tightened()


@pytest.mark.parametrize("S, lam, exc", [
    ((1, 0), [[0, 0], [0, 0]], NonPositivePrice),
    ((1, 1), [[0, -F(1, 10)], [0, 0]], NegativeCost),
    ((1, 1), [[0, 0]], DimensionMismatch),
    ((1, 1), [[1, 0], [0, 0]], ValidationError),
    ((1,), [[0]], ValidationError),
])
def test_market_validation(S, lam, exc):
    with pytest.raises(exc):
        cone_from_market(S, lam)


def test_bid_ask_validation():
    with pytest.raises(ValidationError):
        bid_ask_costs(0, 1)
    with pytest.raises(NegativeCost):
        bid_ask_costs(-1, 0)


def test_tighten_costs_known_case():
    # direct 1->2 costs 1, but 1->3->2 costs (1.1)(1.1) - 1 = 0.21
    lam = [[0, 1, F(1, 10)], [0, 0, 0], [0, F(1, 10), 0]]
    tight = tighten_costs(lam, (1, 1, 1))
    assert tight[0][1] == F(21, 100)
    assert tight[0][2] == F(1, 10)
    assert tighten_costs(tight, (1, 1, 1)) == tight


def test_cycle_arbitrage():
    with pytest.raises(CycleArbitrage):
        tighten_rates([[1, F(1, 2)], [F(3, 2), 1]])
    with pytest.raises(CycleArbitrage):
        tighten_rates([[1, 0.5], [1.5, 1]], FLOAT)
    with pytest.raises(NonPositivePrice):
        tighten_rates([[1, 0], [1, 1]])


def test_tightening_preserves_the_cone():
    rng = random.Random(7)
    for _ in range(20):
        d = rng.randint(2, 4)
        S = tuple(F(rng.randint(50, 200), 100) for _ in range(d))
        lam = triangle_violating_costs(rng, d)
        tight = tighten_costs(lam, S)
        assert tighten_costs(tight, S) == tight
        assert all(tight[i][j] <= lam[i][j] for i in range(d) for j in range(d))
        a, b = cone_from_market(S, lam), cone_from_market(S, tight)
        # every generator of either cone lies in the other
        assert all(cone_contains(b, g) for g in a.generators)
        assert all(cone_contains(a, g) for g in b.generators)
        ftight = tighten_costs(lam, S, FLOAT)
        assert all(abs(ftight[i][j] - float(tight[i][j])) < 1e-12 for i in range(d) for j in range(d))


def test_polar_is_dual_of_generators():
    rng = random.Random(3)
    for _ in range(10):
        d = rng.randint(2, 3)
        S = tuple(F(rng.randint(50, 200), 100) for _ in range(d))
        cone = cone_from_market(S, random_costs(rng, d))
        polar = polar_constraints(cone)
        y = S  # frictionless prices are always consistent
        assert polar.contains(y)
        assert all(dot(g, y) >= 0 for g in cone.generators)
        assert polar.violations((1,) + (0,) * (d - 2) + (-1,)) != []
