import random
from fractions import Fraction

import pytest

from tchedge.cones import bid_ask_market, market_from_prices
from tchedge.errors import ArbitrageDetected, DimensionMismatch, MissingNode, UnknownNode
from tchedge.lp import FLOAT
from tchedge.primal import (
    Claim,
    european_price,
    exchange_balance,
    extract_exchanges,
    gamma_contains,
    superhedge_price,
)
from tchedge.tree import deterministic_tree
from conftest import binomial_market, put_claim, snell_put
from instances import random_claim, random_market

F = Fraction


@pytest.mark.parametrize("T", [1, 2, 3, 4])
def test_frictionless_put_matches_snell(T):
    market = binomial_market(T)
    res = superhedge_price(market, put_claim(market))
    assert res.value == snell_put(T)
    assert res.plan.verify(market, put_claim(market))


def test_counterexample_price_and_strategy(ex1, ex1_claim):
    res = superhedge_price(ex1, ex1_claim)
    assert res.value == F(37, 30)
    plan = res.plan
    assert plan.initial == (F(37, 30), 0)
    assert plan.verify(ex1, ex1_claim)
    ex = extract_exchanges(plan, ex1)
    for n in range(2):
        assert exchange_balance(ex, ex1, n) == plan.transfers[n]
    # 2/3 units of asset 2 bought at the root, 1/3 more at time 1
    assert ex.eta[0][0][1] == F(2, 3)
    assert ex.eta[1][0][1] == F(1, 3)


def test_gamma_membership(ex1, ex1_claim):
    ok, plan = gamma_contains(ex1, ex1_claim, (F(37, 30), 0))
    assert ok and plan.verify(ex1, ex1_claim)
    assert not gamma_contains(ex1, ex1_claim, (F(11, 10), 0))[0]
    # holding the asset up front is another way in
    assert gamma_contains(ex1, ex1_claim, (F(11, 10), 1))[0]


def test_float_mode_agrees(ex1, ex1_claim):
    assert superhedge_price(ex1, ex1_claim, FLOAT).value == pytest.approx(37 / 30, rel=1e-9)


def test_zero_and_cash_claims(ex1):
    tree = ex1.tree
    assert superhedge_price(ex1, Claim.zeros(tree, 2)).value == 0
    cash = Claim.from_sequence(tree, [(3, 0), (F(5, 2), 0)])
    assert superhedge_price(ex1, cash).value == 3


def test_cash_translation_and_scaling():
    rng = random.Random(11)
    for _ in range(15):
        market = random_market(rng, d=2, horizon=2, max_branch=2)
        claim = random_claim(rng, market.tree, 2)
        h = superhedge_price(market, claim).value
        assert superhedge_price(market, claim.shifted((F(7, 3), 0))).value == h + F(7, 3)
        assert superhedge_price(market, claim.scaled(F(5, 2))).value == F(5, 2) * h
        bigger = Claim.from_sequence(market.tree, [(v[0] + 1, v[1]) for v in claim.values])
        assert superhedge_price(market, bigger).value >= h


def test_direction_variant(ex1, ex1_claim):
    res = superhedge_price(ex1, ex1_claim, direction=(0, 1))
    assert res.plan.initial == (0, res.value)
    assert res.plan.verify(ex1, ex1_claim)
    # holding b units of asset 2 is worth between b(1 - mu) and b(1 + lam) in cash
    assert F(37, 30) / F(11, 10) <= res.value <= F(37, 30) / F(9, 10)
    assert superhedge_price(ex1, ex1_claim, direction=(1, 0)).value == F(37, 30)


def test_european_price_is_risk_neutral_expectation():
    market = binomial_market(2)
    tree = market.tree
    payoff = {tree.ids[n]: (max(market.cones[n].prices[1] - 100, 0), 0) for n in tree.leaves}
    q = F(4, 9)
    expected = q * q * (F(625, 4) - 100)
    assert european_price(market, payoff).value == expected
    with pytest.raises(UnknownNode):
        european_price(market, {(): (1, 0)})


def test_american_dominates_european():
    rng = random.Random(5)
    for _ in range(10):
        market = random_market(rng, d=2, horizon=2)
        claim = random_claim(rng, market.tree, 2)
        assert superhedge_price(market, claim).value >= european_price(market, claim).value


def test_arbitrage_is_detected(doubling):
    claim = Claim.zeros(doubling.tree, 2)
    with pytest.raises(ArbitrageDetected):
        european_price(doubling, claim)
    # the American claim must also be dominated at the root, which keeps h finite
    assert superhedge_price(doubling, claim).value == 0


def test_costs_raise_prices():
    market0 = binomial_market(2)
    market1 = binomial_market(2, lam=F(1, 20))
    assert superhedge_price(market1, put_claim(market1)).value >= superhedge_price(market0, put_claim(market0)).value


def test_claim_validation(ex1):
    tree = ex1.tree
    with pytest.raises(MissingNode):
        Claim.from_mapping(tree, {0: (1, 0)})
    with pytest.raises(UnknownNode):
        Claim.from_mapping(tree, {0: (1, 0), 1: (0, 0), 7: (0, 0)})
    with pytest.raises(DimensionMismatch):
        superhedge_price(ex1, Claim.from_sequence(tree, [(1, 0, 0), (0, 0, 0)]))
    with pytest.raises(DimensionMismatch):
        Claim.from_sequence(tree, [(1, 0)])
    with pytest.raises(DimensionMismatch):
        superhedge_price(ex1, Claim.from_sequence(tree, [(1, 0), (0, 0)]), direction=(1, 0, 0))


def test_extra_liquidation_after_the_horizon_changes_nothing(ex1, ex1_claim):
    """A further date with a zero claim (one more round of exchanges) leaves h unchanged."""
    tree = deterministic_tree(2)
    extended = bid_ask_market(tree, 1, [F(1, 10), F(1, 2), F(1, 2)], F(1, 10))
    claim = Claim.from_sequence(tree, list(ex1_claim.values) + [(0, 0)])
    assert superhedge_price(extended, claim).value == superhedge_price(ex1, ex1_claim).value


def test_plan_verify_rejects_tampering(ex1, ex1_claim):
    plan = superhedge_price(ex1, ex1_claim).plan
    plan.portfolio[1] = (0, F(1, 2))
    assert not plan.verify(ex1, ex1_claim)
    plan.transfers[0] = (1, 1)
    assert not plan.verify(ex1)


def test_market_from_prices_accepts_single_cost_matrix():
    tree = deterministic_tree(1)
    m = market_from_prices(tree, {0: (1, 1), 1: (1, 1)}, [[0, F(1, 10)], [F(1, 10), 0]])
    assert m.cones[1].costs == m.cones[0].costs
