"""Random markets and claims shared by the test modules.

Prices are built as P-martingales (multiplicative factors normalised so
that their conditional mean is one), which makes the price process itself a
strictly positive consistent price system: every instance is arbitrage-free.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from tchedge.cones import market_from_prices
from tchedge.primal import Claim
from tchedge.tree import build_tree


def rational(rng: random.Random, lo: float, hi: float, den: int = 100) -> Fraction:
    return Fraction(rng.randint(round(lo * den), round(hi * den)), den)


def random_tree(rng: random.Random, horizon: int, max_branch: int):
    """Tree with 1..max_branch children per node and random rational probabilities."""
    records = [(0, 0, None, Fraction(1))]
    frontier = [0]
    next_id = 1
    for t in range(1, horizon + 1):
        new = []
        for par in frontier:
            k = rng.randint(1, max_branch)
            weights = [rng.randint(1, 4) for _ in range(k)]
            total = sum(weights)
            for w in weights:
                records.append((next_id, t, par, Fraction(w, total)))
                new.append(next_id)
                next_id += 1
        frontier = new
    return build_tree(records, horizon)


def martingale_prices(rng: random.Random, tree, d: int, vol: float = 0.3):
    """Log-random positive prices, asset 1 constant, each asset a P-martingale."""
    S = [None] * len(tree)
    S[0] = (Fraction(1),) + tuple(Fraction(rng.randint(50, 200), 100) for _ in range(d - 1))
    for n in range(len(tree)):
        kids = tree.children[n]
        if not kids:
            continue
        factors = []
        for _ in kids:
            factors.append([Fraction(round(100 * math.exp(rng.gauss(0, vol))), 100) for _ in range(d - 1)])
        for j in range(d - 1):
            mean = sum(tree.probs[c] * f[j] for c, f in zip(kids, factors))
            for f in factors:
                f[j] = f[j] / mean
        for c, f in zip(kids, factors):
            S[c] = (Fraction(1),) + tuple(S[n][j + 1] * f[j] for j in range(d - 1))
    return S


def random_costs(rng: random.Random, d: int, hi: float = 0.3):
    return [[Fraction(0) if i == j else rational(rng, 0, hi, 1000) for j in range(d)] for i in range(d)]


def random_market(rng: random.Random, d: int | None = None, horizon: int | None = None,
                  max_branch: int | None = None, cost_hi: float = 0.3):
    d = d or rng.randint(2, 3)
    horizon = horizon or rng.randint(1, 3)
    max_branch = max_branch or rng.randint(1, 3)
    tree = random_tree(rng, horizon, max_branch)
    S = martingale_prices(rng, tree, d)
    costs = [random_costs(rng, d, cost_hi) for _ in range(len(tree))]
    return market_from_prices(tree, S, costs)


def random_claim(rng: random.Random, tree, d: int, lo: int = -2, hi: int = 5):
    return Claim.from_sequence(tree, [
        [Fraction(rng.randint(lo, hi), rng.randint(1, 4)) for _ in range(d)] for _ in range(len(tree))])


def triangle_violating_costs(rng: random.Random, d: int):
    """Cost matrix where some direct exchange is dearer than a two-step route."""
    lam = random_costs(rng, d, 0.1)
    i, j = rng.sample(range(d), 2)
    lam[i][j] = rational(rng, 0.5, 0.9, 1000)
    return lam
