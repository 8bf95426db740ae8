"""Node-measures and randomized stopping times for the two-asset bid/ask model.

Asset 1 is cash (price 1); asset 2 trades at ask ``S2 (1+lam)`` and bid
``S2 (1-mu)``, with ``lam``/``mu`` allowed to vary by node.  A dual process
``Z`` maps to a node-measure ``(chi, q)`` and from there to a randomized
stopping time ``X`` plus a density martingale ``H``; all three carry the
same value for a claim.

Off the support of ``q`` the ratio ``chi`` is 0/0 and is stored as zero;
such nodes are excluded from the ``chi`` band checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cones import Market
from .dual import DualProcess, is_consistent_dual
from .errors import (
    NotApproximateMartingaleMeasure,
    NotInQ,
    NotMarketCone,
    NotTwoAsset,
    OutsideDualCone,
    ZeroFirstComponent,
)
from .primal import Claim
from .tree import EventTree, StoppingTime


@dataclass(frozen=True)
class BidAsk:
    S2: tuple
    lam: tuple
    mu: tuple


def bid_ask_view(market: Market) -> BidAsk:
    """Per-node ``(S2, lam, mu)`` of a two-asset price/cost market."""
    if market.d != 2:
        raise NotTwoAsset(f"node-measures need two assets, market has {market.d}")
    if not market.is_market:
        raise NotMarketCone("node-measures need price/cost cones")
    S2, lam, mu = [], [], []
    for c in market.cones:
        S2.append(c.prices[1] / c.prices[0])
        lam.append(c.costs[0][1])
        mu.append(c.costs[1][0] / (1 + c.costs[1][0]))
    return BidAsk(tuple(S2), tuple(lam), tuple(mu))


def _forward_sum(tree: EventTree, values: Sequence) -> list:
    """``A(n) = values(n) + sum_children p(c) A(c)``."""
    out = [None] * len(tree)
    for n in reversed(range(len(tree))):
        acc = values[n]
        for c in tree.children[n]:
            acc = acc + tree.probs[c] * out[c]
        out[n] = acc
    return out


def _ratio(a, b):
    return a / b if b != 0 else 0 * a


@dataclass
class NodeMeasure:
    chi: list
    q: list

    @property
    def support(self) -> list[bool]:
        return [v > 0 for v in self.q]


def _check_q(market: Market, chi, q, tol) -> str | None:
    """Reason why ``(chi, q)`` is outside Q(K, P), or None."""
    tree = market.tree
    ba = bid_ask_view(market)
    if len(chi) != len(tree) or len(q) != len(tree):
        return "chi and q need one value per node"
    if any(v < -tol for v in q):
        return "q must be nonnegative"
    P = tree.unconditional()
    total = sum(P[n] * q[n] for n in range(len(tree)))
    if abs(total - 1) > tol:
        return f"E[sum q] = {total}, expected 1"
    for n in range(len(tree)):
        if q[n] > 0 and not (1 - ba.mu[n] - tol <= chi[n] <= 1 + ba.lam[n] + tol):
            return f"chi out of band at node {tree.ids[n]!r}"
    mass = _forward_sum(tree, list(q))
    wealth = _forward_sum(tree, [q[n] * chi[n] * ba.S2[n] for n in range(len(tree))])
    for n in range(len(tree)):
        lo = ba.S2[n] * (1 - ba.mu[n]) * mass[n]
        hi = ba.S2[n] * (1 + ba.lam[n]) * mass[n]
        if wealth[n] < lo - tol or wealth[n] > hi + tol:
            return f"conditional band violated at node {tree.ids[n]!r}"
    return None


def in_q(market: Market, nm: NodeMeasure, tol: float = 0) -> bool:
    return _check_q(market, nm.chi, nm.q, tol) is None


def z_to_node_measure(market: Market, Z, tol: float = 0) -> NodeMeasure:
    """``chi = (Z^2 / S2) / Z^1`` and ``q = Z^1 / E[sum Z^1]`` (0/0 = 0)."""
    tree = market.tree
    ba = bid_ask_view(market)
    if isinstance(Z, DualProcess):
        Z = Z.Z
    if not is_consistent_dual(market, Z, tol):
        raise OutsideDualCone("Z is not a consistent dual process")
    P = tree.unconditional()
    mass = sum(P[n] * Z[n][0] for n in range(len(tree)))
    if mass == 0:
        raise ZeroFirstComponent("Z^1 vanishes identically")
    chi = [_ratio(Z[n][1] / ba.S2[n], Z[n][0]) for n in range(len(tree))]
    q = [Z[n][0] / mass for n in range(len(tree))]
    return NodeMeasure(chi, q)


def node_measure_to_z(market: Market, nm: NodeMeasure, tol: float = 0) -> DualProcess:
    """``Z^1 = q``, ``Z^2 = chi q S2``."""
    reason = _check_q(market, nm.chi, nm.q, tol)
    if reason:
        raise NotInQ(reason)
    ba = bid_ask_view(market)
    Z = [(nm.q[n], nm.chi[n] * nm.q[n] * ba.S2[n]) for n in range(len(market.tree))]
    return DualProcess.build(market.tree, Z)


def _cash_flow(market: Market, chi, claim: Claim) -> list:
    """Per-node cash value ``theta^1 + chi theta^2 S2`` of the claim."""
    ba = bid_ask_view(market)
    return [claim[n][0] + chi[n] * claim[n][1] * ba.S2[n] for n in range(len(market.tree))]


def node_measure_value(market: Market, nm: NodeMeasure, claim: Claim):
    P = market.tree.unconditional()
    flow = _cash_flow(market, nm.chi, claim)
    return sum((P[n] * nm.q[n] * flow[n] for n in range(len(P))), 0 * P[0])


# -- randomized stopping times -----------------------------------------------------

@dataclass
class RandomizedStop:
    X: list
    H: list  # density martingale of Q with respect to P, H(root) = 1
    chi: list

    def remaining(self, tree: EventTree) -> list:
        """``X+(n) = 1 - sum of X over strict ancestors``."""
        out = [None] * len(tree)
        for n in range(len(tree)):
            par = tree.parents[n]
            out[n] = 1 + 0 * self.X[n] if par < 0 else out[par] - self.X[par]
        return out


def stopping_time_as_randomized(tree: EventTree, tau: StoppingTime, chi=None) -> RandomizedStop:
    X = [Fraction(int(n in tau.stops)) for n in range(len(tree))]
    H = [Fraction(1)] * len(tree)
    return RandomizedStop(X, H, list(chi) if chi is not None else [Fraction(1)] * len(tree))


def node_measure_to_randomized(market: Market, nm: NodeMeasure, tol: float = 0) -> RandomizedStop:
    """Inductive construction of ``(H, X)`` from ``q``.

    ``N(n) = E[sum_{s>=t} q_s | F_t]``, ``D(n)`` is the same sum conditioned
    one step earlier (``N(parent) - q(parent)``), ``H(n) = H(parent) N / D``
    when ``D != 0`` (else ``H(parent)``) and ``X = q / H``.

    Where ``N(n) = 0 < D(n)`` the density vanishes below ``n``: such nodes
    are null for Q, and ``X`` stops all remaining weight there so that it
    still sums to one on every path.
    """
    reason = _check_q(market, nm.chi, nm.q, tol)
    if reason:
        raise NotInQ(reason)
    tree = market.tree
    q = nm.q
    N = _forward_sum(tree, list(q))
    H = [None] * len(tree)
    X = [None] * len(tree)
    H[0] = 1 + 0 * q[0]
    X[0] = q[0]
    rest = [None] * len(tree)  # weight not yet stopped before node n
    rest[0] = 1 + 0 * q[0]
    for n in range(1, len(tree)):
        par = tree.parents[n]
        rest[n] = rest[par] - X[par]
        D = N[par] - q[par]
        if D == 0:
            H[n] = H[par]
        else:
            H[n] = H[par] * N[n] / D
        if H[n] == 0:
            # Q-null node: stop everything that is left
            X[n] = rest[n] if H[par] != 0 else 0 * rest[n]
        else:
            X[n] = q[n] / H[n]
    return RandomizedStop(X, H, list(nm.chi))


def _randomized_reason(market: Market, rs: RandomizedStop, tol) -> str | None:
    tree = market.tree
    ba = bid_ask_view(market)
    X, H, chi = rs.X, rs.H, rs.chi
    if not (len(X) == len(H) == len(chi) == len(tree)):
        return "X, H and chi need one value per node"
    if any(x < -tol for x in X):
        return "X must be nonnegative"
    rest = rs.remaining(tree)
    for leaf in tree.leaves:
        if abs(rest[leaf] - X[leaf]) > tol:
            return f"X does not sum to one on the path to {tree.ids[leaf]!r}"
    if abs(H[0] - 1) > tol:
        return "H must start at one"
    if any(h < -tol for h in H):
        return "H must be nonnegative"
    for n in range(len(tree)):
        if tree.children[n]:
            s = sum(tree.probs[c] * H[c] for c in tree.children[n])
            if abs(s - H[n]) > tol:
                return f"H is not a martingale at {tree.ids[n]!r}"
    for n in range(len(tree)):
        if X[n] > 0 and H[n] > 0 and not (1 - ba.mu[n] - tol <= chi[n] <= 1 + ba.lam[n] + tol):
            return f"chi out of band at node {tree.ids[n]!r}"
    # E^Q[sum_{s>=t} X chi S2 | F_t] * H(n) as a P-recursion
    weighted = _forward_sum(tree, [H[n] * X[n] * chi[n] * ba.S2[n] for n in range(len(tree))])
    for n in range(len(tree)):
        if H[n] == 0:
            continue
        cond = weighted[n] / H[n]
        lo = ba.S2[n] * (1 - ba.mu[n]) * rest[n]
        hi = ba.S2[n] * (1 + ba.lam[n]) * rest[n]
        if cond < lo - tol or cond > hi + tol:
            return f"approximate-martingale band violated at node {tree.ids[n]!r}"
    return None


def check_randomized(market: Market, rs: RandomizedStop, tol: float = 0) -> bool:
    return _randomized_reason(market, rs, tol) is None


def randomized_value(market: Market, rs: RandomizedStop, claim: Claim):
    """``E^Q[sum_t X_t (theta^1 + chi theta^2 S2)]`` with ``dQ/dP = H``."""
    P = market.tree.unconditional()
    flow = _cash_flow(market, rs.chi, claim)
    return sum((P[n] * rs.H[n] * rs.X[n] * flow[n] for n in range(len(P))), 0 * P[0])


def randomized_to_node_measure(market: Market, rs: RandomizedStop, tol: float = 0) -> NodeMeasure:
    """``q = X H / E[sum X H]``."""
    reason = _randomized_reason(market, rs, tol)
    if reason:
        raise NotApproximateMartingaleMeasure(reason)
    P = market.tree.unconditional()
    w = [rs.X[n] * rs.H[n] for n in range(len(P))]
    total = sum(P[n] * w[n] for n in range(len(P)))
    q = [v / total for v in w]
    chi = [c if qq > 0 else 0 * c for c, qq in zip(rs.chi, q)]
    return NodeMeasure(chi, q)
