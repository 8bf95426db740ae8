"""Finite event trees: the filtration on which markets and claims live."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    EnumerationCapExceeded,
    LeafBeforeHorizon,
    NonPositiveProbability,
    OrphanNode,
    ProbabilityNotNormalized,
    UnknownNode,
    ValidationError,
)

FLOAT_PROB_TOL = 1e-12
DEFAULT_STOPPING_CAP = 100_000


@dataclass(frozen=True)
class NodeRecord:
    id: Hashable
    time: int
    parent: Hashable | None
    prob: Fraction | float


@dataclass(frozen=True, eq=False)
class EventTree:
    """Immutable event tree; nodes are stored in breadth-first order.

    Node *indices* (0 = root) are used everywhere internally; ``ids`` maps
    them back to the user-facing identifiers.
    """

    horizon: int
    ids: tuple
    times: tuple[int, ...]
    parents: tuple[int, ...]  # -1 for the root
    probs: tuple  # conditional branch probabilities
    children: tuple[tuple[int, ...], ...]
    index: Mapping[Hashable, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def exact(self) -> bool:
        return all(isinstance(p, (int, Fraction)) for p in self.probs)

    @property
    def leaves(self) -> tuple[int, ...]:
        return tuple(n for n in range(len(self)) if not self.children[n])

    def nodes_at(self, t: int) -> tuple[int, ...]:
        return tuple(n for n in range(len(self)) if self.times[n] == t)

    def locate(self, node) -> int:
        """Index of ``node`` given either its id or (for ints) its index."""
        if node in self.index:
            return self.index[node]
        raise UnknownNode(f"unknown node {node!r}")

    def path(self, n: int) -> list[int]:
        """Root-to-``n`` path of node indices (inclusive)."""
        out = []
        while n >= 0:
            out.append(n)
            n = self.parents[n]
        return out[::-1]

    def subtree(self, n: int) -> list[int]:
        out, stack = [], [n]
        while stack:
            m = stack.pop()
            out.append(m)
            stack.extend(reversed(self.children[m]))
        return sorted(out)

    def unconditional(self) -> list:
        """P(node) for every node, in index order."""
        p = [None] * len(self)
        p[0] = Fraction(1) if self.exact else 1.0
        for n in range(1, len(self)):
            p[n] = p[self.parents[n]] * self.probs[n]
        return p

    def conditional_from(self, n: int) -> dict[int, Fraction | float]:
        """P(m | n) for every m in the subtree of ``n``."""
        one = Fraction(1) if self.exact else 1.0
        out = {n: one}
        for m in self.subtree(n):
            if m != n:
                out[m] = out[self.parents[m]] * self.probs[m]
        return out

    def records(self) -> list[NodeRecord]:
        return [
            NodeRecord(
                self.ids[n],
                self.times[n],
                None if self.parents[n] < 0 else self.ids[self.parents[n]],
                self.probs[n],
            )
            for n in range(len(self))
        ]


def _as_record(raw) -> NodeRecord:
    if isinstance(raw, NodeRecord):
        return raw
    if isinstance(raw, Mapping):
        return NodeRecord(raw["id"], int(raw["time"]), raw.get("parent"), raw.get("prob", 1))
    node_id, time, parent, prob = raw
    return NodeRecord(node_id, int(time), parent, prob)


def build_tree(nodes: Iterable, horizon: int | None = None) -> EventTree:
    """Validate raw node records and build an :class:`EventTree`.

    Records may be :class:`NodeRecord`, mappings with keys
    ``id/time/parent/prob`` or ``(id, time, parent, prob)`` tuples.
    """
    recs = [_as_record(r) for r in nodes]
    if not recs:
        raise ValidationError("empty tree")
    by_id = {}
    for r in recs:
        if r.id in by_id:
            raise ValidationError(f"duplicate node id {r.id!r}")
        by_id[r.id] = r
    roots = [r for r in recs if r.parent is None]
    if len(roots) != 1:
        raise OrphanNode(f"expected exactly one root, found {len(roots)}")
    root = roots[0]
    if root.time != 0:
        raise ValidationError(f"root {root.id!r} must sit at time 0")
    T = max(r.time for r in recs) if horizon is None else int(horizon)
    if T < 1:
        raise ValidationError("horizon must be at least 1")

    kids: dict = {r.id: [] for r in recs}
    for r in recs:
        if r.parent is None:
            continue
        if r.parent not in by_id:
            raise OrphanNode(f"node {r.id!r} has unknown parent {r.parent!r}")
        if r.time != by_id[r.parent].time + 1:
            raise ValidationError(f"node {r.id!r}: time must be parent time + 1")
        kids[r.parent].append(r.id)

    exact = all(isinstance(r.prob, (int, Fraction)) for r in recs)
    for r in recs:
        if r.parent is not None and not r.prob > 0:
            raise NonPositiveProbability(f"node {r.id!r} has probability {r.prob}")
        if r.parent is not None and r.prob > 1:
            raise ValidationError(f"node {r.id!r} has probability {r.prob} > 1")
        if r.time > T:
            raise ValidationError(f"node {r.id!r} lies beyond the horizon {T}")
        if not kids[r.id] and r.time < T:
            raise LeafBeforeHorizon(f"node {r.id!r} at time {r.time} has no children")
        if kids[r.id]:
            total = sum(by_id[c].prob for c in kids[r.id])
            ok = total == 1 if exact else abs(total - 1) <= FLOAT_PROB_TOL
            if not ok:
                raise ProbabilityNotNormalized(
                    f"children of {r.id!r} have probabilities summing to {total}"
                )

    # breadth-first order, children in input order; also catches cycles
    order = [root.id]
    for node_id in order:
        order.extend(kids[node_id])
    if len(order) != len(recs):
        raise OrphanNode("some nodes are not reachable from the root")
    index = {node_id: i for i, node_id in enumerate(order)}
    prob = [Fraction(1) if exact else 1.0]
    for node_id in order[1:]:
        p = by_id[node_id].prob
        prob.append(Fraction(p) if exact else float(p))
    return EventTree(
        horizon=T,
        ids=tuple(order),
        times=tuple(by_id[i].time for i in order),
        parents=tuple(-1 if by_id[i].parent is None else index[by_id[i].parent] for i in order),
        probs=tuple(prob),
        children=tuple(tuple(index[c] for c in kids[i]) for i in order),
        index=index,
    )


def deterministic_tree(horizon: int) -> EventTree:
    """Single scenario with ``horizon + 1`` nodes, ids ``0..horizon``."""
    return build_tree([(t, t, None if t == 0 else t - 1, 1) for t in range(horizon + 1)])


def regular_tree(horizon: int, branch_probs: Sequence) -> EventTree:
    """Tree where every internal node has ``len(branch_probs)`` children.

    Node ids are tuples of branch choices, the root being ``()``.
    """
    nodes = [((), 0, None, 1)]
    frontier = [()]
    for t in range(1, horizon + 1):
        nxt = []
        for path in frontier:
            for k, p in enumerate(branch_probs):
                nodes.append((path + (k,), t, path, p))
                nxt.append(path + (k,))
        frontier = nxt
    return build_tree(nodes)


def node_probability(tree: EventTree, node) -> Fraction | float:
    """Unconditional probability of ``node`` (an id)."""
    n = tree.locate(node)
    p = Fraction(1) if tree.exact else 1.0
    while n > 0:
        p *= tree.probs[n]
        n = tree.parents[n]
    return p


# -- stopping times ----------------------------------------------------------

@dataclass(frozen=True)
class StoppingTime:
    """A stopping time, stored as the set of node indices where it stops."""

    stops: frozenset[int]

    def time_on(self, tree: EventTree, leaf: int) -> int:
        for n in tree.path(leaf):
            if n in self.stops:
                return tree.times[n]
        raise ValidationError("path never stops")

    def is_valid(self, tree: EventTree) -> bool:
        return all(
            sum(1 for n in tree.path(leaf) if n in self.stops) == 1 for leaf in tree.leaves
        )

    def indicator(self, tree: EventTree) -> list[int]:
        return [1 if n in self.stops else 0 for n in range(len(tree))]


def count_stopping_times(tree: EventTree, node: int = 0) -> int:
    """N(n) = 1 + prod_children N(c) for internal nodes, 1 at leaves."""
    counts = [1] * len(tree)
    for n in reversed(range(len(tree))):
        if tree.children[n]:
            counts[n] = 1 + math.prod(counts[c] for c in tree.children[n])
    return counts[node]


def _stop_sets(tree: EventTree, n: int) -> Iterator[frozenset[int]]:
    yield frozenset((n,))
    kids = tree.children[n]
    if kids:
        for combo in itertools.product(*(list(_stop_sets(tree, c)) for c in kids)):
            yield frozenset().union(*combo)


def enumerate_stopping_times(tree: EventTree, cap: int = DEFAULT_STOPPING_CAP) -> list[StoppingTime]:
    total = count_stopping_times(tree)
    if total > cap:
        raise EnumerationCapExceeded(f"{total} stopping times exceed the cap of {cap}")
    return [StoppingTime(s) for s in _stop_sets(tree, 0)]
