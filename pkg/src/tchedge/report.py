"""Serializable price reports.

Every report is first built as a plain dict of strings/floats/lists; the
JSON and table renderers both read that dict, so the two outputs always
carry the same numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Real
from typing import Any

from .cones import Market
from .dual import DualProcess, GapReport, NaCertificate
from .errors import NotMarketCone, NotTwoAsset, ZeroFirstComponent
from .primal import TransferPlan, extract_exchanges
from .randomization import node_measure_to_randomized, node_measure_value, randomized_value, z_to_node_measure
from .tree import EventTree


def num(v) -> Any:
    """Exact values as ``"p/q"`` strings, floats as floats."""
    if isinstance(v, bool):
        return v
    if isinstance(v, Fraction) or isinstance(v, Integral):
        return str(Fraction(v))
    if isinstance(v, Real):
        return float(v)
    try:  # gmpy2 mpq and friends
        return str(Fraction(int(v.numerator), int(v.denominator)))
    except AttributeError:
        return v


def vec(values) -> list:
    return [num(v) for v in values]


def per_node(tree: EventTree, values, fmt=vec) -> list[dict]:
    return [{"node": tree.ids[n], "value": fmt(values[n])} for n in range(len(tree))]


def strategy_dict(market: Market, plan: TransferPlan) -> dict:
    tree = market.tree
    nodes = []
    eta = extract_exchanges(plan, market).eta if market.is_market else None
    for n in range(len(tree)):
        entry = {"node": tree.ids[n], "transfer": vec(plan.transfers[n]), "portfolio": vec(plan.portfolio[n])}
        if eta is not None:
            entry["eta"] = [vec(row) for row in eta[n]]
        nodes.append(entry)
    return {"initial": vec(plan.initial), "nodes": nodes}


def dual_dict(tree: EventTree, process: DualProcess) -> dict:
    return {"Z": per_node(tree, process.Z), "Zbar": per_node(tree, process.Zbar)}


def na_dict(tree: EventTree, cert: NaCertificate) -> dict:
    out = {"epsilon": num(cert.epsilon), "arbitrage_free": cert.arbitrage_free}
    if cert.process is not None:
        out["Z"] = per_node(tree, cert.process.Z)
    else:
        out["note"] = "arbitrage detected: no strictly positive consistent dual process"
    return out


def conversion_dict(market: Market, process: DualProcess, claim=None) -> dict:
    """``(chi, q)`` and ``(X, H, chi)`` for ``Z``; empty-reason dict if not applicable."""
    tree = market.tree
    try:
        nm = z_to_node_measure(market, process)
    except (NotTwoAsset, NotMarketCone, ZeroFirstComponent) as exc:
        return {"available": False, "reason": str(exc)}
    rs = node_measure_to_randomized(market, nm)
    out = {
        "available": True,
        "node_measure": [{"node": tree.ids[n], "chi": num(nm.chi[n]), "q": num(nm.q[n])}
                         for n in range(len(tree))],
        "randomized": [{"node": tree.ids[n], "X": num(rs.X[n]), "H": num(rs.H[n]), "chi": num(rs.chi[n])}
                       for n in range(len(tree))],
    }
    if claim is not None:
        out["node_measure_value"] = num(node_measure_value(market, nm, claim))
        out["randomized_value"] = num(randomized_value(market, rs, claim))
    return out


@dataclass
class PriceReport:
    h_primal: Any = None
    h_dual: Any = None
    h_theta: Any = None
    gap: Any = None
    na: dict | None = None
    strategy: dict | None = None
    dual: dict | None = None
    stopping_time: list | None = None
    conversions: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def from_gap(cls, market: Market, claim, gap: GapReport, cert: NaCertificate | None = None,
                 with_conversions: bool = True, **diagnostics) -> "PriceReport":
        tree = market.tree
        rep = cls(
            h_primal=gap.h_primal,
            h_dual=gap.h_dual,
            h_theta=gap.h_theta,
            gap=gap.gap,
            na=None if cert is None else na_dict(tree, cert),
            strategy=strategy_dict(market, gap.primal.plan),
            dual=dual_dict(tree, gap.dual.process),
            diagnostics=dict(diagnostics),
        )
        if gap.theta is not None:
            rep.stopping_time = sorted((tree.ids[n] for n in gap.theta.stopping_time.stops), key=str)
            rep.diagnostics.setdefault("stopping_times", gap.theta.count)
        if with_conversions:
            rep.conversions = conversion_dict(market, gap.dual.process, claim)
        return rep

    def to_dict(self) -> dict:
        out: dict = {}
        for key in ("h_primal", "h_dual", "h_theta", "gap"):
            v = getattr(self, key)
            if v is not None:
                out[key] = num(v)
        for key in ("na", "strategy", "dual", "stopping_time", "conversions"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        return out


# -- rendering ---------------------------------------------------------------------

def render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2)


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _is_flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (list, dict)) for x in v)


def _flatten(prefix: str, v, out: list) -> None:
    if isinstance(v, dict):
        for k, x in v.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), x, out)
    elif _is_flat(v):
        out.append((prefix, "(" + ", ".join(_scalar(x) for x in v) + ")"))
    elif isinstance(v, list):
        if v and all(_is_flat(x) for x in v):  # matrices stay on one line
            out.append((prefix, "[" + "; ".join(", ".join(_scalar(y) for y in x) for x in v) + "]"))
            return
        for i, x in enumerate(v):
            _flatten(f"{prefix}[{i}]", x, out)
    else:
        out.append((prefix, _scalar(v)))


def table_rows(payload: dict) -> list[tuple[str, str]]:
    rows: list = []
    _flatten("", payload, rows)
    return rows


def render_table(payload: dict) -> str:
    rows = table_rows(payload)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)
