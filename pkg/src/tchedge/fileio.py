"""JSON market and claim files.

Numbers may be JSON numbers or strings such as ``"37/30"``; decimal
literals are read exactly (``0.1`` is ``1/10``).  Output always writes
rationals as strings so that round trips are bit-exact.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema

from .cones import Market, cone_from_generators, cone_from_market, tighten_costs
from .errors import DimensionMismatch, SchemaError, ValidationError
from .lp import MODES, RATIONAL
from .numeric import as_fraction
from .primal import Claim
from .tree import EventTree, build_tree

log = logging.getLogger(__name__)

MARKET_VERSION = "tchedge-market/1"
CLAIM_VERSION = "tchedge-claim/1"

_NUMBER = {"anyOf": [{"type": "number"}, {"type": "string", "minLength": 1}]}
_VECTOR = {"type": "array", "items": _NUMBER, "minItems": 1}
_NODE_ID = {"type": ["string", "integer"]}

MARKET_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["version", "assets", "horizon", "nodes"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": MARKET_VERSION},
        "assets": {"type": "integer", "minimum": 2},
        "horizon": {"type": "integer", "minimum": 1},
        "mode": {"enum": list(MODES)},
        "description": {"type": "string"},
        "nodes": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "object",
                "required": ["id", "time", "parent", "prob"],
                "additionalProperties": False,
                "properties": {
                    "id": _NODE_ID,
                    "time": {"type": "integer", "minimum": 0},
                    "parent": {"anyOf": [_NODE_ID, {"type": "null"}]},
                    "prob": _NUMBER,
                    "prices": _VECTOR,
                    "costs": {"type": "array", "items": _VECTOR},
                    "generators": {"type": "array", "items": _VECTOR, "minItems": 1},
                },
                "oneOf": [
                    {"required": ["prices", "costs"], "not": {"required": ["generators"]}},
                    {"required": ["generators"], "not": {"anyOf": [
                        {"required": ["prices"]}, {"required": ["costs"]}]}},
                ],
            },
        },
    },
}

CLAIM_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["version", "claim"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": CLAIM_VERSION},
        "assets": {"type": "integer", "minimum": 1},
        "description": {"type": "string"},
        "claim": {"type": "object", "additionalProperties": _VECTOR},
    },
}


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def _validate(obj, schema) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, _pointer(err.absolute_path))


def _number(v, where: str) -> Fraction:
    try:
        return as_fraction(v)
    except ValidationError as exc:
        raise SchemaError(str(exc), where) from None


def _read_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})", "/") from None


@dataclass
class MarketFile:
    market: Market
    mode: str = RATIONAL
    description: str = ""
    tightened: bool = False

    @property
    def tree(self) -> EventTree:
        return self.market.tree


def parse_market(obj: Any, tighten: bool = False) -> MarketFile:
    _validate(obj, MARKET_SCHEMA)
    d = obj["assets"]
    records, cones = [], []
    changed = False
    for k, node in enumerate(obj["nodes"]):
        where = f"/nodes/{k}"
        records.append((node["id"], node["time"], node["parent"], _number(node["prob"], where + "/prob")))
        if "generators" in node:
            gens = [[_number(v, f"{where}/generators/{g}/{i}") for i, v in enumerate(vec)]
                    for g, vec in enumerate(node["generators"])]
            if any(len(g) != d for g in gens):
                raise SchemaError(f"generators must have {d} entries", where + "/generators")
            cones.append(("gens", gens))
        else:
            prices = [_number(v, f"{where}/prices/{i}") for i, v in enumerate(node["prices"])]
            costs = [[_number(v, f"{where}/costs/{i}/{j}") for j, v in enumerate(row)]
                     for i, row in enumerate(node["costs"])]
            if len(prices) != d:
                raise SchemaError(f"prices must have {d} entries", where + "/prices")
            if len(costs) != d or any(len(r) != d for r in costs):
                raise SchemaError(f"costs must be a {d}x{d} matrix", where + "/costs")
            if tighten:
                tight = tighten_costs(costs, prices)
                if any(tight[i][j] != costs[i][j] for i in range(d) for j in range(d)):
                    changed = True
                    log.warning("node %r: costs violate the triangle condition; using tightened costs",
                                node["id"])
                costs = [list(r) for r in tight]
            cones.append(("market", prices, costs))
    tree = build_tree(records, horizon=obj["horizon"])
    order = {rec[0]: k for k, rec in enumerate(records)}
    built = []
    for node_id in tree.ids:
        spec = cones[order[node_id]]
        built.append(cone_from_generators(spec[1]) if spec[0] == "gens"
                     else cone_from_market(spec[1], spec[2]))
    market = Market(tree, tuple(built))
    return MarketFile(market, obj.get("mode", RATIONAL), obj.get("description", ""), changed)


def load_market(path, tighten: bool = False) -> MarketFile:
    return parse_market(_read_json(path), tighten=tighten)


def parse_claim(obj: Any, tree: EventTree) -> Claim:
    _validate(obj, CLAIM_SCHEMA)
    lookup = {str(i): i for i in tree.ids}
    mapping = {}
    for key, vec in obj["claim"].items():
        node_id = lookup.get(key, key)
        mapping[node_id] = [_number(v, f"/claim/{key}/{i}") for i, v in enumerate(vec)]
    claim = Claim.from_mapping(tree, mapping)
    if "assets" in obj and obj["assets"] != claim.d:
        raise DimensionMismatch(f"claim declares {obj['assets']} assets but vectors have {claim.d}")
    return claim


def load_claim(path, tree: EventTree) -> Claim:
    return parse_claim(_read_json(path), tree)


# -- writing ------------------------------------------------------------------------

def format_number(v) -> Any:
    """Rationals as ``"p/q"`` strings (integers as ``"n"``), floats unchanged."""
    if isinstance(v, float):
        return v
    f = as_fraction(v)
    return str(f)


def dump_market(mf: MarketFile | Market) -> dict:
    if isinstance(mf, Market):
        mf = MarketFile(mf)
    market = mf.market
    tree = market.tree
    nodes = []
    for n, rec in enumerate(tree.records()):
        node = {"id": rec.id, "time": rec.time, "parent": rec.parent, "prob": format_number(rec.prob)}
        cone = market.cones[n]
        if cone.is_market:
            node["prices"] = [format_number(v) for v in cone.prices]
            node["costs"] = [[format_number(v) for v in row] for row in cone.costs]
        else:
            node["generators"] = [[format_number(v) for v in g] for g in cone.generators]
        nodes.append(node)
    out = {"version": MARKET_VERSION, "assets": market.d, "horizon": tree.horizon, "mode": mf.mode}
    if mf.description:
        out["description"] = mf.description
    out["nodes"] = nodes
    return out


def dump_claim(claim: Claim, tree: EventTree) -> dict:
    return {
        "version": CLAIM_VERSION,
        "assets": claim.d,
        "claim": {str(tree.ids[n]): [format_number(v) for v in vec] for n, vec in enumerate(claim.values)},
    }


def save_json(obj: Any, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")
