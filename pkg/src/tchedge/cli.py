"""Command line interface: ``tchedge <command> --market FILE [--claim FILE] ...``.

Exit codes: 0 success, 2 validation error, 3 solver error.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from importlib import resources
from pathlib import Path

from .cones import tighten_costs
from .dual import (
    check_counterexample_conditions,
    build_counterexample_claim,
    dual_price,
    duality_gap_report,
    strictly_positive_cps,
    theta_price,
)
from .errors import SolverError, TcHedgeError, ValidationError
from .fileio import load_claim, load_market
from .lp import MODES, RATIONAL, float_tolerance
from .numeric import as_vector
from .primal import superhedge_price
from .report import (
    PriceReport,
    conversion_dict,
    dual_dict,
    na_dict,
    num,
    render_json,
    render_table,
    strategy_dict,
    vec,
)
from .tree import DEFAULT_STOPPING_CAP

BUNDLED_PREFIX = "pkg:"


def resolve_path(value: str):
    """``pkg:NAME`` names a fixture shipped in ``tchedge/data``; anything else is a path."""
    if value.startswith(BUNDLED_PREFIX):
        return resources.files("tchedge") / "data" / value[len(BUNDLED_PREFIX):]
    return Path(value)


def parse_vector(text: str):
    """``"0,1"``, ``"0 1"``, ``"[0, 1]"`` or ``"1/10,0"``."""
    parts = [p for p in re.split(r"[,\s]+", text.strip().strip("[]()")) if p]
    if not parts:
        raise ValidationError(f"empty vector {text!r}")
    return as_vector(parts)


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise ValidationError(f"--{name} is required for '{args.command}'")
    return value


def _load(args, with_claim=True):
    mf = load_market(resolve_path(_need(args, "market")))
    claim = load_claim(resolve_path(_need(args, "claim")), mf.tree) if with_claim else None
    return mf.market, claim


def cmd_price(args) -> dict:
    market, claim = _load(args)
    direction = parse_vector(args.direction) if args.direction else None
    res = superhedge_price(market, claim, args.mode, direction)
    out = {"h_primal": num(res.value)}
    if direction is not None:
        out["direction"] = vec(direction)
    out["strategy"] = strategy_dict(market, res.plan)
    return out


def cmd_dual(args) -> dict:
    market, claim = _load(args)
    res = dual_price(market, claim, args.mode)
    return {"h_dual": num(res.value), "dual": dual_dict(market.tree, res.process)}


def cmd_theta(args) -> dict:
    market, claim = _load(args)
    res = theta_price(market, claim, args.theta_cap, args.mode)
    tree = market.tree
    return {
        "h_theta": num(res.value),
        "stopping_time": sorted((tree.ids[n] for n in res.stopping_time.stops), key=str),
        "diagnostics": {"stopping_times": res.count},
    }


def cmd_gap(args) -> dict:
    market, claim = _load(args)
    gap = duality_gap_report(market, claim, args.mode, args.theta_cap)
    cert = strictly_positive_cps(market, args.mode)
    return PriceReport.from_gap(market, claim, gap, cert, mode=args.mode).to_dict()


def cmd_na_check(args) -> dict:
    market, _ = _load(args, with_claim=False)
    cert = strictly_positive_cps(market, args.mode)
    return {"na": na_dict(market.tree, cert)}


def cmd_convert(args) -> dict:
    market, claim = _load(args)
    res = dual_price(market, claim, args.mode)
    out = {"h_dual": num(res.value), "dual": dual_dict(market.tree, res.process)}
    out["conversions"] = conversion_dict(market, res.process, claim)
    return out


def cmd_counterexample(args) -> dict:
    market, _ = _load(args, with_claim=False)
    x = parse_vector(_need(args, "x"))
    claim = build_counterexample_claim(market, x)
    cond = check_counterexample_conditions(market, x)
    gap = duality_gap_report(market, claim, args.mode, args.theta_cap)
    tree = market.tree
    out = {
        "x": vec(x),
        "claim": [{"node": tree.ids[n], "value": vec(claim[n])} for n in range(len(tree))],
        "conditions": {
            "c0": num(cond.c0),
            "c1": [{"node": k, "value": num(v)} for k, v in cond.c1.items()],
            "cond_ii": cond.cond_ii,
            "cond_i_sufficient": cond.cond_i_sufficient,
            "efficient_at_root": cond.efficient_at_root,
        },
    }
    out.update(PriceReport.from_gap(market, claim, gap, with_conversions=False).to_dict())
    return out


def cmd_tighten(args) -> dict:
    mf = load_market(resolve_path(_need(args, "market")))
    market = mf.market
    nodes = []
    for n, cone in enumerate(market.cones):
        if not cone.is_market:
            continue
        tight = tighten_costs(cone.costs, cone.prices)
        d = len(cone.prices)
        changes = [{"i": i + 1, "j": j + 1, "from": num(cone.costs[i][j]), "to": num(tight[i][j])}
                   for i in range(d) for j in range(d) if tight[i][j] != cone.costs[i][j]]
        nodes.append({"node": market.tree.ids[n], "changed": bool(changes), "changes": changes,
                      "costs": [vec(row) for row in tight]})
    return {"changed": any(e["changed"] for e in nodes), "nodes": nodes}


COMMANDS = {
    "price": (cmd_price, "super-hedging price and hedging strategy"),
    "dual": (cmd_dual, "dual price and optimal consistent dual process"),
    "theta": (cmd_theta, "stopping-time dual value"),
    "gap": (cmd_gap, "full report: primal, dual, stopping-time value, gap, certificates"),
    "na-check": (cmd_na_check, "search for a strictly positive consistent dual process"),
    "convert": (cmd_convert, "node-measure and randomized stopping time of the optimal dual"),
    "counterexample": (cmd_counterexample, "build the counterexample claim for --x and report the gap"),
    "tighten": (cmd_tighten, "show how cost tightening changes the cost matrices"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--market", help="market JSON file (pkg:NAME for a bundled fixture)")
    common.add_argument("--claim", help="claim JSON file (pkg:NAME for a bundled fixture)")
    common.add_argument("--mode", choices=MODES, default=RATIONAL)
    common.add_argument("--tol", type=float, default=1e-9, help="float-mode tolerance")
    common.add_argument("--output", choices=("json", "table"), default="table")
    common.add_argument("--theta-cap", type=int, default=DEFAULT_STOPPING_CAP,
                        help="maximum number of stopping times to enumerate")
    common.add_argument("--direction", help="initial-holding direction, e.g. 1,0")
    common.add_argument("--x", help="position vector for 'counterexample', e.g. 0,1")
    parser = argparse.ArgumentParser(
        prog="tchedge", description="Super-hedging of American claims under proportional transaction costs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _error_payload(exc: Exception, code: int) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
    pointer = getattr(exc, "pointer", None)
    if pointer is not None:
        err["pointer"] = pointer
    return {"error": err}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        with float_tolerance(args.tol):
            payload = handler(args)
    except TcHedgeError as e:
        exc, code = e, e.exit_code
    except OSError as e:
        exc, code = ValidationError(str(e)), ValidationError.exit_code
    else:
        text = render_json(payload) if args.output == "json" else render_table(payload)
        print(text, file=stdout)
        if args.output == "table" and payload.get("na", {}).get("arbitrage_free") is False:
            print("arbitrage detected", file=stdout)
        return 0
    if args.output == "json":
        print(render_json(_error_payload(exc, code)), file=stdout)
    else:
        print(f"error ({type(exc).__name__}): {exc}", file=stderr)
    return code


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    return run(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
