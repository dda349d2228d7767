"""Command-line front end.

Exit codes: 0 = success, 1 = input/usage error, 2 = a mathematically
meaningful denial (arbitrage detected, no dominating measure, refuted bound,
not a supermartingale) so scripts can branch on market properties. Every
certificate is re-verified before it is printed. Exact-mode `--json` output
is byte-identical across runs except for the wall-time field.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from . import lp
from .arbitrage import find_dominating_mm, global_na, scan_nodes, semistatic_na, verify_witness
from .decompose import (
    AdaptedProcess,
    NotSupermartingale,
    confirm_by_sampling,
    optional_decomposition,
    verify_decomposition,
)
from .model import Model, ModelError, load_model, wealth
from .oracle import EmptyPolytope, InstanceTooLarge, enumerate_vertices
from .polar import compute_support, reference_measure
from .rational import format_with_decimal
from .superhedge import (
    ArbitrageDetected,
    LagrangeGap,
    Proved,
    Refuted,
    Replicable,
    check_complete,
    check_replicable,
    price_interval,
    prove_inequality,
    superhedge_dynamic,
    superhedge_semistatic,
)

F = Fraction

_COMMANDS = (
    "validate",
    "na",
    "mm",
    "price",
    "hedge",
    "interval",
    "replicate",
    "complete",
    "decompose",
    "prove",
)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.dump_lp:
        lp.set_dump_file(args.dump_lp)
    started = time.perf_counter()
    try:
        code, report = _dispatch(args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InstanceTooLarge, EmptyPolytope, LagrangeGap, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except lp.NumericalBreakdown as exc:
        print(f"error: {exc}; retry with --exact", file=sys.stderr)
        return 1
    finally:
        if args.dump_lp:
            lp.set_dump_file(None)
    report["wall_time_s"] = round(time.perf_counter() - started, 6)
    if args.json:
        print(json.dumps(report, indent=2))
    return code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robusthedge",
        description="Robust pricing and hedging on finite scenario trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--model", required=True, help="model document (JSON)")
        p.add_argument("--claim", help="claim name from the document")
        p.add_argument("--process", help="adapted process name (decompose)")
        p.add_argument("--bound", help="bound to prove (rational)")
        p.add_argument("--method", choices=("dp", "lp", "both"), default=None)
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--exact", action="store_true")
        mode.add_argument("--float", dest="float_mode", action="store_true")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--json", action="store_true")
        p.add_argument("--dump-lp", dest="dump_lp", metavar="FILE")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--seed", type=int, default=0,
                       help="seed randomized self-checks (decompose)")
        if name == "mm":
            p.add_argument("--dominate", default="uniform",
                           help="measure name from the document, or 'uniform'")
            p.add_argument("--enumerate", dest="enumerate_vertices",
                           action="store_true", help=argparse.SUPPRESS)
    return parser


def _mode_of(args) -> lp.Mode:
    if args.float_mode:
        return lp.float_mode(args.tol)
    if args.exact:
        return lp.EXACT
    env = os.environ.get("ROBUSTHEDGE_MODE", "exact").strip().lower()
    if env == "float":
        return lp.float_mode(args.tol)
    return lp.EXACT


def _load(args) -> tuple[Model, str]:
    with open(args.model, "rb") as handle:
        blob = handle.read()
    digest = hashlib.sha256(blob).hexdigest()
    return load_model(blob.decode("utf-8")), digest


def _rat(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(x)


def _show(x) -> str:
    return format_with_decimal(x)


def _strategy_json(model: Model, strategy) -> dict:
    return {
        "initial": _rat(strategy.initial),
        "static": {
            opt.name: _rat(strategy.static[k]) if k < len(strategy.static) else "0"
            for k, opt in enumerate(model.options)
        },
        "dynamic": {
            node: [_rat(v) for v in vec] for node, vec in sorted(strategy.dynamic.items())
        },
    }


def _measure_json(measure) -> dict:
    return {leaf: _rat(w) for leaf, w in sorted(measure.weights.items())}


def _claim_of(args, model: Model):
    if not args.claim:
        raise ValueError("--claim NAME is required for this command")
    claim = model.claims.get(args.claim)
    if claim is None:
        raise ValueError(f"claim {args.claim!r} is not in the document")
    return claim


def _check_strategy_superhedges(model, strategy, claim, mask, mode) -> None:
    if not mode.exact:
        return
    for leaf in mask.relevant_leaves:
        if wealth(model.tree, strategy, model.options, leaf) < claim(leaf):
            raise RuntimeError("refusing to print an unverified certificate")


def _dispatch(args) -> tuple[int, dict]:
    model, digest = _load(args)
    mode = _mode_of(args)
    mask = compute_support(model.tree)
    report: dict = {
        "command": args.command,
        "model_digest": digest,
        "mode": {"kind": "exact"} if mode.exact else {"kind": "float", "tolerance": mode.tolerance},
    }
    handler = globals()[f"_cmd_{args.command}"]
    return handler(args, model, mask, mode, report)


def _cmd_validate(args, model, mask, mode, report) -> tuple[int, dict]:
    tree = model.tree
    report.update(
        {
            "horizon": tree.horizon,
            "dimension": tree.dimension,
            "nodes": sum(len(level) for level in tree.levels),
            "leaves": len(tree.leaves),
            "relevant_leaves": len(mask.relevant_leaves),
            "options": [opt.name for opt in model.options],
            "claims": sorted(model.claims),
            "valid": True,
        }
    )
    if not args.json:
        print(
            f"valid model: T={tree.horizon} d={tree.dimension} "
            f"nodes={report['nodes']} leaves={report['leaves']} "
            f"(relevant {report['relevant_leaves']}) "
            f"options={len(model.options)} claims={len(model.claims)}"
        )
    return 0, report


def _cmd_na(args, model, mask, mode, report) -> tuple[int, dict]:
    tree = model.tree
    rows = []
    for node_report in scan_nodes(tree, mask, mode, args.threads):
        rows.append(
            {
                "node": node_report.node,
                "status": "Pass" if node_report.passed else "Fail",
                "certificate": None
                if node_report.certificate is None
                else [_rat(v) for v in node_report.certificate],
            }
        )
    stocks = global_na(tree, mask, mode, args.threads)
    verdict = {"stocks": "Pass" if stocks is None else "Fail"}
    if stocks is not None:
        _check_arbitrage_strategy(model, stocks, mask, mode, with_options=False)
        verdict["strategy"] = _strategy_json(model, stocks.strategy)
        verdict["witness_leaves"] = list(stocks.witness_leaves)
    code = 0 if stocks is None else 2
    if model.options:
        semi = semistatic_na(tree, mask, model.options, mode)
        verdict["semistatic"] = "Pass" if semi is None else "Fail"
        if semi is not None:
            _check_arbitrage_strategy(model, semi, mask, mode, with_options=True)
            verdict["semistatic_strategy"] = _strategy_json(model, semi.strategy)
            verdict["semistatic_witness_leaves"] = list(semi.witness_leaves)
            code = 2
    report["nodes"] = rows
    report["verdict"] = verdict
    if not args.json:
        width = max(len(r["node"]) for r in rows) if rows else 4
        print(f"{'node':<{width}}  status  certificate")
        for r in rows:
            cert = " ".join(r["certificate"]) if r["certificate"] else "-"
            print(f"{r['node']:<{width}}  {r['status']:<6}  {cert}")
        print(f"stocks-only NA: {verdict['stocks']}")
        if stocks is not None:
            print(f"  arbitrage at {next(iter(stocks.strategy.dynamic))!r}, "
                  f"witness leaves {', '.join(stocks.witness_leaves)}")
        if model.options:
            print(f"semistatic NA (with options): {verdict['semistatic']}")
    return code, report


def _check_arbitrage_strategy(model, found, mask, mode, with_options) -> None:
    if not mode.exact:
        return
    options = model.options if with_options else ()
    for leaf in mask.relevant_leaves:
        value = wealth(model.tree, found.strategy, options, leaf)
        if value < 0 or ((leaf in found.witness_leaves) != (value > 0)):
            raise RuntimeError("refusing to print an unverified certificate")


def _cmd_mm(args, model, mask, mode, report) -> tuple[int, dict]:
    tree = model.tree
    if getattr(args, "enumerate_vertices", False):
        polytope = enumerate_vertices(tree, mask, model.options)
        report["vertices"] = [_measure_json(v) for v in polytope.vertices]
        if not args.json:
            for v in polytope.vertices:
                print(" ".join(f"{leaf}:{w}" for leaf, w in sorted(v.weights.items())))
            print(f"{len(polytope.vertices)} vertex(es)")
        return 0, report
    name = args.dominate
    if name == "uniform":
        p = reference_measure(tree)
    else:
        p = model.measures.get(name)
        if p is None:
            raise ValueError(f"measure {name!r} is not in the document")
    witness = find_dominating_mm(tree, mask, model.options, p, mode)
    report["dominate"] = name
    if witness is None:
        report["witness"] = None
        if not args.json:
            print("none exists")
        return 2, report
    if mode.exact and verify_witness(tree, mask, model.options, witness):
        raise RuntimeError("refusing to print an unverified certificate")
    report["witness"] = _measure_json(witness.q)
    if not args.json:
        for leaf, w in sorted(witness.q.weights.items()):
            print(f"{leaf}: {_show(w)}")
    return 0, report


def _price_both_ways(args, model, mask, mode):
    method = args.method
    if method is None:
        method = "dp" if not model.options else "lp"
    if method in ("dp", "both") and model.options:
        raise ValueError("--method dp needs a model without options; use lp")
    claim = _claim_of(args, model)
    results = {}
    if method in ("dp", "both"):
        price, surface, strategy = superhedge_dynamic(model.tree, mask, claim, mode)
        results["dp"] = (price, strategy)
    if method in ("lp", "both"):
        price, strategy, dual = superhedge_semistatic(
            model.tree, mask, claim, model.options, mode
        )
        results["lp"] = (price, strategy)
    if method == "both" and mode.exact and results["dp"][0] != results["lp"][0]:
        raise RuntimeError("dynamic and global prices disagree (bug)")
    price, strategy = results[method if method != "both" else "lp"]
    _check_strategy_superhedges(model, strategy, claim, mask, mode)
    return method, claim, price, strategy


def _cmd_price(args, model, mask, mode, report) -> tuple[int, dict]:
    try:
        method, _, price, _ = _price_both_ways(args, model, mask, mode)
    except ArbitrageDetected as exc:
        return _deny(args, report, str(exc))
    report.update({"claim": args.claim, "method": method, "price": _rat(price)})
    if not args.json:
        print(_show(price))
    return 0, report


def _cmd_hedge(args, model, mask, mode, report) -> tuple[int, dict]:
    try:
        method, _, price, strategy = _price_both_ways(args, model, mask, mode)
    except ArbitrageDetected as exc:
        return _deny(args, report, str(exc))
    report.update(
        {
            "claim": args.claim,
            "method": method,
            "price": _rat(price),
            "strategy": _strategy_json(model, strategy),
        }
    )
    if not args.json:
        print(json.dumps(report["strategy"], indent=2))
    return 0, report


def _cmd_interval(args, model, mask, mode, report) -> tuple[int, dict]:
    claim = _claim_of(args, model)
    try:
        interval = price_interval(model.tree, mask, claim, model.options, mode)
    except ArbitrageDetected as exc:
        return _deny(args, report, str(exc))
    report.update(
        {
            "claim": args.claim,
            "lower": _rat(interval.lower),
            "upper": _rat(interval.upper),
            "kind": interval.kind,
        }
    )
    if not args.json:
        if interval.kind == "Point":
            print(f"point {_show(interval.lower)}")
        else:
            print(f"open interval ({_show(interval.lower)}, {_show(interval.upper)})")
    return 0, report


def _cmd_replicate(args, model, mask, mode, report) -> tuple[int, dict]:
    claim = _claim_of(args, model)
    try:
        result = check_replicable(model.tree, mask, claim, model.options, mode)
    except ArbitrageDetected as exc:
        return _deny(args, report, str(exc))
    if isinstance(result, Replicable):
        _check_strategy_superhedges(model, result.strategy, claim, mask, mode)
        report.update(
            {
                "claim": args.claim,
                "replicable": True,
                "price": _rat(result.price),
                "strategy": _strategy_json(model, result.strategy),
            }
        )
        if not args.json:
            print(f"replicable at {_show(result.price)}")
    else:
        report.update(
            {
                "claim": args.claim,
                "replicable": False,
                "lower": _rat(result.interval.lower),
                "upper": _rat(result.interval.upper),
                "q_low": _measure_json(result.q_low),
                "q_high": _measure_json(result.q_high),
            }
        )
        if not args.json:
            print(
                f"not replicable: prices fill ({_show(result.interval.lower)}, "
                f"{_show(result.interval.upper)})"
            )
    return 0, report


def _cmd_complete(args, model, mask, mode, report) -> tuple[int, dict]:
    try:
        complete = check_complete(model.tree, mask, model.options, mode)
    except ArbitrageDetected as exc:
        return _deny(args, report, str(exc))
    report["complete"] = complete
    if not args.json:
        print("complete" if complete else "incomplete")
    return 0, report


def _cmd_decompose(args, model, mask, mode, report) -> tuple[int, dict]:
    if not args.process:
        raise ValueError("--process NAME is required for decompose")
    values = model.processes.get(args.process)
    if values is None:
        raise ValueError(f"process {args.process!r} is not in the document")
    process = AdaptedProcess(values)
    try:
        decomposition = optional_decomposition(model.tree, mask, process, mode)
    except ArbitrageDetected as exc:
        return _deny(args, report, str(exc))
    except NotSupermartingale as exc:
        report.update(
            {"process": args.process, "supermartingale": False,
             "node": exc.node, "gap": _rat(exc.gap)}
        )
        if not args.json:
            print(f"not a supermartingale: node {exc.node!r} gap {_show(exc.gap)}")
        return 2, report
    if mode.exact and verify_decomposition(model.tree, mask, process, decomposition):
        raise RuntimeError("refusing to print an unverified certificate")
    if mode.exact and args.seed:
        # randomized self-check of the supermartingale verdict
        import random as _random

        problems = confirm_by_sampling(
            model.tree, mask, process, _random.Random(args.seed), samples=100
        )
        if problems:
            raise RuntimeError(f"sampled self-check failed: {problems[0]}")
        report["sampled_self_check"] = "passed"
    report.update(
        {
            "process": args.process,
            "supermartingale": True,
            "H": _strategy_json(model, decomposition.strategy)["dynamic"],
            "K": {n: _rat(v) for n, v in sorted(decomposition.consumption.items())},
            "initial": _rat(decomposition.strategy.initial),
        }
    )
    if not args.json:
        print(json.dumps({"H": report["H"], "K": report["K"]}, indent=2))
    return 0, report


def _cmd_prove(args, model, mask, mode, report) -> tuple[int, dict]:
    claim = _claim_of(args, model)
    if args.bound is None:
        raise ValueError("--bound B is required for prove")
    bound = F(args.bound)
    try:
        result = prove_inequality(model.tree, mask, claim, bound, mode)
    except ArbitrageDetected as exc:
        return _deny(args, report, str(exc))
    report["claim"] = args.claim
    report["bound"] = _rat(bound)
    if isinstance(result, Proved):
        if mode.exact:
            for leaf in mask.relevant_leaves:
                if wealth(model.tree, result.strategy, (), leaf) < claim(leaf):
                    raise RuntimeError("refusing to print an unverified certificate")
        report["proved"] = True
        report["strategy"] = _strategy_json(model, result.strategy)
        if not args.json:
            print(f"proved: claim <= {_show(bound)} pathwise")
        return 0, report
    assert isinstance(result, Refuted)
    report["proved"] = False
    report["counterexample"] = _measure_json(result.q)
    report["expectation"] = _rat(result.expectation)
    if not args.json:
        print(
            f"refuted: expectation {_show(result.expectation)} exceeds "
            f"{_show(bound)} under a martingale measure"
        )
    return 2, report


def _deny(args, report, message) -> tuple[int, dict]:
    report["denied"] = message
    if not args.json:
        print(f"denied: {message}")
    return 2, report


if __name__ == "__main__":
    sys.exit(main())
