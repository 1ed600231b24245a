"""Command-line front end: builds or loads a game, runs the requested
analyses, and emits one deterministic JSON report.

Exit codes: 0 success, 2 usage error, 3 validation error, 4 resource/budget
error.  Reports go to stdout (or --out); progress notes go to stderr only.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import BellToolError, ResourceError, ValidationError
from .games import (
    LinearGame,
    Partition,
    build_chsh_d,
    build_chshn_d,
    build_mermin3,
    build_nlc_d,
    cc_protocol_run,
    game_signs,
    parse_game_file,
)
from .graphs import (
    export_graph,
    graph_spectrum_check,
    independence_number,
    shannon_certify,
    xor_game_graph,
)
from .quantum import born_box, diew_verdict, ghz3_state, mermin3_measurements, parse_strategy
from .values import analyze, linear_norm_bound

REPORT_SCHEMA_VERSION = "1.0.0"


def report_schema_version() -> str:
    """Semantic version of the JSON report schema."""
    return REPORT_SCHEMA_VERSION


def _format_floats(obj):
    """Round every float to 12 significant digits; reject NaN/Inf."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValidationError("report contains a non-finite number")
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _format_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_format_floats(v) for v in obj]
    if isinstance(obj, np.floating):
        return _format_floats(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(_format_floats(report), indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _base_report(args, command: str) -> dict:
    return {
        "tool": "belltool",
        "version": __version__,
        "schema_version": REPORT_SCHEMA_VERSION,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "command": command,
        "seed": args.seed,
        "config": {
            k: v
            for k, v in sorted(vars(args).items())
            if k not in ("func",) and v is not None
        },
    }


def _load_game(args) -> LinearGame:
    name = args.game
    if name == "chsh-d":
        if args.d is None:
            raise ValidationError("--game chsh-d requires --d")
        return build_chsh_d(args.d)
    if name == "chshn-d":
        if args.d is None or args.n is None:
            raise ValidationError("--game chshn-d requires --d and --n")
        return build_chshn_d(args.n, args.d)
    if name == "mermin3":
        return build_mermin3()
    if name == "nlc-d":
        if args.d is None or args.n is None:
            raise ValidationError("--game nlc-d requires --d and --n")
        rng = np.random.default_rng(args.seed)
        shape = (args.d,) * (args.n - 1)
        h = rng.integers(0, args.d, size=shape) if shape else np.array(int(rng.integers(0, args.d)))
        ptilde = np.full(shape, 1.0 / args.d ** (args.n - 1)) if shape else np.array(1.0)
        return build_nlc_d(args.d, args.n, h, ptilde)
    path = Path(name)
    if path.suffix == ".json" or path.exists():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read game file {name}: {exc}") from exc
        return parse_game_file(text)
    raise ValidationError(
        f"unknown game {name!r}: expected chsh-d, chshn-d, mermin3, nlc-d or a .json path"
    )


def _game_summary(game: LinearGame) -> dict:
    return {
        "players": game.n_players,
        "inputs": list(game.input_sizes),
        "group": {"cyclic": list(game.group.orders)},
        "uniform": game.is_uniform(),
    }


def _cmd_value(args) -> int:
    game = _load_game(args)
    analyses = [a.strip() for a in args.analyses.split(",") if a.strip()]
    report = _base_report(args, "value")
    report["game"] = _game_summary(game)
    partition = None
    if args.partition:
        partition = Partition(tuple(int(t) for t in args.partition.split(",")))
    result = analyze(
        game,
        [a for a in analyses if a != "bound" or partition is None],
        seed=args.seed,
        restarts=args.restarts,
        tol=args.tol,
        budget=args.budget,
        workers=args.workers,
    )
    payload = result.to_dict()
    if partition is not None and "bound" in analyses:
        payload["norm_bound"] = linear_norm_bound(game, partition)
        payload["norm_bound_partition"] = list(partition.members)
        payload["norm_bound_exceeds_one"] = payload["norm_bound"] > 1.0 + 1e-12
    report["analyses"] = payload
    _emit(report, args.out)
    return 0


def _cmd_graph(args) -> int:
    game = _load_game(args)
    if game.n_players != 2 or game.group.size != 2 or not game.is_uniform():
        raise ValidationError("graph analyses need a uniform-input 2-player binary game")
    signs = game_signs(game)
    if signs.shape[0] != signs.shape[1]:
        raise ValidationError("graph analyses need equal input counts")
    gg = xor_game_graph(signs)
    report = _base_report(args, "graph")
    report["game"] = _game_summary(game)
    body: dict = {
        "vertices": gg.graph.n_vertices,
        "degree": int(gg.graph.degrees()[0]),
    }
    m = signs.shape[0]
    if 2 <= m <= 12:
        spec = graph_spectrum_check(signs)
        body["spectrum_matches"] = spec.ok
        body["spectrum_max_mismatch"] = spec.max_mismatch
        body["spectrum"] = [float(v) for v in spec.computed]
    if gg.graph.n_vertices <= args.budget:
        alpha, witness = independence_number(gg.graph, budget=args.budget)
        body["independence_number"] = alpha
        body["independent_set"] = list(witness)
    if args.certify_shannon:
        cert = shannon_certify(signs, budget=args.budget)
        body["shannon"] = {
            "certified": cert.certified,
            "alpha": cert.alpha,
            "alpha_source": cert.alpha_source,
            "sign_norm": cert.sign_norm,
            "witness_value": cert.witness_value,
            "vectors_found": cert.vectors_found,
        }
    if args.export:
        Path(args.export).write_text(export_graph(gg.graph), encoding="utf-8")
        body["exported_to"] = args.export
    report["analyses"] = body
    _emit(report, args.out)
    return 0


def _cmd_diew(args) -> int:
    game = _load_game(args)
    if args.strategy:
        state, meas = parse_strategy(Path(args.strategy).read_text(encoding="utf-8"))
    elif args.game == "mermin3":
        state, meas = ghz3_state(), mermin3_measurements()
    else:
        raise ValidationError("diew needs --strategy unless --game mermin3")
    verdict = diew_verdict(game, state, meas)
    report = _base_report(args, "diew")
    report["game"] = _game_summary(game)
    report["analyses"] = {
        "bisep_bound": verdict.bisep_bound,
        "quantum": verdict.quantum,
        "witnessed": verdict.witnessed,
        "traceless_observables": verdict.traceless,
        "visibility_threshold": verdict.visibility_threshold,
        "visibility_threshold_exact": verdict.visibility_threshold_exact,
    }
    _emit(report, args.out)
    return 0


def _cmd_cc_sim(args) -> int:
    d, n = args.d, args.n
    if d is None or n is None:
        raise ValidationError("cc-sim requires --d and --n")
    if args.f == "product":
        table = np.ones((d,) * n, dtype=int)
        for idx in np.ndindex(*table.shape):
            v = 1
            for x in idx:
                v = (v * x) % d
            table[idx] = v
    else:
        raw = json.loads(Path(args.f).read_text(encoding="utf-8"))
        table = np.asarray(raw, dtype=int)
    result = cc_protocol_run(d, n, table, trials=args.trials, seed=args.seed)
    report = _base_report(args, "cc-sim")
    report["analyses"] = {
        "ok": result.ok,
        "dits_communicated": result.dits_communicated,
        "boxes_used": result.boxes_used,
        "trials": args.trials,
    }
    _emit(report, args.out)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--game", required=False, help="builder name or game file path")
    parser.add_argument("--d", type=int, help="alphabet / field size for builders")
    parser.add_argument("--n", type=int, help="player or string count for builders")
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomized steps")
    parser.add_argument("--restarts", type=int, default=8, help="ascent restarts")
    parser.add_argument("--tol", type=float, default=1e-10, help="iteration tolerance")
    parser.add_argument("--budget", type=int, default=10 ** 9, help="enumeration budget")
    parser.add_argument(
        "--workers", type=int, default=os.cpu_count() or 1, help="max parallel workers"
    )
    parser.add_argument("--out", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="belltool",
        description="values, bounds and certificates for linear nonlocal games",
    )
    parser.add_argument("--version", action="version", version=f"belltool {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_value = sub.add_parser("value", help="classical/NS/quantum values and bounds")
    _add_common(p_value)
    p_value.add_argument(
        "--analyses",
        default="classical,ns,bound",
        help="comma list: classical,ns,quantum-xor,bound,no-advantage,trivial",
    )
    p_value.add_argument("--partition", help="comma list of 0-based players for the bound")
    p_value.set_defaults(func=_cmd_value)

    p_graph = sub.add_parser("graph", help="game-graph construction and certification")
    _add_common(p_graph)
    p_graph.add_argument("--certify-shannon", action="store_true")
    p_graph.add_argument("--export", help="write the adjacency list to this path")
    p_graph.set_defaults(func=_cmd_graph, budget_default=64)
    p_graph.set_defaults(budget=64)

    p_diew = sub.add_parser("diew", help="device-independent entanglement witness")
    _add_common(p_diew)
    p_diew.add_argument("--strategy", help="strategy JSON (state + measurements)")
    p_diew.set_defaults(func=_cmd_diew)

    p_cc = sub.add_parser("cc-sim", help="communication protocol simulation")
    _add_common(p_cc)
    p_cc.add_argument("--trials", type=int, default=100)
    p_cc.add_argument("--f", default="product", help="'product' or a JSON table path")
    p_cc.set_defaults(func=_cmd_cc_sim)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("value", "graph", "diew") and not args.game:
        parser.error(f"{args.command} requires --game")
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"belltool: resource error: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"belltool: validation error: {exc}", file=sys.stderr)
        return 3
    except BellToolError as exc:
        print(f"belltool: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run())
