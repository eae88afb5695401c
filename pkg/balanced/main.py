"""
Command-line entry point for the minimal balanced collections toolkit
"""

import argparse
import json
import sys
from typing import Any, Dict, List, Optional, Sequence

from balanced import __version__
from balanced.config import VALID_LOG_LEVELS, config
from balanced.errors import ResourceLimitError, VerificationError
from balanced.models import EnumerationResult, ZeroOneMatrix
from balanced.services import (
    counting_service,
    enumeration_service,
    game_service,
    orbit_service,
    verify_service,
    weights_service,
)
from balanced.services.storage_service import (
    LambdaCacheStore,
    load_game,
    load_matrix,
    read_collections_jsonl,
    write_collections_jsonl,
)
from balanced.utils.exact_utils import format_rational, members_mask
from balanced.utils.logging_utils import Stopwatch, get_logger, setup_logging

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

logger = get_logger(__name__)


def _emit(payload: Any) -> None:
    """Structured output: JSON on stdout only"""
    sys.stdout.write(json.dumps(payload, indent=2))
    sys.stdout.write("\n")


def _pretty(args: argparse.Namespace, title: str, rows: Sequence[Sequence[Any]]) -> None:
    if not args.pretty:
        return
    print(title, file=sys.stderr)
    widths = [max(len(str(row[i])) for row in rows) for i in range(len(rows[0]))] if rows else []
    for row in rows:
        print("  " + "  ".join(str(cell).rjust(w) for cell, w in zip(row, widths)), file=sys.stderr)


def _store(args: argparse.Namespace) -> LambdaCacheStore:
    return LambdaCacheStore(args.cache)


# --- count ---------------------------------------------------------------------


def _counts_for(args: argparse.Namespace) -> Dict[int, int]:
    n = args.n
    ms = [args.m] if args.m else list(range(1, n + 1))
    if args.method == "formula":
        return {m: counting_service.count_b(n, m, store=_store(args), jobs=args.jobs) for m in ms}
    if args.method == "closed-form":
        return {m: counting_service.closed_form(n, m) for m in ms}
    result = enumeration_service.enumerate_minimal(n, mode="lambda-route", jobs=args.jobs)
    return {m: result.per_m_counts[m - 1] for m in ms}


def cmd_count(args: argparse.Namespace) -> int:
    """B_{n,m} for one m or all m by the chosen method"""
    if args.m is not None and not 1 <= args.m <= args.n:
        raise ValueError(f"--m must lie in 1..{args.n}")
    counts = _counts_for(args)
    if args.format == "csv":
        sys.stdout.write("n,m,B\n")
        for m, count in counts.items():
            sys.stdout.write(f"{args.n},{m},{count}\n")
    elif args.m:
        _emit({"n": args.n, "m": args.m, "method": args.method, "count": counts[args.m]})
    else:
        _emit({"n": args.n, "method": args.method, "per_m": list(counts.values()), "total": sum(counts.values())})
    _pretty(args, f"B_{args.n},m ({args.method})", [("m", "count")] + [(m, c) for m, c in counts.items()])
    return EXIT_OK


# --- enumerate -----------------------------------------------------------------


def _stream_to_disk(args: argparse.Namespace) -> Dict[str, Any]:
    stream = enumeration_service.stream_minimal(args.n, mode=args.mode, jobs=args.jobs, node_budget=args.node_budget)
    written = write_collections_jsonl(args.out, stream)
    keys = [item.collection.key() for item in read_collections_jsonl(args.out)]
    return {
        "n": args.n,
        "mode": args.mode,
        "total": written,
        "checksum": enumeration_service.collection_checksum(keys),
        "out": args.out,
    }


def cmd_enumerate(args: argparse.Namespace) -> int:
    """Enumerate minimal balanced collections, or the 2-element census"""
    if args.two_element:
        census = enumeration_service.enumerate_two_element(args.n)
        _emit(census.model_dump(mode="json"))
        _pretty(args, f"2-element collections on [{args.n}]", list(census.by_shape.items()))
        return EXIT_OK

    if args.n > config.MAX_ENUMERATION_N:
        if not args.out:
            raise ValueError(f"n = {args.n} is only enumerated as a stream to disk; pass --out")
        _emit(_stream_to_disk(args))
        return EXIT_OK

    try:
        result = enumeration_service.enumerate_minimal(args.n, mode=args.mode, jobs=args.jobs, node_budget=args.node_budget)
    except ResourceLimitError as e:
        if isinstance(e.partial, EnumerationResult):
            _emit(e.partial.summary())
        raise

    expected = tuple(counting_service.count_b(args.n, m, store=_store(args), jobs=args.jobs) for m in range(1, args.n + 1))
    if expected != result.per_m_counts:
        raise VerificationError(
            f"[CLI] Enumerated per-size counts {result.per_m_counts} differ from formula counts {expected}"
        )
    if args.out:
        write_collections_jsonl(args.out, result.items)
    _emit(result.summary())
    _pretty(args, f"Minimal balanced collections on [{args.n}]", [("m", "count")] + list(enumerate(result.per_m_counts, 1)))
    return EXIT_OK


# --- lambda --------------------------------------------------------------------


def cmd_lambda(args: argparse.Namespace) -> int:
    """Weight-vector classes of size m, optionally checked against the brute-force oracle"""
    lam = weights_service.generate_lambda(args.m, store=_store(args), jobs=args.jobs)
    payload = lam.model_dump(mode="json")
    payload["class_count"] = len(lam.classes)
    payload["total_vectors"] = lam.total_vectors
    if args.oracle:
        oracle = weights_service.lambda_bruteforce_oracle(args.m, jobs=args.jobs)
        if oracle.keys() != lam.keys():
            raise VerificationError(f"[CLI] Generated and brute-force classes differ for m = {args.m}")
        payload["oracle_agrees"] = True
    _emit(payload)
    _pretty(
        args,
        f"Weight-vector classes, m = {args.m}",
        [("vector", "multiplicity")] + [(" ".join(format_rational(w) for w in c.vector), c.multiplicity) for c in lam.classes],
    )
    return EXIT_OK


# --- orbit ---------------------------------------------------------------------


def _orbit_matrix(args: argparse.Namespace) -> ZeroOneMatrix:
    if args.matrix:
        return load_matrix(args.matrix)
    if args.columns is None or args.n is None:
        raise ValueError("orbit needs --matrix FILE or both --columns and --n")
    columns = json.loads(args.columns)
    return ZeroOneMatrix(n=args.n, columns=tuple(members_mask(col) for col in columns))


def cmd_orbit(args: argparse.Namespace) -> int:
    summary = orbit_service.orbit_summary(_orbit_matrix(args), full=args.full)
    _emit(summary.to_payload())
    _pretty(
        args,
        "Orbit under column inversions",
        [("nonzero", summary.size_nonzero), ("positive", summary.size_positive), ("|U|", summary.unificator_count)],
    )
    return EXIT_OK


# --- core ----------------------------------------------------------------------


def cmd_core(args: argparse.Namespace) -> int:
    game = load_game(args.game)
    if args.method == "lp":
        report = game_service.core_nonempty_lp(game)
    else:
        if args.mbc:
            mbcs = enumeration_service.collect_result(game.n, read_collections_jsonl(args.mbc))
        else:
            mbcs = enumeration_service.enumerate_minimal(game.n, mode="lambda-route", jobs=args.jobs)
        report = game_service.core_nonempty_bondareva(game, mbcs)
    _emit(report.to_payload())
    return EXIT_OK


# --- verify --------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    """Run verification suites; exit 1 when any suite reports a difference"""
    # without --extended the runner follows BALANCED_EXTENDED
    runner = verify_service.VerifyRunner(
        store=_store(args), jobs=args.jobs, extended=args.extended or None, seed=args.seed, samples=args.samples
    )
    names = verify_service.SUITES if args.suite == "all" else (args.suite,)
    reports = [verify_service.run_suite(name, runner, args.max_n) for name in names]
    passed = all(r.passed for r in reports)
    _emit({"passed": passed, "suites": [r.model_dump(mode="json") for r in reports]})
    rows = [(r.name, r.checked, "pass" if r.passed else "FAIL") for r in reports]
    _pretty(args, "Verification", [("suite", "checks", "result")] + rows)
    return EXIT_OK if passed else EXIT_MISMATCH


# --- bench ---------------------------------------------------------------------


def cmd_bench(args: argparse.Namespace) -> int:
    """Wall times per (n, route); timings are the output here"""
    rows: List[Dict[str, Any]] = []
    for n in range(1, args.max_n + 1):
        for route in args.routes:
            watch = Stopwatch()
            if route == "formula":
                total = counting_service.count_b_total(n, store=_store(args), jobs=args.jobs).total
            else:
                total = enumeration_service.enumerate_minimal(n, mode=route, jobs=args.jobs).total
            rows.append({"n": n, "route": route, "total": total, "seconds": round(watch.seconds, 3)})
    _emit({"version": __version__, "jobs": args.jobs or config.JOBS, "runs": rows})
    table = [(r["n"], r["route"], r["total"], r["seconds"]) for r in rows]
    _pretty(args, "Benchmark", [("n", "route", "total", "seconds")] + table)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="balanced", description="Exact enumeration and counting of minimal balanced collections"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", choices=VALID_LOG_LEVELS, type=str.upper, default=None)
    parser.add_argument("--log-file", default=None, help="Log file path; empty disables file logging")
    parser.add_argument("--jobs", type=int, default=None, help="Worker processes (default: CPU count)")
    parser.add_argument("--cache", default=None, help="Weight-vector cache directory")
    parser.add_argument("--pretty", action="store_true", help="Human-readable tables on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="Count minimal balanced collections by size")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--method", choices=("formula", "enumerate", "closed-form"), default="formula")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("enumerate", help="Enumerate minimal balanced collections")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=enumeration_service.MODES, default="search")
    p.add_argument("--out", default=None, help="JSON-lines output file")
    p.add_argument("--two-element", action="store_true", help="Census of collections of 2-element sets")
    p.add_argument("--node-budget", type=int, default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("lambda", help="Weight-vector classes of size m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="Cross-check against the brute-force oracle")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("orbit", help="Orbit of a matrix under column inversions")
    p.add_argument("--matrix", default=None, help='Matrix JSON file {"n": 3, "columns": [[1, 2], ...]}')
    p.add_argument("--columns", default=None, help="Columns as a JSON list of member lists")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--full", action="store_true", help="Include every inversion's classification")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("core", help="Core nonemptiness of a TU game")
    p.add_argument("--game", required=True)
    p.add_argument("--mbc", default=None, help="JSON-lines minimal balanced collections for the game's n")
    p.add_argument("--method", choices=("bondareva", "lp"), default="bondareva")
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("verify", help="Run verification suites")
    p.add_argument("--suite", choices=verify_service.SUITES + ("all",), default="all")
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument(
        "--extended", action="store_true", help="Full scopes: n = 7 tables and 1000 random games per n in the games suite"
    )
    p.add_argument(
        "--samples", type=int, default=None, help="Random games per n in the games suite (default 50, 1000 with --extended) and lifts per n in the orbits suite (default 100, 10000 with --extended)"
    )
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="Wall times per n and route")
    p.add_argument("--max-n", type=int, default=5)
    routes = ("formula", "search", "lambda-route")
    p.add_argument("--routes", nargs="+", choices=routes, default=list(routes))
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    if args.jobs is not None:
        config.JOBS = args.jobs
    if args.cache is not None:
        config.CACHE_DIR = args.cache
    setup_logging(log_file=args.log_file, log_level=args.log_level)

    try:
        config.validate()
        logger.debug(f"[CLI] {args.command} with {vars(args)}")
        return args.func(args)
    except VerificationError as e:
        logger.error(f"[CLI] Verification failed: {e}")
        return EXIT_MISMATCH
    except ResourceLimitError as e:
        logger.error(f"[CLI] Resource limit: {e}")
        return EXIT_RESOURCE
    except (ValueError, OSError) as e:
        logger.error(f"[CLI] {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
