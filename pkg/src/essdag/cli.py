"""Command-line interface.

Exit status: 0 on success, 1 on a user error, 2 when an internal
invariant fails.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .arith import format_number
from .census import (edges_filter, essential_bounded, essential_by_indegree, essential_filtered,
                     indegree_vectors, sources_filter, table)
from .logic import LogicError, Vocabulary, parse_problem
from .normal_form import CardinalityConstraint
from .oracle import EssentialDagSpec, brute_wfomc

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2


class UsageError(Exception):
    pass


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--formula", help="sentence text")
    src.add_argument("--formula-file", type=Path, help="file with an optional 'pred ...' line and a sentence")
    p.add_argument("--pred", action="append", default=[], metavar="NAME/ARITY",
                   help="declare a predicate (repeatable)")
    p.add_argument("--weights", type=Path, metavar="FILE",
                   help='JSON object mapping predicate names to ["w", "wbar"] rationals')
    p.add_argument("--essential", metavar="R", help="require R to be an essential DAG")
    p.add_argument("--max-indegree", type=int, metavar="D", help="indegree bound for --essential")
    p.add_argument("--cc", action="append", default=[], metavar="Q<=K",
                   help="cardinality constraint on a predicate (repeatable)")
    p.add_argument("-n", type=int, required=True, help="domain size")
    p.add_argument("--json", action="store_true", help="print a JSON record")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="essdag", description="Exact weighted model counting for C2 "
                                     "with an optional essential-DAG constraint.")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_problem_args(sub.add_parser("count", help="count models with the lifted engine"))
    _add_problem_args(sub.add_parser("oracle", help="count models by enumerating interpretations"))

    t = sub.add_parser("table", help="essential DAG counts with bounded indegree")
    t.add_argument("--n-max", type=int, default=12)
    t.add_argument("--d-max", type=int, default=5)
    t.add_argument("--n-min", type=int, default=3)
    t.add_argument("--d-min", type=int, default=2)
    t.add_argument("--json", action="store_true")

    c = sub.add_parser("census", help="essential DAG counts by indegree profile")
    c.add_argument("-n", type=int, required=True)
    c.add_argument("--max-indegree", "-d", type=int, dest="max_indegree")
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--by-indegree", action="store_true", help="list every indegree vector")
    mode.add_argument("--sources", type=int, metavar="S", help="only DAGs with exactly S sources")
    mode.add_argument("--edges", type=int, metavar="E", help="only DAGs with exactly E edges")
    c.add_argument("--json", action="store_true")
    return parser


def _load_problem(args):
    preds = []
    for item in args.pred:
        preds.extend(Vocabulary.parse(item.replace(",", " ")).predicates)
    vocab = Vocabulary(tuple(preds))
    text = args.formula if args.formula is not None else args.formula_file.read_text(encoding="utf-8")
    vocab, sentence = parse_problem(text, vocab)
    weights = {}
    if args.weights:
        try:
            raw = json.loads(args.weights.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read weights: {exc}") from exc
        if not isinstance(raw, dict):
            raise UsageError("weights file must hold a JSON object")
        for name, pair in raw.items():
            if not (isinstance(pair, list) and len(pair) == 2):
                raise UsageError(f"weight for {name} must be a two-element list")
            weights[name] = tuple(str(v) for v in pair)
    axiom = None
    if args.essential is not None:
        if args.max_indegree is None:
            raise UsageError("--essential needs --max-indegree")
        axiom = EssentialDagSpec(args.essential, args.max_indegree)
    elif args.max_indegree is not None:
        raise UsageError("--max-indegree needs --essential")
    ccs = [CardinalityConstraint.parse(c) for c in args.cc]
    if args.n < 0:
        raise UsageError("-n must be non-negative")
    return vocab, sentence, weights, axiom, ccs, text.strip()


def _emit(args, query: str, n, result, started: float) -> None:
    if args.json:
        record = {"query": query, "n": n, "result": result,
                  "elapsed_ms": round((time.perf_counter() - started) * 1000, 3)}
        print(json.dumps(record, sort_keys=True))
    elif isinstance(result, str):
        print(result)


def _cmd_count(args, engine: bool) -> None:
    from .pipeline import count

    started = time.perf_counter()
    vocab, sentence, weights, axiom, ccs, text = _load_problem(args)
    if engine:
        value = count(sentence, vocab, args.n, weights, axiom, ccs)
    else:
        if ccs:
            raise UsageError("the oracle does not take --cc; state the count in the formula")
        from .cells import SymmetricWeights

        sw = SymmetricWeights(weights).total_over(vocab)
        value = brute_wfomc(sentence, vocab, sw, args.n, axiom)
    _emit(args, text, args.n, format_number(value), started)


def _cmd_table(args) -> None:
    started = time.perf_counter()
    if args.n_max < args.n_min or args.d_max < args.d_min or args.d_min < 0 or args.n_min < 1:
        raise UsageError("empty or invalid table range")
    rows = table(args.n_max, args.d_max, args.d_min, args.n_min)
    if args.json:
        result = {str(n): {str(d): str(v) for d, v in r.items()} for n, r in rows.items()}
        _emit(args, f"table n<={args.n_max} d<={args.d_max}", args.n_max, result, started)
        return
    ds = list(range(args.d_min, args.d_max + 1))
    cells = {(n, d): str(v) for n, r in rows.items() for d, v in r.items()}
    width = max([len(s) for s in cells.values()] + [3])
    print("n\\d".rjust(4) + "".join(str(d).rjust(width + 2) for d in ds))
    for n in rows:
        print(str(n).rjust(4) + "".join(cells.get((n, d), "").rjust(width + 2) for d in ds))


def _cmd_census(args) -> None:
    started = time.perf_counter()
    n = args.n
    d = args.max_indegree if args.max_indegree is not None else max(n - 1, 0)
    if n < 0 or d < 0:
        raise UsageError("-n and --max-indegree must be non-negative")
    if args.by_indegree:
        rows = {",".join(map(str, k)): essential_by_indegree(k) for k in indegree_vectors(n, d)}
        if args.json:
            _emit(args, f"census n={n} d={d} by indegree", n, {k: str(v) for k, v in rows.items()}, started)
        else:
            for k, v in rows.items():
                if v:
                    print(f"({k})\t{v}")
        return
    if args.sources is not None:
        value, query = essential_filtered(n, d, sources_filter(args.sources)), f"sources={args.sources}"
    elif args.edges is not None:
        value, query = essential_filtered(n, d, edges_filter(args.edges)), f"edges={args.edges}"
    else:
        value, query = essential_bounded(n, d), "all"
    _emit(args, f"census n={n} d={d} {query}", n, str(value), started)


def run(argv: list[str] | None = None) -> int:
    from .essential import CountingInvariantError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USER
    try:
        if args.command == "count":
            _cmd_count(args, engine=True)
        elif args.command == "oracle":
            _cmd_count(args, engine=False)
        elif args.command == "table":
            _cmd_table(args)
        else:
            _cmd_census(args)
    except CountingInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UsageError, LogicError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
