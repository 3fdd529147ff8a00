"""Command line entry point.

Exit codes: 0 solved/completed, 1 unsatisfiable (solve), 2 timeout (solve),
64 usage error, 65 parse or validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .bench import (
    SWEEP_COLUMNS,
    records_to_csv,
    records_to_jsonl,
    rows_to_csv,
    run_benchmark,
    sweep_gamma,
)
from .csp import StructureError
from .fileformat import ParseError, read_instance, write_instance
from .generators import RBParams, SudokuParams, generate_generalized_sudoku, generate_model_rb
from .metareasoning import DEFAULT_GAMMA
from .search import DEFAULT_TIMEOUT, HEURISTICS, RunConfig, search

EXIT_OK, EXIT_UNSAT, EXIT_TIMEOUT, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 64, 65

log = logging.getLogger("rationalcsp")


class UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise UsageExit(message)


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _heuristics(text: str) -> List[str]:
    names = [x for x in text.split(",") if x]
    bad = [x for x in names if x not in HEURISTICS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown heuristic(s) {bad}; choose from {', '.join(HEURISTICS)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rationalcsp", description="MAC solver with VOI-driven solution-count value ordering")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("file")
    s.add_argument("--heuristic", choices=HEURISTICS, default="vsc")
    s.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    s.add_argument("--json", action="store_true", help="print the stats record as JSON")

    g = sub.add_parser("generate", help="generate a random instance")
    gs = g.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    rb = gs.add_parser("rb", help="Model RB: VARS VALUES CONSTRAINTS NOGOODS")
    rb.add_argument("n_vars", type=int)
    rb.add_argument("domain_size", type=int)
    rb.add_argument("n_constraints", type=int)
    rb.add_argument("n_nogoods", type=int)
    sd = gs.add_parser("sudoku", help="Generalized Sudoku: TILE_ROWS TILE_COLS HOLES")
    sd.add_argument("tile_rows", type=int)
    sd.add_argument("tile_cols", type=int)
    sd.add_argument("holes", type=int)
    for q in (rb, sd):
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("-o", "--output", required=True)

    b = sub.add_parser("bench", help="run heuristics over instance files")
    b.add_argument("files", nargs="+")
    b.add_argument("--heuristics", type=_heuristics, default=["mc", "sc", "vsc"])
    b.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    b.add_argument("--repeat", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--csv", help="write raw records as CSV")
    b.add_argument("--jsonl", help="write raw records as JSON lines")

    w = sub.add_parser("sweep", help="VSC over a range of gamma against exhaustive SC")
    w.add_argument("files", nargs="+")
    w.add_argument("--gammas", type=_floats, default=[0.0] + [10.0 ** k for k in range(-7, 1)])
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--csv", help="write the per-gamma table as CSV")
    w.add_argument("--records", help="write raw records as CSV")
    return p


def _load(files: Sequence[str]):
    return [(Path(f).name, read_instance(f)) for f in files]


def _solve(args) -> int:
    instance = read_instance(args.file)
    config = RunConfig(args.heuristic, gamma=args.gamma, seed=args.seed, timeout=args.timeout)
    solution, stats = search(instance, config, instance_id=Path(args.file).name)
    if args.json:
        print(json.dumps(stats.as_dict()))
    if stats.timed_out:
        print("timeout")
        return EXIT_TIMEOUT
    if solution is None:
        print("unsatisfiable")
        return EXIT_UNSAT
    labels = instance.labelled(solution)
    print("solution " + " ".join(str(labels[v]) for v in range(instance.num_variables)))
    return EXIT_OK


def _generate(args) -> int:
    if args.kind == "rb":
        instance = generate_model_rb(
            RBParams(args.n_vars, args.domain_size, args.n_constraints, args.n_nogoods, args.seed)
        )
    else:
        instance = generate_generalized_sudoku(SudokuParams(args.tile_rows, args.tile_cols, args.holes, args.seed))
    write_instance(instance, args.output)
    return EXIT_OK


def _bench(args) -> int:
    configs = [
        RunConfig(h, gamma=args.gamma, seed=args.seed, timeout=args.timeout, repeat=args.repeat)
        for h in args.heuristics
    ]
    result = run_benchmark(_load(args.files), configs, jobs=args.jobs)
    if args.csv:
        Path(args.csv).write_text(records_to_csv(result.records))
    if args.jsonl:
        Path(args.jsonl).write_text(records_to_jsonl(result.records))
    print(f"{'config':<14}{'runs':>6}{'solved':>8}{'timeouts':>10}{'mean T':>12}{'mean N':>12}{'mean C':>12}")
    for label, s in result.summary.items():
        print(
            f"{label:<14}{s['runs']:>6}{s['solved']:>8}{s['timed_out']:>10}"
            f"{s['search_time']['mean']:>12.4f}{s['backtracks']['mean']:>12.1f}{s['sc_estimations']['mean']:>12.1f}"
        )
    for (a, b), r in result.ratios.items():
        print(f"mean T_{a}/T_{b} = {r['mean_ratio']:.3f}")
    return EXIT_OK


def _sweep(args) -> int:
    base = RunConfig("vsc", seed=args.seed, timeout=args.timeout)
    rows, records = sweep_gamma(_load(args.files), args.gammas, base, jobs=args.jobs)
    text = rows_to_csv(rows, SWEEP_COLUMNS)
    if args.csv:
        Path(args.csv).write_text(text)
    if args.records:
        Path(args.records).write_text(records_to_csv(records))
    sys.stdout.write(text)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageExit:
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    handlers = {"solve": _solve, "generate": _generate, "bench": _bench, "sweep": _sweep}
    try:
        return handlers[args.command](args)
    except (ParseError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
