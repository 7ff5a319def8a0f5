"""Command line interface: ``jacobsthal <command> ...``.

Exit codes: 0 success, 1 verification mismatch, 2 usage or guard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from . import bounds, enumeration, ilp, parallel
from .literature import TABLE1, known_n_seq, known_omega
from .primes import h_from_omega, h_one, primes_up_to_index
from .search_basic import GuardError, SearchOutcome, bpa, bsa, rpa
from .search_discarding import DsaConfig, crpdsa, dsa
from .search_greedy import gpa

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
BENCH_HEADER = ["n", "algo", "seconds", "log1p_seconds", "visited"]
REPORT_FIELDS = ["n", "algo", "omega", "h", "n_seq", "visited", "wall_time"]


@dataclass
class RunReport:
    n: int
    algo: str
    omega: Optional[int]
    h: int
    n_seq: Optional[int]
    visited: int
    wall_time: float


class UsageError(Exception):
    pass


def _config(args) -> DsaConfig:
    return DsaConfig(
        k_star=getattr(args, "prune_kstar", None),
        t=getattr(args, "t", None),
        m0=getattr(args, "m0", None),
        criterion=not getattr(args, "no_criterion", False),
    )


def run_algorithm(
    n: int, algo: str, cfg: Optional[DsaConfig] = None, *, guard: bool = True, backend: str = "python"
) -> SearchOutcome:
    primes = primes_up_to_index(n)
    cfg = cfg or DsaConfig()
    if algo == "bsa":
        return bsa(primes, guard=guard)
    if algo == "bpa":
        return bpa(primes, guard=guard)
    if algo == "rpa":
        return rpa(primes, guard=guard)
    if algo == "dsa":
        return dsa(primes, cfg, backend=backend)
    if algo == "crpdsa":
        return crpdsa(primes, cfg)
    if algo == "gpa":
        return gpa(primes, cfg, backend=backend)
    raise UsageError(f"unknown algorithm {algo!r}")


def _report(n: int, algo: str, out: SearchOutcome, seconds: float) -> RunReport:
    return RunReport(n, algo, out.omega, h_from_omega(out.omega, n).h, out.n_seq, out.visited, round(seconds, 6))


def _emit(reports: Sequence[RunReport], fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt == "csv":
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for r in reports:
            w.writerow(["" if v is None else v for v in asdict(r).values()])
    elif fmt == "jsonl":
        for r in reports:
            stream.write(json.dumps({k: v for k, v in asdict(r).items() if v is not None}) + "\n")
    else:
        for r in reports:
            omega = "absent" if r.omega is None else r.omega
            n_seq = "-" if r.n_seq is None else r.n_seq
            stream.write(
                f"n={r.n} algo={r.algo} omega={omega} h={r.h} n_seq={n_seq} "
                f"visited={r.visited} time={r.wall_time:.3f}s\n"
            )


def _search(args, n: int) -> SearchOutcome:
    cfg = _config(args)
    workers = getattr(args, "workers", 1) or 1
    if workers > 1 or getattr(args, "split_kstar", None):
        primes = primes_up_to_index(n)
        split = args.split_kstar or parallel.default_split(primes, args.algo, cfg, workers)
        return parallel.run_parallel(primes, args.algo, split, workers, cfg, guard=not args.no_guard)
    return run_algorithm(n, args.algo, cfg, guard=not args.no_guard, backend=args.backend)


def cmd_compute(args) -> int:
    if args.n == 1:
        _emit([RunReport(1, args.algo, None, h_one().h, None, 0, 0.0)], args.format)
        return EXIT_OK
    t0 = time.perf_counter()
    out = _search(args, args.n)
    _emit([_report(args.n, args.algo, out, time.perf_counter() - t0)], args.format)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    t0 = time.perf_counter()
    out = _search(args, args.n)
    paths = enumeration.export_all(out, args.out_dir)
    _emit([_report(args.n, args.algo, out, time.perf_counter() - t0)], args.format, sys.stderr)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return EXIT_OK


def cmd_psimin(args) -> int:
    table = bounds.compute_psi_min(args.max_m, args.max_k, allow_large=args.allow_large)
    table.save(args.out)
    print(f"wrote psi_min table m<={args.max_m} k<={args.max_k} to {args.out}")
    return EXIT_OK


def cmd_export_ilp(args) -> int:
    model = ilp.build_model(args.n, args.m1, args.m2)
    text = ilp.write_lp(model)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"wrote {len(model.x_vars)} x and {len(model.y_vars)} y variables to {args.out}")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = ilp.read_lp_header(Path(args.model).read_text())
    values = ilp.parse_solution(Path(args.solution).read_text())
    print(ilp.classify_solution(model, values))
    return EXIT_OK


def cmd_split(args) -> int:
    primes = primes_up_to_index(args.n)
    plan = parallel.generate_units(primes, args.algo, args.kstar, _config(args), guard=not args.no_guard)
    parallel.save_plan(plan, args.out)
    print(f"wrote {len(plan.units)} units to {args.out}")
    return EXIT_OK


def cmd_run_units(args) -> int:
    plan = parallel.load_plan(args.file)
    t0 = time.perf_counter()
    out = parallel.run_units(plan, args.workers, share_best=args.share_best)
    if args.out_dir:
        enumeration.export_all(out, args.out_dir)
    _emit([_report(plan.n, plan.algo, out, time.perf_counter() - t0)], args.format)
    return EXIT_OK


def bench_rows(
    n_values: Sequence[int], algos: Sequence[str], budget: Optional[float] = None, runner: Callable = run_algorithm
) -> List[Dict[str, object]]:
    """One row per (n, algo). Refused or skipped runs get empty timing fields.

    ``log1p_seconds`` is log(1 + t) with t rounded to whole seconds, the
    usual quasi-logarithmic scale for comparing run times; ``seconds`` keeps
    the exact value.
    """
    rows = []
    stopped = set()
    for n in n_values:
        for algo in algos:
            row: Dict[str, object] = {"n": n, "algo": algo, "seconds": "", "log1p_seconds": "", "visited": ""}
            if algo in stopped:
                logging.getLogger(__name__).info("bench: %s skipped at n=%d (budget)", algo, n)
                rows.append(row)
                continue
            t0 = time.perf_counter()
            try:
                out = runner(n, algo)
            except GuardError as exc:
                logging.getLogger(__name__).info("bench: %s refused at n=%d: %s", algo, n, exc)
                rows.append(row)
                continue
            dt = time.perf_counter() - t0
            row.update(seconds=f"{dt:.6f}", log1p_seconds=f"{math.log1p(round(dt)):.6f}", visited=out.visited)
            rows.append(row)
            if budget is not None and dt > budget:
                stopped.add(algo)
    return rows


def _parse_range(spec: str) -> List[int]:
    if "-" in spec:
        lo, hi = spec.split("-")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


def cmd_bench(args) -> int:
    rows = bench_rows(_parse_range(args.n), args.algos.split(","), args.budget)
    stream = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(stream, fieldnames=BENCH_HEADER, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.out:
            stream.close()
    return EXIT_OK


def verify(n_max: int, algos: Sequence[str], budget: Optional[float] = None, stream=None):
    """Cross-check algorithms per n and against the literature table.

    Returns (ok, first_failure) where first_failure names n and the pair.
    """
    stream = stream or sys.stdout
    stream.write("n   " + " ".join(f"{a:>7}" for a in algos) + "  table\n")
    stopped = set()
    for n in range(2, n_max + 1):
        ref: Optional[SearchOutcome] = None
        ref_algo = None
        cells = []
        for algo in algos:
            if algo in stopped:
                cells.append("skip")
                continue
            t0 = time.perf_counter()
            try:
                out = run_algorithm(n, algo)
            except GuardError:
                cells.append("guard")
                continue
            if budget is not None and time.perf_counter() - t0 > budget:
                stopped.add(algo)
            if ref is None:
                ref, ref_algo = out, algo
            elif not out.same_result(ref):
                cells.append("DIFF")
                stream.write(f"{n:<3} " + " ".join(f"{c:>7}" for c in cells) + "\n")
                return False, f"n={n}: {ref_algo} vs {algo}"
            cells.append(str(out.omega))
        table = "-"
        if ref is not None and known_omega(n) is not None:
            good = ref.omega == known_omega(n) and ref.n_seq == known_n_seq(n)
            table = "ok" if good else "MISMATCH"
            if not good:
                stream.write(f"{n:<3} " + " ".join(f"{c:>7}" for c in cells) + f"  {table}\n")
                return False, f"n={n}: {ref_algo} vs literature table"
        stream.write(f"{n:<3} " + " ".join(f"{c:>7}" for c in cells) + f"  {table}\n")
    for row in TABLE1.values():
        if row.omega is not None and row.h != 2 * row.omega + 2:
            return False, f"n={row.n}: literature h != 2 omega + 2"
    return True, None


def cmd_verify(args) -> int:
    ok, failure = verify(args.n_max, args.algos.split(","), args.budget)
    if not ok:
        print(f"verification failed: {failure}", file=sys.stderr)
        return EXIT_MISMATCH
    print("all checks passed")
    return EXIT_OK


def _add_search_flags(p: argparse.ArgumentParser, kstar_flag: str = "--kstar") -> None:
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--algo", choices=parallel.ALGORITHMS, default="gpa")
    p.add_argument(kstar_flag, dest="prune_kstar", type=int, default=None, help="level from which pruning applies")
    p.add_argument("--t", type=int, default=None, help="psi_min table depth to use")
    p.add_argument("--m0", type=int, default=None, help="starting tentative length")
    p.add_argument("--no-criterion", action="store_true", help="disable pruning")
    p.add_argument("--no-guard", action="store_true", help="lift the size guards of bsa/bpa/rpa")
    p.add_argument(
        "--backend", choices=["python", "compiled"], default="python",
        help="compiled runs dsa/gpa as numba kernels (n <= 16)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jacobsthal", description="Compute omega(n) and h(n) by exhaustive search.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="omega(n), h(n) and the number of maximal sequences")
    _add_search_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--split-kstar", type=int, default=None)
    p.add_argument("--format", choices=["human", "csv", "jsonl"], default="human")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("enumerate", help="write remainders, moduli and permutations files")
    _add_search_flags(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--split-kstar", type=int, default=None)
    p.add_argument("--format", choices=["human", "csv", "jsonl"], default="human")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("psimin", help="compute a psi_min table")
    p.add_argument("--max-m", type=int, required=True)
    p.add_argument("--max-k", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_psimin)

    p = sub.add_parser("export-ilp", help="write the integer program in LP format")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_export_ilp)

    p = sub.add_parser("classify-solution", help="interpret a solver's 'name value' output")
    p.add_argument("--model", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("split", help="write the work units of a split search")
    _add_search_flags(p, kstar_flag="--prune-kstar")
    p.add_argument("--kstar", type=int, required=True, help="split after p_kstar is placed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("run-units", help="run a unit file and merge the results")
    p.add_argument("--file", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--share-best", action="store_true")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--format", choices=["human", "csv", "jsonl"], default="human")
    p.set_defaults(func=cmd_run_units)

    p = sub.add_parser("bench", help="CSV of run times per n and algorithm")
    p.add_argument("--n", default="2-12", help="range lo-hi or comma list")
    p.add_argument("--algos", default=",".join(parallel.ALGORITHMS))
    p.add_argument("--budget", type=float, default=None, help="stop an algorithm after a run slower than this")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="cross-check all algorithms and the literature table")
    p.add_argument("--n-max", type=int, default=9)
    p.add_argument("--algos", default=",".join(parallel.ALGORITHMS))
    p.add_argument("--budget", type=float, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"error: {exc}; gpa or crpdsa handle this size", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
