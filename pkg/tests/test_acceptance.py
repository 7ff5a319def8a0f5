"""The ten acceptance criteria, each printing one PASS/FAIL line.

Seeds for the tentative length are chained from values computed here
(omega(n-1) + 1), so the reproduction does not lean on the literature table
it is checked against.
"""

from __future__ import annotations

import csv
import functools
import math
import random
import time
from functools import lru_cache

import numpy as np
import pytest

from jacobsthal.bounds import compute_psi_min
from jacobsthal.cli import main, run_algorithm
from jacobsthal.enumeration import export_all, records_from_outcome, reverse_remainders
from jacobsthal.ilp import IlpOutcome, build_model, classify_solution, solve_bruteforce
from jacobsthal.literature import TABLE1
from jacobsthal.parallel import ALGORITHMS, default_split, run_parallel
from jacobsthal.primes import h_from_omega, primes_up_to_index
from jacobsthal.search_basic import rpa
from jacobsthal.search_discarding import DsaConfig, dsa
from jacobsthal.search_greedy import gpa


def criterion(number):
    """Record FAIL for the criterion if the body raises before reporting."""

    def wrap(fn):
        @functools.wraps(fn)
        def inner(acceptance, *args, **kwargs):
            try:
                return fn(acceptance, *args, **kwargs)
            except Exception as exc:
                acceptance(number, False, f"error: {exc!r}")
                raise

        return inner

    return wrap


@lru_cache(maxsize=None)
def solved(n: int):
    """Sequential gpa, seeded with the omega computed for n - 1."""
    seed = 1 if n == 2 else solved(n - 1).omega + 1
    return gpa(primes_up_to_index(n), DsaConfig(m0=seed))


def table_row(n):
    row = TABLE1[n]
    return row.omega, row.h, row.n_seq


@criterion(1)
def test_01_table_small_range(acceptance):
    t0 = time.perf_counter()
    bad = []
    for n in range(2, 15):
        out = solved(n)
        got = (out.omega, h_from_omega(out.omega, n).h, out.n_seq)
        if got != table_row(n):
            bad.append((n, got, table_row(n)))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    acceptance(1, ok, f"n=2..14 gpa omega/h/n_seq exact, {dt:.1f}s (limit 120s) mismatches={bad}")
    assert ok


@criterion(2)
def test_02_table_medium_range_eight_workers(acceptance):
    t0 = time.perf_counter()
    prev = solved(14).omega
    bad, got_all = [], []
    for n in range(15, 21):
        primes = primes_up_to_index(n)
        cfg = DsaConfig(m0=prev + 1)
        split = default_split(primes, "gpa", cfg, workers=8)
        out = run_parallel(primes, "gpa", split, 8, cfg)
        got = (out.omega, h_from_omega(out.omega, n).h, out.n_seq)
        got_all.append(f"{n}:{out.omega}/{out.n_seq}")
        if got != table_row(n):
            bad.append((n, got, table_row(n)))
        prev = out.omega
    dt = time.perf_counter() - t0
    acceptance(2, not bad, f"n=15..20 gpa 8 workers {' '.join(got_all)}, {dt:.1f}s mismatches={bad}")
    assert not bad


@criterion(3)
def test_03_six_algorithms_agree(acceptance):
    bad = []
    for n in range(2, 10):
        outs = {algo: run_algorithm(n, algo) for algo in ALGORITHMS}
        ref = outs["bsa"]
        for algo, out in outs.items():
            if not out.same_result(ref):
                bad.append((n, algo))
    acceptance(3, not bad, f"n=2..9 {','.join(ALGORITHMS)} identical omega and sequence sets; differing={bad}")
    assert not bad


@criterion(4)
def test_04_pruning_soundness(acceptance):
    t0 = time.perf_counter()
    bad, counts = [], []
    for name, search in (("dsa", dsa), ("gpa", gpa)):
        for n in range(2, 13):
            primes = primes_up_to_index(n)
            seed = 1 if n == 2 else solved(n - 1).omega + 1
            on = search(primes, DsaConfig(m0=seed), backend="compiled")
            off = search(primes, DsaConfig(m0=seed, criterion=False), backend="compiled")
            if not on.same_result(off):
                bad.append((name, n, "outcome"))
            if n >= 10:
                counts.append(f"{name}{n}:{on.visited}<{off.visited}")
                if not on.visited < off.visited:
                    bad.append((name, n, "visited"))
    dt = time.perf_counter() - t0
    acceptance(4, not bad, f"n<=12 enabled==disabled, {' '.join(counts)}, {dt:.0f}s failures={bad}")
    assert not bad


@criterion(5)
def test_05_worked_example(acceptance, tmp_path):
    out = solved(6)
    recs = {r.remainders: r for r in records_from_outcome(out)}
    rec = recs.get((1, 3, 2, 5, 6))
    files = export_all(out, tmp_path)
    checks = rec is not None and [
        rec.offset() == 12227,
        rec.line("moduli") == "3 7 5 3 11 13 3 5 7 3",
        rec.pi == (3, 7, 5, 11, 13),
        rec.q == (1, 2, 3, 5, 6),
        "3 7 5 3 11 13 3 5 7 3" in files["moduli"].read_text().splitlines(),
        "3 7 5 11 13" in files["permutations"].read_text().splitlines(),
    ]
    ok = bool(checks) and all(checks)
    acceptance(5, ok, f"n=6 record (1,3,2,5,6): offset 12227, moduli line, pi and q; checks={checks}")
    assert ok


@criterion(6)
def test_06_reversal_closure(acceptance):
    bad = []
    total = 0
    for n in range(2, 15):
        out = solved(n)
        odd = primes_up_to_index(n).odd
        for rem in out.sequences:
            total += 1
            rev = reverse_remainders(rem, out.omega, odd)
            if rev not in out.sequences or reverse_remainders(rev, out.omega, odd) != rem:
                bad.append((n, rem))
    acceptance(6, not bad, f"n=2..14 {total} sequences closed under reversal, involution holds; failures={bad[:3]}")
    assert not bad


@criterion(7)
def test_07_psi_min_properties(acceptance):
    table = compute_psi_min(200, 7)
    v = table.values[1:, 1:]
    mono_m = bool((np.diff(v, axis=0) >= 0).all())
    mono_k = bool((np.diff(v, axis=1) >= 0).all())
    k2 = all(table(m, 2) == m // 3 for m in range(1, 201))

    rng = random.Random(20240607)
    violations = checked = 0
    for _ in range(10_000):
        n = rng.randint(3, 8)
        odd = primes_up_to_index(n).odd
        m = rng.randint(1, 200)
        covered = 0
        for k, p in enumerate(odd, start=2):
            a = rng.randint(1, p - 1)
            cls = sum(1 << (q - 1) for q in range(a, m + 1, p))
            nu = (cls & ~covered).bit_count()
            covered |= cls
            r = 1 + (m - 1) // p
            for t in range(2, k):
                checked += 1
                if nu > r - table(r, t):
                    violations += 1
    ok = mono_m and mono_k and k2 and violations == 0
    acceptance(
        7, ok,
        f"m<=200 k<=7 monotone m={mono_m} k={mono_k}, psi_min(m,2)=m//3 {k2}, "
        f"10000 assignments n<=8 {checked} bound checks, violations={violations}",
    )
    assert ok


@criterion(8)
def test_08_ilp_trichotomy(acceptance):
    bad = []
    windows = 0
    for n in range(2, 6):
        omega = rpa(primes_up_to_index(n)).omega
        for m1 in range(1, omega + 3):
            for m2 in range(m1, omega + 3):
                model = build_model(n, m1, m2)
                got = classify_solution(model, solve_bruteforce(model))
                if omega < m1:
                    want = IlpOutcome("too_large_m1")
                elif omega >= m2:
                    want = IlpOutcome("too_small_m2")
                else:
                    want = IlpOutcome("omega_found", omega)
                windows += 1
                if got != want:
                    bad.append((n, m1, m2, str(got), str(want)))
    n4 = str(classify_solution(build_model(4, 3, 6), solve_bruteforce(build_model(4, 3, 6))))
    ok = not bad and n4 == "omega_found(4)"
    acceptance(8, ok, f"n=2..5 {windows} windows brute-forced, n=4 [3,6] -> {n4}; mismatches={bad}")
    assert ok


@criterion(9)
def test_09_parallel_determinism(acceptance, tmp_path):
    primes = primes_up_to_index(12)
    bad = []
    sizes = {}
    for algo in ("gpa", "dsa"):
        blobs = {}
        for workers in (1, 2, 8):
            split = default_split(primes, algo, workers=workers)
            out = run_parallel(primes, algo, split, workers)
            paths = export_all(out, tmp_path / f"{algo}-{workers}")
            blobs[workers] = {k: p.read_bytes() for k, p in paths.items()}
        sizes[algo] = sum(len(b) for b in blobs[1].values())
        if not blobs[1] == blobs[2] == blobs[8]:
            bad.append(algo)
    acceptance(9, not bad, f"n=12 workers 1/2/8 byte-identical exports (gpa, dsa; bytes {sizes}); differing={bad}")
    assert not bad


@criterion(10)
def test_10_benchmark_csv(acceptance, tmp_path):
    path = tmp_path / "bench.csv"
    code = main(["bench", "--n", "2-14", "--algos", ",".join(ALGORITHMS), "--out", str(path)])
    with path.open() as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        rows = list(reader)
    problems = []
    if code != 0 or "log1p_seconds" not in header:
        problems.append("header or exit code")
    summary = []
    for algo in ALGORITHMS:
        ran = [r for r in rows if r["algo"] == algo and r["seconds"]]
        if len(ran) < 2:
            problems.append(f"{algo}: too few rows")
            continue
        logs = [float(r["log1p_seconds"]) for r in ran]
        if any(abs(x - math.log1p(round(float(r["seconds"])))) > 1e-6 for x, r in zip(logs, ran)):
            problems.append(f"{algo}: log column inconsistent")
        if any(b < a for a, b in zip(logs, logs[1:])):
            problems.append(f"{algo}: cost decreases")
        summary.append(f"{algo} n={ran[0]['n']}..{ran[-1]['n']} log1p {logs[0]:.2f}->{logs[-1]:.2f}")
    ok = not problems
    acceptance(10, ok, f"bench CSV with log1p column; {'; '.join(summary)}; problems={problems}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
