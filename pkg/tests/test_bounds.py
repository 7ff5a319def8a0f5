from __future__ import annotations

import random

import numpy as np
import pytest

from jacobsthal.bounds import (
    CriterionContext,
    PsiMinTable,
    bound_profile,
    compute_psi_min,
    criterion_discard,
    default_table,
    dumps_table,
    loads_table,
    nu_max_bound,
    pending_bound,
    r_multiples,
)
from jacobsthal.primes import primes_up_to_index
from oracles import naive_psi_min


@pytest.fixture(scope="module")
def small():
    return compute_psi_min(60, 5)


def test_matches_naive_sweep(small):
    for k in range(1, 6):
        for m in (1, 2, 3, 7, 15, 29, 60):
            assert small(m, k) == naive_psi_min(m, k), (m, k)


def test_frozen_values(small):
    # values derived from the naive sweep above
    assert [small(m, 3) for m in range(1, 16)] == [0, 0, 1, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 7]
    assert small(30, 4) == 15
    assert small(60, 5) == 33


def test_packaged_table_agrees_with_fresh_computation(small):
    pkg = default_table()
    assert pkg.max_m >= 200 and pkg.max_k >= 7
    assert np.array_equal(pkg.values[:61, :6], small.values)


def test_monotone_and_k2_closed_form():
    t = default_table()
    v = t.values[1:, 1:]
    assert (np.diff(v, axis=0) >= 0).all()
    assert (np.diff(v, axis=1) >= 0).all()
    assert all(t(m, 2) == m // 3 for m in range(1, t.max_m + 1))


def test_clamping():
    t = compute_psi_min(20, 3)
    assert t(0, 3) == 0 and t(5, 1) == 0
    assert t(25, 3) == t(20, 3)
    assert t(10, 9) == t(10, 3)


def test_roundtrip(tmp_path, small):
    again = loads_table(dumps_table(small))
    assert np.array_equal(again.values, small.values)
    assert again.digest() == small.digest()
    path = tmp_path / "psi.txt"
    small.save(path)
    assert PsiMinTable.load(path).digest() == small.digest()
    with pytest.raises(ValueError):
        loads_table("garbage\n")
    with pytest.raises(ValueError):
        loads_table(dumps_table(small).rsplit("\n", 2)[0])


def test_env_override(tmp_path, monkeypatch):
    path = tmp_path / "alt.txt"
    compute_psi_min(30, 4).save(path)
    monkeypatch.setenv("JACOBSTHAL_PSIMIN_PATH", str(path))
    assert default_table().max_m == 30


def test_size_guard():
    with pytest.raises(ValueError, match="allow_large"):
        compute_psi_min(10, 9)
    with pytest.raises(ValueError):
        compute_psi_min(0, 3)


def test_r_multiples():
    # 1 + floor((m - 1)/p) is attained at a = 0
    for m in range(1, 40):
        for p in (3, 5, 7):
            assert r_multiples(m, p) == max(
                sum(1 for x in range(a + 1, a + m + 1) if x % p == 0) for a in range(p)
            )
    with pytest.raises(ValueError):
        r_multiples(0, 3)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_nu_bound_holds_on_random_assignments(n):
    primes = primes_up_to_index(n)
    odd = primes.odd
    table = default_table()
    rng = random.Random(n)
    for _ in range(300):
        m = rng.randint(1, 60)
        rem = [rng.randint(1, p - 1) for p in odd]
        covered = set()
        for k, (a, p) in enumerate(zip(rem, odd), start=2):
            cls = {q for q in range(1, m + 1) if q % p == a}
            nu = len(cls - covered)
            covered |= cls
            if k >= 3:
                assert nu <= nu_max_bound(m, k, table, primes)


def test_nu_bound_requires_odd_prime():
    with pytest.raises(ValueError):
        nu_max_bound(10, 1, default_table())


def test_criterion_discard():
    t = default_table()
    # nothing left to cover
    assert not criterion_discard(CriterionContext(3, 10, 10, [7]), t)
    # one prime cannot close 10 gaps in a window of 10
    assert criterion_discard(CriterionContext(3, 10, 0, [7]), t)
    assert pending_bound(10, [7], 3, t) == 2 - t(2, 3)
    prof = bound_profile(7, 3, t, 20)
    assert prof[0] == 0
    assert all(prof[w] == pending_bound(w, [7], 3, t) for w in range(1, 21))
