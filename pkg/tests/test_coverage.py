from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobsthal.coverage import (
    CapacityExhausted,
    CoverageArray,
    ResidueAssignment,
    class_mask,
    crt,
    fill_array,
    first_free,
    next_free_position,
    nu_increments,
    psi,
    reconstruct_offset,
    reduced_window,
)
from jacobsthal.primes import primes_up_to_index
from oracles import class_positions

SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23]


def bits_to_set(bits: int) -> set:
    return {i + 1 for i in range(bits.bit_length()) if bits >> i & 1}


@given(st.sampled_from(SMALL_PRIMES), st.integers(0, 40), st.integers(1, 300))
def test_class_mask_matches_naive(p, r, length):
    assert bits_to_set(class_mask(p, r, length)) == class_positions(p, r, length)


@given(st.integers(0, 2**80))
def test_first_free_is_lowest_clear_bit(bits):
    q = 1
    while bits >> (q - 1) & 1:
        q += 1
    assert first_free(bits) == q


def test_fill_and_psi():
    arr = CoverageArray.empty(20)
    arr = fill_array(arr, 1, 3)
    assert arr.covered_positions() == [1, 4, 7, 10, 13, 16, 19]
    assert psi(arr, 10) == 4
    assert next_free_position(arr) == 2
    with pytest.raises(ValueError, match="zero"):
        fill_array(arr, 6, 3)
    with pytest.raises(ValueError):
        psi(arr, 21)


def test_capacity_exhausted():
    arr = CoverageArray.from_positions(3, [1, 2, 3])
    with pytest.raises(CapacityExhausted):
        next_free_position(arr)
    assert arr.grown(5).uncovered_positions() == [4, 5]
    with pytest.raises(ValueError):
        arr.grown(2)
    with pytest.raises(ValueError):
        CoverageArray.from_positions(3, [4])


@given(st.sets(st.integers(1, 60)), st.integers(1, 60))
def test_reduced_window_spans_first_to_last_gap(covered, m):
    arr = CoverageArray.from_positions(60, covered)
    gaps = [q for q in range(1, m + 1) if q not in covered]
    mstar, psistar = reduced_window(arr, m)
    if not gaps:
        assert (mstar, psistar) == (0, 0)
    else:
        span = range(gaps[0], gaps[-1] + 1)
        assert mstar == len(span)
        assert psistar == sum(1 for q in span if q in covered)


def test_nu_increments_sum_to_psi():
    arr = CoverageArray.empty(30)
    fills = [(1, 3), (2, 5), (3, 7)]
    inc = nu_increments(arr, fills, 30)
    final = arr
    for r, p in fills:
        final = fill_array(final, r, p)
    assert sum(inc) == psi(final, 30)
    assert inc[0] == 10


@settings(max_examples=200)
@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=6))
def test_crt_solves_system(values):
    moduli = SMALL_PRIMES[: len(values)]
    x, mod = crt(values, moduli)
    assert 0 <= x < mod
    assert all((x - v) % p == 0 for v, p in zip(values, moduli))


def test_residue_assignment_roundtrip_and_offset():
    primes = primes_up_to_index(6)
    ra = ResidueAssignment.from_tuple((1, 3, 2, 5, 6))
    assert ra.n == 6 and ra.as_tuple() == (1, 3, 2, 5, 6)
    a = reconstruct_offset(ra, primes)
    assert a == 12227
    # a + q is divisible by the prime whose class holds q
    for q, p in zip(range(1, 11), (3, 7, 5, 3, 11, 13, 3, 5, 7, 3)):
        assert (a + q) % p == 0
    cov = ra.coverage(primes, 12)
    assert cov.uncovered_positions()[0] == 11


def test_residue_assignment_validation():
    primes = primes_up_to_index(4)
    with pytest.raises(ValueError):
        ResidueAssignment(4, {5: 1})
    with pytest.raises(ValueError):
        ResidueAssignment(4, {2: 0})
    with pytest.raises(ValueError):
        ResidueAssignment.from_tuple((3, 1, 1)).validate(primes)
    with pytest.raises(ValueError, match="missing"):
        reconstruct_offset(ResidueAssignment(4, {2: 1}), primes)
    with pytest.raises(ValueError, match="inconsistent"):
        ResidueAssignment(4, {2: 1, 3: 1, 4: 1}, offset=0).validate(primes)
