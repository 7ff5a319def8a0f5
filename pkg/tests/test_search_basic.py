from __future__ import annotations

import pytest

from jacobsthal.primes import primes_up_to_index
from jacobsthal.search_basic import (
    GuardError,
    PermutationState,
    SearchOutcome,
    bpa,
    bsa,
    cover_length,
    default_m0,
    merge_outcomes,
    rpa,
)
from oracles import brute_omega, cover_run

ENGINES = {"bsa": bsa, "bpa": bpa, "rpa": rpa}


@pytest.mark.parametrize("algo", sorted(ENGINES))
@pytest.mark.parametrize("n", range(2, 8))
def test_matches_brute_force(algo, n):
    omega, seqs = brute_omega(n)
    out = ENGINES[algo](primes_up_to_index(n))
    assert out.omega == omega
    assert out.sequences == set(seqs)
    assert out.algorithm == algo


def test_n2_single_sequence():
    out = bsa(primes_up_to_index(2))
    assert out.omega == 1 and out.sequences == {(1,)}


def test_guards():
    with pytest.raises(GuardError, match="n <= 9"):
        bsa(primes_up_to_index(10))
    with pytest.raises(GuardError):
        bpa(primes_up_to_index(11))
    with pytest.raises(GuardError):
        rpa(primes_up_to_index(13))
    with pytest.raises(GuardError, match="h\\(1\\) = 2"):
        rpa(primes_up_to_index(1))


def test_guard_can_be_lifted():
    out = bsa(primes_up_to_index(4), guard=False)
    assert out.omega == 4


def test_reduced_visits_fewer_leaves_than_full_permutation():
    primes = primes_up_to_index(7)
    assert rpa(primes).visited < bpa(primes).visited


@pytest.mark.parametrize("n", [3, 5, 7])
def test_cover_length_agrees_with_oracle(n):
    odd = primes_up_to_index(n).odd
    for rem in brute_omega(n)[1]:
        assert cover_length(rem, odd) == cover_run(rem, odd)
    assert cover_length((1,) * len(odd), odd) == cover_run((1,) * len(odd), odd)


def test_default_m0_uses_previous_row():
    assert default_m0(9) == 17
    assert default_m0(2) == 1
    assert default_m0(60) == 1


def test_merge_is_order_independent():
    a = SearchOutcome(5, 6, {(1, 2, 3, 4)}, 10)
    b = SearchOutcome(5, 6, {(2, 3, 4, 5)}, 5)
    c = SearchOutcome(5, 4, {(1, 1, 1, 1)}, 7)
    d = SearchOutcome(5, None, set(), 1)
    m1 = merge_outcomes([a, b, c, d], 5)
    m2 = merge_outcomes([d, c, b, a], 5)
    assert m1.same_result(m2)
    assert m1.omega == 6 and m1.n_seq == 2 and m1.visited == 23
    assert m1.sorted_sequences() == [(1, 2, 3, 4), (2, 3, 4, 5)]


def test_permutation_state_checks():
    odd = (3, 5, 7)
    PermutationState([3, 5], [1, 2], [7]).check(odd)
    with pytest.raises(ValueError, match="increasing"):
        PermutationState([3, 5], [2, 2], [7]).check(odd)
    with pytest.raises(ValueError, match="first anchor"):
        PermutationState([3], [2], [5, 7]).check(odd)
    with pytest.raises(ValueError, match="multiples"):
        PermutationState([3, 5], [1, 5], [7]).check(odd)
    with pytest.raises(ValueError, match="partition"):
        PermutationState([3, 3], [1, 2], [7]).check(odd)
