from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from msh.subsets import (
    BasisMap,
    Subset,
    binomial,
    carry_free,
    fibonacci,
    is_two_power,
    least_two_power,
    permutation_indices,
    rank_subset,
    subset_masks,
    unrank_subset,
    verify_identity,
)


def pascal(n_max):
    rows = [[1]]
    for n in range(1, n_max + 1):
        prev = rows[-1]
        rows.append([1] + [prev[i - 1] + prev[i] for i in range(1, n)] + [1])
    return rows


def test_binomial_examples():
    assert binomial(6, 3) == 20
    assert binomial(13, 4) == pascal(13)[13][4] == 715
    assert binomial(5, -1) == 0
    assert binomial(5, 6) == 0


def test_binomial_pascal_rule():
    for n in range(1, 21):
        for k in range(0, n + 1):
            assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_carry_free_matches_binomial(p):
    for s in range(40):
        for t in range(40):
            assert carry_free(s, t, p) == (binomial(s + t, s) % p != 0)


def test_carry_free_binary_is_disjoint_bits():
    for s in range(257):
        for t in range(257):
            assert carry_free(s, t, 2) == (s & t == 0)


def test_carry_free_examples_and_errors():
    assert not carry_free(2, 2, 2)
    assert carry_free(1, 2, 2)
    assert not carry_free(2, 1, 3)
    with pytest.raises(ValueError):
        carry_free(1, 1, 4)


def test_least_two_power():
    assert least_two_power(4) == 4
    assert least_two_power(6) == 2
    assert least_two_power(13) == 1
    for t in range(1, 1 << 16, 37):
        lp = least_two_power(t)
        assert t % lp == 0 and (t // lp) % 2 == 1 and is_two_power(lp)
    with pytest.raises(ValueError):
        least_two_power(0)


def test_subset_rejects_out_of_range():
    with pytest.raises(ValueError):
        Subset.of([0, 1], 3)
    with pytest.raises(ValueError):
        Subset(1 << 5, 4)


def test_colex_order_small():
    basis = BasisMap(4, 2)
    listed = [unrank_subset(i, basis).elements() for i in range(basis.size)]
    assert listed == [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]
    assert rank_subset([3, 4], basis) == 5
    assert rank_subset(Subset.of([1, 2], 4), basis) == 0


def test_rank_unrank_round_trip():
    for n in range(0, 17):
        for k in range(0, n + 1):
            basis = BasisMap(n, k)
            masks = subset_masks(n, k)
            assert len(masks) == binomial(n, k)
            if n <= 10 or k in (0, 1, n // 2):
                for i in range(basis.size):
                    s = unrank_subset(i, basis)
                    assert s.mask == masks[i]
                    assert rank_subset(s, basis) == i


def test_colex_is_increasing():
    for n in range(1, 9):
        for k in range(1, n + 1):
            keys = [tuple(sorted(c, reverse=True)) for c in combinations(range(1, n + 1), k)]
            keys.sort()
            basis = BasisMap(n, k)
            assert [tuple(sorted(unrank_subset(i, basis).elements(), reverse=True)) for i in range(basis.size)] == keys


def test_rank_errors():
    with pytest.raises(ValueError):
        rank_subset([1, 2, 3], BasisMap(4, 2))
    with pytest.raises(IndexError):
        unrank_subset(6, BasisMap(4, 2))
    with pytest.raises(ValueError):
        rank_subset(Subset.of([1, 2], 5), BasisMap(4, 2))


@given(st.integers(1, 30).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(1, n)))))
def test_rank_round_trip_random(case):
    n, elems = case
    basis = BasisMap(n, len(elems))
    s = Subset.of(elems, n)
    assert unrank_subset(rank_subset(s, basis), basis) == s


def test_permutation_indices_is_a_permutation():
    sigma = (3, 1, 2, 5, 4, 6)
    for k in range(7):
        idx = permutation_indices(sigma, 6, k)
        assert sorted(idx.tolist()) == list(range(binomial(6, k)))


def test_fibonacci():
    assert fibonacci(0) == 0 and fibonacci(1) == 1 and fibonacci(10) == 55
    for n in range(1, 31):
        assert fibonacci(n + 1) * fibonacci(n - 1) - fibonacci(n) ** 2 == (-1) ** n


def test_identity_examples():
    (r,) = verify_identity("even_2m", [2])
    assert (r.lhs, r.rhs, r.holds) == (-4, -4, True)
    (r,) = verify_identity("odd_2m1", [1])
    assert (r.lhs, r.rhs) == (-2, -2)
    (r,) = verify_identity("fib_5m", [1])
    assert (r.lhs, r.rhs) == (-3, -3)


@pytest.mark.parametrize(
    "name,rng",
    [
        ("even_2m", range(0, 33)),
        ("odd_2m1", range(0, 33)),
        ("mod3", range(0, 65)),
        ("fib_5m", range(1, 13)),
        ("fib_5m2", range(0, 13)),
        ("andrews", range(0, 65)),
    ],
)
def test_identities_hold_exactly(name, rng):
    reports = verify_identity(name, rng)
    assert len(reports) == len(rng)
    for r in reports:
        assert type(r.lhs) is int and type(r.rhs) is int
        assert r.holds, r


def test_unknown_identity():
    with pytest.raises(ValueError):
        verify_identity("nope", [1])
