"""Ground-set combinatorics for the subset modules.

Subsets of {1, ..., n} are bitmasks in which bit ``i`` stands for element
``i`` (bit 0 is never used).  Ordering numeric masks of a fixed popcount
gives colexicographic order, which is the basis order used everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Subset",
    "BasisMap",
    "IdentityReport",
    "IDENTITIES",
    "binomial",
    "carry_free",
    "is_prime",
    "least_two_power",
    "is_two_power",
    "fibonacci",
    "rank_subset",
    "unrank_subset",
    "verify_identity",
]


def binomial(n: int, k: int) -> int:
    """C(n, k), or 0 when ``k`` lies outside ``[0, n]``."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")


def carry_free(s: int, t: int, p: int = 2) -> bool:
    """True iff C(s+t, s) is nonzero mod ``p``.

    By Lucas' theorem this holds exactly when adding ``s`` and ``t`` in base
    ``p`` produces no carry, so no big binomial is ever formed.
    """
    _require_prime(p)
    if s < 0 or t < 0:
        raise ValueError("carry_free needs nonnegative arguments")
    if p == 2:
        return s & t == 0
    while s or t:
        if s % p + t % p >= p:
            return False
        s //= p
        t //= p
    return True


def least_two_power(t: int) -> int:
    """The lowest power of two in the binary expansion of ``t``."""
    if t < 1:
        raise ValueError("least_two_power needs t >= 1")
    return t & -t


def is_two_power(t: int) -> bool:
    return t >= 1 and t & (t - 1) == 0


def fibonacci(n: int) -> int:
    """F_n with F_0 = 0, F_1 = 1."""
    if n < 0:
        raise ValueError("fibonacci needs n >= 0")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


# ---------------------------------------------------------------------------
# Subsets and the colex basis


@dataclass(frozen=True)
class Subset:
    """A subset of {1, ..., n} stored as a bitmask (bit i <-> element i)."""

    mask: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("ground set size must be nonnegative")
        if self.mask < 0 or self.mask & ~_full_mask(self.n):
            raise ValueError(f"mask {self.mask:#b} has bits outside 1..{self.n}")

    @classmethod
    def of(cls, elements: Iterable[int], n: int) -> "Subset":
        mask = 0
        for e in elements:
            if not 1 <= e <= n:
                raise ValueError(f"element {e} outside 1..{n}")
            mask |= 1 << e
        return cls(mask, n)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def elements(self) -> tuple[int, ...]:
        return mask_elements(self.mask)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements())

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.elements())) + "}"


def _full_mask(n: int) -> int:
    return ((1 << n) - 1) << 1


def mask_elements(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << e
    return mask


@dataclass(frozen=True)
class BasisMap:
    """Colexicographic indexing of the k-subsets of {1, ..., n}."""

    n: int
    k: int

    @property
    def size(self) -> int:
        return binomial(self.n, self.k)

    def rank(self, s: Subset | Iterable[int]) -> int:
        return rank_subset(s, self)

    def unrank(self, i: int) -> Subset:
        return unrank_subset(i, self)

    def masks(self) -> np.ndarray:
        return subset_masks(self.n, self.k)

    def elements(self) -> np.ndarray:
        return subset_elements(self.n, self.k)


def rank_subset(s: Subset | Iterable[int], basis: BasisMap) -> int:
    """Colex rank: sum of C(a_i - 1, i) over the sorted elements a_1 < ... < a_k."""
    if isinstance(s, Subset):
        if s.n != basis.n:
            raise ValueError(f"subset lives in n={s.n}, basis has n={basis.n}")
        elems = s.elements()
    else:
        elems = tuple(sorted(s))
        if len(set(elems)) != len(elems) or any(not 1 <= e <= basis.n for e in elems):
            raise ValueError(f"{elems} is not a subset of 1..{basis.n}")
    if len(elems) != basis.k:
        raise ValueError(f"subset has size {len(elems)}, basis expects {basis.k}")
    return sum(binomial(a - 1, i) for i, a in enumerate(elems, start=1))


def unrank_subset(i: int, basis: BasisMap) -> Subset:
    n, k = basis.n, basis.k
    if not 0 <= i < binomial(n, k):
        raise IndexError(f"index {i} out of range for C({n},{k})")
    elems = []
    top = n
    for j in range(k, 0, -1):
        # largest a with C(a-1, j) <= i
        a = top
        while binomial(a - 1, j) > i:
            a -= 1
        elems.append(a)
        i -= binomial(a - 1, j)
        top = a - 1
    return Subset(mask_of(elems), n)


@lru_cache(maxsize=None)
def subset_masks(n: int, k: int) -> np.ndarray:
    """All k-subset masks of {1..n} in colex order (Gosper's hack)."""
    if k < 0 or k > n:
        out = np.zeros(0, dtype=np.int64)
    elif k == 0:
        out = np.zeros(1, dtype=np.int64)
    else:
        masks = []
        x = (1 << k) - 1
        limit = 1 << n
        while x < limit:
            masks.append(x << 1)
            low = x & -x
            r = x + low
            x = (((r ^ x) >> 2) // low) | r
        out = np.array(masks, dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def subset_elements(n: int, k: int) -> np.ndarray:
    """Sorted elements of every k-subset, shape (C(n,k), k), colex row order."""
    masks = subset_masks(n, k)
    if k <= 0 or masks.size == 0:
        out = np.zeros((masks.size, max(k, 0)), dtype=np.int64)
    else:
        bits = (masks[:, None] >> np.arange(1, n + 1)) & 1
        out = np.nonzero(bits)[1].reshape(masks.size, k) + 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _binomial_table(n: int) -> np.ndarray:
    tab = np.zeros((n + 1, n + 2), dtype=np.int64)
    for a in range(n + 1):
        for b in range(n + 2):
            tab[a, b] = binomial(a, b)
    tab.setflags(write=False)
    return tab


def rank_rows(elems: np.ndarray, n: int) -> np.ndarray:
    """Vectorised colex rank of each row of sorted elements."""
    if elems.shape[1] == 0:
        return np.zeros(elems.shape[0], dtype=np.int64)
    tab = _binomial_table(n)
    pos = np.arange(1, elems.shape[1] + 1)
    return tab[elems - 1, pos].sum(axis=1)


def permutation_indices(sigma: Sequence[int], n: int, k: int) -> np.ndarray:
    """Index map of ``sigma`` on the colex basis of k-subsets.

    ``sigma[i - 1]`` is the image of element ``i``; entry ``j`` of the result is
    the colex index of (subset j) sigma.
    """
    elems = subset_elements(n, k)
    if elems.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    table = np.concatenate(([0], np.asarray(sigma, dtype=np.int64)))
    moved = np.sort(table[elems], axis=1)
    return rank_rows(moved, n)


# ---------------------------------------------------------------------------
# Integer identities


@dataclass(frozen=True)
class IdentityReport:
    identity_name: str
    parameter: int
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self) -> dict:
        return {
            "identity": self.identity_name,
            "parameter": self.parameter,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
        }


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def _residue_sum(n: int, modulus: int, residue: int) -> int:
    """Sum of C(n, j) over j = residue mod ``modulus``."""
    return sum(binomial(n, j) for j in range(residue, n + 1, modulus))


def _even_2m(m: int) -> tuple[int, int]:
    lhs = sum(_sign(j) * binomial(2 * m, 2 * j) for j in range(m + 1))
    rhs = _sign(m // 2) * 2**m if m % 2 == 0 else 0
    return lhs, rhs


def _odd_2m1(m: int) -> tuple[int, int]:
    lhs = sum(_sign(j) * binomial(2 * m + 1, 2 * j) for j in range(m + 1))
    sign = _sign(m // 2) if m % 2 == 0 else _sign((m + 1) // 2)
    return lhs, sign * 2**m


def _mod3(n: int) -> tuple[int, int]:
    lhs = _residue_sum(n, 3, 0) - _residue_sum(n, 3, 1)
    rhs = {0: _sign(n), 1: 0, 2: _sign(n - 1)}[n % 3]
    return lhs, rhs


def _fib_5m(m: int) -> tuple[int, int]:
    if m < 1:
        raise ValueError("fib_5m needs m >= 1")
    n = 5 * m
    return _residue_sum(n, 5, 0) - _residue_sum(n, 5, 1), _sign(m) * fibonacci(5 * m - 1)


def _fib_5m2(m: int) -> tuple[int, int]:
    n = 5 * m + 2
    sign = -1 if m % 2 == 0 else 1
    return _residue_sum(n, 5, 0) - _residue_sum(n, 5, 1), sign * fibonacci(5 * m + 1)


def _andrews(n: int) -> tuple[int, int]:
    # summand vanishes unless 0 <= floor((n-1-5k)/2) <= n
    lo, hi = -((n + 2) // 5) - 1, (n - 1) // 5 + 1
    lhs = sum(_sign(k) * binomial(n, (n - 1 - 5 * k) // 2) for k in range(lo, hi + 1))
    return lhs, fibonacci(n)


IDENTITIES = {
    "even_2m": _even_2m,
    "odd_2m1": _odd_2m1,
    "mod3": _mod3,
    "fib_5m": _fib_5m,
    "fib_5m2": _fib_5m2,
    "andrews": _andrews,
}


def verify_identity(name: str, params: Iterable[int]) -> list[IdentityReport]:
    """Evaluate both sides of a named binomial/Fibonacci identity, exactly.

    ``params`` is the finite range of the identity's parameter (``m`` for the
    alternating-sum families, ``n`` for ``mod3`` and ``andrews``).
    """
    try:
        fn = IDENTITIES[name]
    except KeyError:
        raise ValueError(f"unknown identity {name!r}; expected one of {sorted(IDENTITIES)}") from None
    reports = []
    for x in params:
        lhs, rhs = fn(x)
        reports.append(IdentityReport(name, x, lhs, rhs))
    return reports
