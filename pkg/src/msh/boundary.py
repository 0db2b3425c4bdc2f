"""Multistep boundary maps on the subset modules and the identities they obey.

``phi(n, t, k)`` sends a k-subset to the sum of its (k-t)-subsets.  Its
matrix has one row per k-subset and one column per (k-t)-subset, both in
colex order, and acts on row vectors from the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from .errors import InapplicableError
from .gfmat import FpMatrix
from .subsets import (
    BasisMap,
    Subset,
    binomial,
    carry_free,
    is_prime,
    mask_elements,
    permutation_indices,
    rank_rows,
    subset_elements,
    subset_masks,
)

__all__ = [
    "BoundaryMapSpec",
    "OmegaVector",
    "VkSpec",
    "build_phi",
    "phi_matrix",
    "permutation_matrix",
    "transposition",
    "apply_perm",
    "apply_phi",
    "disjoint_product",
    "build_v",
    "check_composition",
    "composes_to_zero",
    "check_splitting_rule",
    "splitting_rule_sides",
    "check_suspension",
]


@dataclass(frozen=True)
class BoundaryMapSpec:
    n: int
    k: int
    t: int
    p: int = 2
    dual: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        src, dst = binomial(self.n, self.k), binomial(self.n, self.k - self.t)
        return (dst, src) if self.dual else (src, dst)


@lru_cache(maxsize=None)
def _incidence(n: int, t: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """(row, col) pairs with X subset of Y, Y a k-subset and X a (k-t)-subset."""
    if k < 0 or k > n or k - t < 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    elems = subset_elements(n, k)
    nrows = elems.shape[0]
    rows, cols = [], []
    for keep in combinations(range(k), k - t):
        rows.append(np.arange(nrows))
        cols.append(rank_rows(elems[:, list(keep)], n))
    return np.concatenate(rows), np.concatenate(cols)


def build_phi(spec: BoundaryMapSpec) -> FpMatrix:
    """Matrix of phi_t^k, or of its dual when ``spec.dual`` is set.

    Degrees outside ``[0, n]`` give genuinely empty matrices.
    """
    if spec.t < 1:
        raise ValueError(f"step t must be >= 1, got {spec.t}")
    if not is_prime(spec.p):
        raise ValueError(f"modulus {spec.p} is not prime")
    src, dst = binomial(spec.n, spec.k), binomial(spec.n, spec.k - spec.t)
    r, c = _incidence(spec.n, spec.t, spec.k)
    if spec.dual:
        return FpMatrix.from_entries(dst, src, spec.p, c, r)
    return FpMatrix.from_entries(src, dst, spec.p, r, c)


@lru_cache(maxsize=256)
def phi_matrix(n: int, t: int, k: int, p: int = 2, dual: bool = False) -> FpMatrix:
    """Cached ``build_phi``; the result is immutable."""
    return build_phi(BoundaryMapSpec(n, k, t, p, dual))


def phi_row_sums(n: int, t: int, k: int) -> np.ndarray:
    """Integer row sums of phi_t^k before any reduction mod p."""
    r, _ = _incidence(n, t, k)
    return np.bincount(r, minlength=binomial(n, k))


# ---------------------------------------------------------------------------
# Elements of the subset modules


@dataclass(frozen=True, eq=False)
class OmegaVector:
    """An element of F Omega_k: coefficients on the colex basis of k-subsets."""

    n: int
    k: int
    p: int
    coords: np.ndarray

    def __post_init__(self):
        c = np.mod(np.asarray(self.coords, dtype=np.int64), self.p)
        if c.shape != (binomial(self.n, self.k),):
            raise ValueError(f"expected {binomial(self.n, self.k)} coordinates, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def zero(cls, n: int, k: int, p: int = 2) -> "OmegaVector":
        return cls(n, k, p, np.zeros(binomial(n, k), dtype=np.int64))

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]] | Mapping, p: int = 2, k: int | None = None) -> "OmegaVector":
        """Build from subsets given as element tuples (or a mapping to coefficients)."""
        items = sets.items() if isinstance(sets, Mapping) else ((s, 1) for s in sets)
        terms = [(tuple(sorted(s)), c) for s, c in items]
        if k is None:
            if not terms:
                raise ValueError("cannot infer k from an empty term list")
            k = len(terms[0][0])
        basis = BasisMap(n, k)
        coords = np.zeros(basis.size, dtype=np.int64)
        for elems, c in terms:
            coords[basis.rank(elems)] += c
        return cls(n, k, p, coords)

    @classmethod
    def basis_element(cls, s: Subset, p: int = 2) -> "OmegaVector":
        return cls.from_sets(s.n, [s.elements()], p, k=s.size)

    @property
    def dim(self) -> int:
        return self.coords.size

    def terms(self) -> dict[tuple[int, ...], int]:
        masks = subset_masks(self.n, self.k)
        nz = np.flatnonzero(self.coords)
        return {mask_elements(int(masks[i])): int(self.coords[i]) for i in nz}

    def support(self) -> Subset:
        masks = subset_masks(self.n, self.k)
        nz = np.flatnonzero(self.coords)
        mask = int(np.bitwise_or.reduce(masks[nz])) if nz.size else 0
        return Subset(mask, self.n)

    def is_zero(self) -> bool:
        return not self.coords.any()

    def as_row(self) -> FpMatrix:
        return FpMatrix.from_dense(self.coords.reshape(1, -1), self.p)

    @classmethod
    def from_row(cls, n: int, k: int, row: FpMatrix | np.ndarray, p: int | None = None) -> "OmegaVector":
        if isinstance(row, FpMatrix):
            return cls(n, k, row.p, row.to_dense()[0])
        return cls(n, k, p if p is not None else 2, row)

    def _same_space(self, other: "OmegaVector") -> None:
        if (self.n, self.k, self.p) != (other.n, other.k, other.p):
            raise ValueError(f"vectors live in different spaces: {(self.n, self.k, self.p)} vs {(other.n, other.k, other.p)}")

    def __add__(self, other: "OmegaVector") -> "OmegaVector":
        self._same_space(other)
        return OmegaVector(self.n, self.k, self.p, self.coords + other.coords)

    def __sub__(self, other: "OmegaVector") -> "OmegaVector":
        self._same_space(other)
        return OmegaVector(self.n, self.k, self.p, self.coords - other.coords)

    def __mul__(self, c: int) -> "OmegaVector":
        return OmegaVector(self.n, self.k, self.p, self.coords * int(c))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, OmegaVector):
            return NotImplemented
        return (self.n, self.k, self.p) == (other.n, other.k, other.p) and np.array_equal(self.coords, other.coords)

    def __repr__(self) -> str:
        if self.is_zero():
            return f"0 in FOmega_{self.k}(n={self.n})"
        parts = []
        for s, c in self.terms().items():
            body = "{" + ",".join(map(str, s)) + "}"
            parts.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Symmetric group action


def transposition(n: int, i: int, j: int) -> tuple[int, ...]:
    """The transposition (i j) of {1..n} as an image tuple."""
    img = list(range(1, n + 1))
    img[i - 1], img[j - 1] = j, i
    return tuple(img)


def _check_perm(sigma: Sequence[int], n: int) -> None:
    if len(sigma) != n or sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{tuple(sigma)} is not a permutation of 1..{n}")


def permutation_matrix(sigma: Sequence[int], n: int, k: int, p: int = 2) -> FpMatrix:
    """Matrix of Y -> Y sigma on F Omega_k (row-vector convention)."""
    _check_perm(sigma, n)
    idx = permutation_indices(sigma, n, k)
    size = binomial(n, k)
    return FpMatrix.from_entries(size, size, p, np.arange(size), idx)


def apply_perm(sigma: Sequence[int], v: OmegaVector) -> OmegaVector:
    """Right action of sigma; ``sigma[i-1]`` is the image of ``i``."""
    _check_perm(sigma, v.n)
    idx = permutation_indices(sigma, v.n, v.k)
    out = np.zeros_like(v.coords)
    out[idx] = v.coords
    return OmegaVector(v.n, v.k, v.p, out)


# ---------------------------------------------------------------------------
# Maps applied to vectors, set product


def apply_phi(v: OmegaVector, t: int) -> OmegaVector:
    """v phi_t; phi_0 is the identity."""
    if t < 0:
        raise ValueError("step must be nonnegative")
    if t == 0:
        return v
    if v.k - t < 0 or v.dim == 0:
        return OmegaVector.zero(v.n, v.k - t, v.p)
    img = v.as_row() @ phi_matrix(v.n, t, v.k, v.p)
    return OmegaVector(v.n, v.k - t, v.p, img.to_dense()[0])


def disjoint_product(v: OmegaVector, w: OmegaVector) -> OmegaVector:
    """Bilinear extension of X.Y = X u Y for disjoint X, Y and 0 otherwise."""
    if v.n != w.n or v.p != w.p:
        raise ValueError("product needs the same n and p")
    n, p, k = v.n, v.p, v.k + w.k
    out = OmegaVector.zero(n, k, p)
    iv, iw = np.flatnonzero(v.coords), np.flatnonzero(w.coords)
    if iv.size == 0 or iw.size == 0:
        return out
    mv = subset_masks(n, v.k)[iv]
    mw = subset_masks(n, w.k)[iw]
    disjoint = (mv[:, None] & mw[None, :]) == 0
    a, b = np.nonzero(disjoint)
    if a.size == 0:
        return out
    target = np.searchsorted(subset_masks(n, k), mv[a] | mw[b])
    coeff = v.coords[iv[a]] * w.coords[iw[b]]
    coords = np.zeros(binomial(n, k), dtype=np.int64)
    np.add.at(coords, target, coeff)
    return OmegaVector(n, k, p, coords)


# ---------------------------------------------------------------------------
# Distinguished kernel elements


@dataclass(frozen=True)
class VkSpec:
    """Parameters of {2,4,...,2k} summed over the group G_l, l = k - t + 1.

    When ``t > k`` the group is trivial (l is clamped at 0).
    """

    n: int
    k: int
    t: int

    @property
    def group_rank(self) -> int:
        return max(self.k - self.t + 1, 0)

    @property
    def group_generators(self) -> list[tuple[int, int]]:
        return [(2 * i - 1, 2 * i) for i in range(1, self.group_rank + 1)]


def build_v(spec: VkSpec, p: int = 2) -> OmegaVector:
    """{2,4,...,2k} summed over the 2^l images under G_l, all coefficients 1."""
    n, k, t = spec.n, spec.k, spec.t
    if t < 1:
        raise ValueError("t must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    if 2 * k > n:
        raise ValueError(f"support {{1..{2 * k}}} does not fit in n={n}")
    ell = spec.group_rank
    base = [2 * i for i in range(1, k + 1)]
    sets = []
    for flips in range(1 << ell):
        sets.append(tuple(e - 1 if i < ell and flips >> i & 1 else e for i, e in enumerate(base)))
    return OmegaVector.from_sets(n, sets, p, k=k)


# ---------------------------------------------------------------------------
# Structural identities


def check_composition(n: int, s: int, t: int, k: int, p: int = 2) -> bool:
    """phi_s^k phi_t^(k-s) == C(s+t, s) phi_(s+t)^k over GF(p)."""
    lhs = phi_matrix(n, s, k, p) @ phi_matrix(n, t, k - s, p)
    rhs = phi_matrix(n, s + t, k, p).scale(binomial(s + t, s))
    return lhs == rhs


def _sparse_phi(n: int, t: int, k: int) -> sparse.csr_matrix:
    r, c = _incidence(n, t, k)
    shape = (binomial(n, k), binomial(n, k - t))
    return sparse.csr_matrix((np.ones(r.size, dtype=np.int64), (r, c)), shape=shape)


def composes_to_zero(n: int, s: int, t: int, k: int, p: int = 2) -> bool:
    """Whether phi_s^(k+s) followed by phi_t^k vanishes mod p.

    The product is formed over the integers from the sparse incidence
    matrices, so this does not go through the dense elimination code.
    """
    if k + s > n or k - t < 0:
        return True
    prod = (_sparse_phi(n, s, k + s) @ _sparse_phi(n, t, k)).tocoo()
    return not np.any(prod.data % p)


def splitting_rule_sides(v: OmegaVector, w: OmegaVector, t: int) -> tuple[OmegaVector, OmegaVector]:
    """(v w) phi_t and sum_s (v phi_s)(w phi_(t-s)), with no support check."""
    lhs = apply_phi(disjoint_product(v, w), t)
    rhs = OmegaVector.zero(v.n, v.k + w.k - t, v.p)
    for s in range(t + 1):
        rhs = rhs + disjoint_product(apply_phi(v, s), apply_phi(w, t - s))
    return lhs, rhs


def check_splitting_rule(v: OmegaVector, w: OmegaVector, t: int) -> bool:
    """Product rule for phi_t; only valid for disjointly supported factors."""
    if v.support().mask & w.support().mask:
        raise InapplicableError("splitting rule needs disjoint supports")
    lhs, rhs = splitting_rule_sides(v, w, t)
    return lhs == rhs


def check_suspension(v: OmegaVector, x: Subset, ell: int, t: int) -> bool:
    """v == (v (X phi_ell)) phi_t under the suspension hypotheses.

    Raises InapplicableError when a hypothesis fails.
    """
    p = v.p
    if not 0 <= ell < t:
        raise InapplicableError(f"need 0 <= ell < t, got ell={ell}, t={t}")
    if x.size != ell + t or x.n != v.n:
        raise InapplicableError(f"X must be an (ell+t)-subset of 1..{v.n}")
    if v.support().mask & x.mask:
        raise InapplicableError("support of v meets X")
    if not carry_free(ell, t, p):
        raise InapplicableError(f"{ell} + {t} is not carry free")
    for s in range(1, ell + 1):
        if carry_free(ell, t - s, p):
            raise InapplicableError(f"{ell} + {t - s} is carry free")
    for s in range(ell + 1, t + 1):
        if not apply_phi(v, s).is_zero():
            raise InapplicableError(f"v is not in the kernel of phi_{s}")
    xphi = apply_phi(OmegaVector.basis_element(x, p), ell)
    return apply_phi(disjoint_product(v, xphi), t) == v
