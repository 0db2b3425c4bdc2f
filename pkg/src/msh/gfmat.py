"""Exact dense linear algebra over GF(p).

Vectors are rows and maps act on the right, so the image of a matrix is its
row space and its kernel is the left kernel.

Over GF(2) rows are packed 64 columns to a ``uint64`` word (column ``j`` is
bit ``j % 64`` of word ``j // 64``) and elimination XORs whole word slices.
For odd primes entries are ``int64`` residues.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .subsets import is_prime

__all__ = [
    "FpMatrix",
    "Subspace",
    "SpanBuilder",
    "rank",
    "left_kernel",
    "row_space",
    "subspace_contains",
    "subspace_leq",
    "subspace_intersection",
    "subspace_sum",
    "image_of",
    "quotient_coordinates",
    "read_matrix",
    "write_matrix",
]

_ONE = np.uint64(1)


def _words(cols: int) -> int:
    return (cols + 63) // 64


def _pack(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    r, c = bits.shape
    w = _words(c)
    padded = np.zeros((r, w * 64), dtype=np.uint8)
    padded[:, :c] = bits
    return np.ascontiguousarray(np.packbits(padded, axis=1, bitorder="little")).view("<u8").astype(np.uint64)


def _unpack(data: np.ndarray, cols: int) -> np.ndarray:
    data = np.ascontiguousarray(data, dtype="<u8")
    if data.shape[0] == 0 or cols == 0:
        return np.zeros((data.shape[0], cols), dtype=np.uint8)
    return np.unpackbits(data.view(np.uint8), axis=1, bitorder="little")[:, :cols]


class FpMatrix:
    """An immutable ``rows x cols`` matrix over GF(p)."""

    __slots__ = ("rows", "cols", "p", "_data")

    def __init__(self, rows: int, cols: int, p: int, data: np.ndarray):
        self.rows = int(rows)
        self.cols = int(cols)
        self.p = int(p)
        data = np.array(data, copy=True)
        data.setflags(write=False)
        self._data = data

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_dense(cls, array, p: int) -> "FpMatrix":
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        a = np.asarray(array, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2:
            raise ValueError("FpMatrix needs a 2-d array")
        a = np.mod(a, p)
        if p == 2:
            return cls(a.shape[0], a.shape[1], 2, _pack(a))
        return cls(a.shape[0], a.shape[1], p, a)

    @classmethod
    def _native(cls, rows: int, cols: int, p: int, data: np.ndarray) -> "FpMatrix":
        return cls(rows, cols, p, data)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FpMatrix":
        return cls.from_dense(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls.from_dense(np.eye(n, dtype=np.int64), p)

    @classmethod
    def from_entries(cls, rows: int, cols: int, p: int, row_idx, col_idx, values=None) -> "FpMatrix":
        """Build from coordinate lists; repeated coordinates are summed mod p."""
        a = np.zeros((rows, cols), dtype=np.int64)
        row_idx = np.asarray(row_idx, dtype=np.int64)
        col_idx = np.asarray(col_idx, dtype=np.int64)
        vals = np.ones(row_idx.shape, dtype=np.int64) if values is None else np.asarray(values, dtype=np.int64)
        np.add.at(a, (row_idx, col_idx), vals)
        return cls.from_dense(a, p)

    @classmethod
    def vstack(cls, mats: Sequence["FpMatrix"], cols: int | None = None, p: int | None = None) -> "FpMatrix":
        if not mats:
            if cols is None or p is None:
                raise ValueError("empty vstack needs cols and p")
            return cls.zeros(0, cols, p)
        cols, p = mats[0].cols, mats[0].p
        for m in mats:
            _check_compatible(mats[0], m, "vstack", same_rows=False)
        data = np.concatenate([m._data for m in mats], axis=0)
        return cls(data.shape[0], cols, p, data)

    # -- views ----------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def native(self) -> np.ndarray:
        """Internal storage (packed words for p = 2); read-only."""
        return self._data

    def to_dense(self) -> np.ndarray:
        if self.p == 2:
            return _unpack(self._data, self.cols).astype(np.int64)
        return np.array(self._data, dtype=np.int64)

    def row(self, i: int) -> np.ndarray:
        return self.take_rows([i]).to_dense()[0]

    def take_rows(self, idx) -> "FpMatrix":
        data = self._data[np.asarray(idx, dtype=np.int64)]
        return FpMatrix(data.shape[0], self.cols, self.p, data)

    def take_cols(self, idx) -> "FpMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        return FpMatrix.from_dense(self.to_dense()[:, idx], self.p)

    def permute_cols(self, perm) -> "FpMatrix":
        """Column ``j`` of the input moves to column ``perm[j]``."""
        dense = self.to_dense()
        out = np.zeros_like(dense)
        out[:, np.asarray(perm, dtype=np.int64)] = dense
        return FpMatrix.from_dense(out, self.p)

    @property
    def T(self) -> "FpMatrix":
        return FpMatrix.from_dense(self.to_dense().T, self.p)

    def transpose(self) -> "FpMatrix":
        return self.T

    def is_zero(self) -> bool:
        return not self._data.any()

    def nonzero_rows(self) -> np.ndarray:
        return np.flatnonzero(self._data.any(axis=1))

    # -- arithmetic -----------------------------------------------------------

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        if not isinstance(other, FpMatrix):
            return NotImplemented
        if self.p != other.p:
            raise ValueError("modulus mismatch in product")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        inner = self.cols
        if self.rows == 0 or other.cols == 0 or inner == 0:
            return FpMatrix.zeros(self.rows, other.cols, self.p)
        # BLAS product is exact while every partial sum stays below the mantissa
        exact32 = inner * (self.p - 1) ** 2 < 2**24
        dtype = np.float32 if exact32 else np.float64
        if inner * (self.p - 1) ** 2 >= 2**53:
            prod = self.to_dense() @ other.to_dense()
        else:
            a = self.to_dense().astype(dtype)
            b = other.to_dense().astype(dtype)
            prod = np.rint(a @ b).astype(np.int64)
        return FpMatrix.from_dense(prod, self.p)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        _check_compatible(self, other, "+")
        if self.p == 2:
            return FpMatrix(self.rows, self.cols, 2, self._data ^ other._data)
        return FpMatrix(self.rows, self.cols, self.p, (self._data + other._data) % self.p)

    def __neg__(self) -> "FpMatrix":
        if self.p == 2:
            return self
        return FpMatrix(self.rows, self.cols, self.p, (-self._data) % self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        return self + (-other)

    def scale(self, c: int) -> "FpMatrix":
        c %= self.p
        if self.p == 2:
            return self if c else FpMatrix.zeros(self.rows, self.cols, 2)
        return FpMatrix(self.rows, self.cols, self.p, (self._data * c) % self.p)

    def __mul__(self, c: int) -> "FpMatrix":
        if isinstance(c, (int, np.integer)):
            return self.scale(int(c))
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.p == other.p
            and np.array_equal(self._data, other._data)
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.p, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix({self.rows}x{self.cols} over GF({self.p}))"

    # -- text format ----------------------------------------------------------

    def to_text(self) -> str:
        buf = io.StringIO()
        write_matrix(self, buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "FpMatrix":
        return read_matrix(io.StringIO(text))


def _check_compatible(a: FpMatrix, b: FpMatrix, op: str, same_rows: bool = True) -> None:
    if a.p != b.p:
        raise ValueError(f"modulus mismatch in {op}: {a.p} vs {b.p}")
    if a.cols != b.cols or (same_rows and a.rows != b.rows):
        raise ValueError(f"shape mismatch in {op}: {a.shape} vs {b.shape}")


def write_matrix(m: FpMatrix, fh: TextIO) -> None:
    """Write ``rows cols p``, one 1-based ``i j v`` line per nonzero, then ``0 0 0``."""
    fh.write(f"{m.rows} {m.cols} {m.p}\n")
    dense = m.to_dense()
    for i, j in zip(*np.nonzero(dense)):
        fh.write(f"{i + 1} {j + 1} {dense[i, j]}\n")
    fh.write("0 0 0\n")


def read_matrix(fh: TextIO) -> FpMatrix:
    lines = (ln.split() for ln in fh if ln.strip())
    try:
        rows, cols, p = map(int, next(lines))
    except StopIteration:
        raise ValueError("empty matrix file") from None
    a = np.zeros((rows, cols), dtype=np.int64)
    for parts in lines:
        i, j, v = map(int, parts)
        if (i, j, v) == (0, 0, 0):
            break
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise ValueError(f"entry ({i}, {j}) outside {rows}x{cols}")
        if not 0 < v < p:
            raise ValueError(f"entry value {v} not a nonzero residue mod {p}")
        a[i - 1, j - 1] = v
    else:
        raise ValueError("matrix file missing '0 0 0' terminator")
    return FpMatrix.from_dense(a, p)


# ---------------------------------------------------------------------------
# Elimination kernels


def _eliminate2(a: np.ndarray, limit: int, full: bool) -> list[int]:
    """In-place GF(2) row reduction of packed ``a`` on columns ``< limit``."""
    nrows = a.shape[0]
    r = 0
    pivots = []
    for c in range(limit):
        if r == nrows:
            break
        w, b = divmod(c, 64)
        sh = np.uint64(b)
        hit = np.flatnonzero((a[r:, w] >> sh) & _ONE)
        if hit.size == 0:
            continue
        pr = r + hit[0]
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        lo = 0 if full else r + 1
        rows = lo + np.flatnonzero((a[lo:, w] >> sh) & _ONE)
        rows = rows[rows != r]
        if rows.size:
            # pivot row is zero left of column c
            a[rows, w:] ^= a[r, w:]
        pivots.append(c)
        r += 1
    return pivots


def _eliminatep(a: np.ndarray, p: int, limit: int, full: bool) -> list[int]:
    nrows = a.shape[0]
    r = 0
    pivots = []
    for c in range(limit):
        if r == nrows:
            break
        hit = np.flatnonzero(a[r:, c])
        if hit.size == 0:
            continue
        pr = r + hit[0]
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = (a[r, c:] * inv) % p
        lo = 0 if full else r + 1
        rows = lo + np.flatnonzero(a[lo:, c])
        rows = rows[rows != r]
        if rows.size:
            a[rows, c:] = (a[rows, c:] - a[rows, c : c + 1] * a[r, c:]) % p
        pivots.append(c)
        r += 1
    return pivots


def _eliminate(m: FpMatrix, full: bool) -> tuple[np.ndarray, list[int]]:
    a = np.array(m.native, copy=True)
    if m.p == 2:
        piv = _eliminate2(a, m.cols, full)
    else:
        piv = _eliminatep(a, m.p, m.cols, full)
    return a, piv


def rank(m: FpMatrix) -> int:
    """Rank over GF(p) by Gaussian elimination."""
    if m.rows == 0 or m.cols == 0:
        return 0
    # eliminate along the shorter side
    if m.p != 2 and m.cols > m.rows:
        m = m.T
    _, piv = _eliminate(m, full=False)
    return len(piv)


# ---------------------------------------------------------------------------
# Subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of GF(p)^ambient_dim held as a reduced row-echelon basis."""

    basis: FpMatrix
    pivot_cols: tuple[int, ...]

    @property
    def ambient_dim(self) -> int:
        return self.basis.cols

    @property
    def p(self) -> int:
        return self.basis.p

    @property
    def dim(self) -> int:
        return self.basis.rows

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(FpMatrix.zeros(0, ambient_dim, p), ())

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(FpMatrix.identity(ambient_dim, p), tuple(range(ambient_dim)))

    @classmethod
    def _from_rref(cls, a: np.ndarray, pivots: list[int], cols: int, p: int) -> "Subspace":
        r = len(pivots)
        return cls(FpMatrix(r, cols, p, a[:r]), tuple(pivots))

    def reduce(self, vectors: FpMatrix) -> FpMatrix:
        """Residue of each row of ``vectors`` after clearing the pivot columns."""
        _check_ambient(self, vectors)
        if self.dim == 0 or vectors.rows == 0:
            return vectors
        coeff = vectors.take_cols(self.pivot_cols)
        return vectors - coeff @ self.basis

    def contains(self, v) -> bool:
        return subspace_contains(self, v)

    def __le__(self, other: "Subspace") -> bool:
        return subspace_leq(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __and__(self, other: "Subspace") -> "Subspace":
        return subspace_intersection(self, other)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} in GF({self.p})^{self.ambient_dim})"


def _check_ambient(w: Subspace, vectors: FpMatrix) -> None:
    if vectors.p != w.p:
        raise ValueError(f"modulus mismatch: subspace over GF({w.p}), vectors over GF({vectors.p})")
    if vectors.cols != w.ambient_dim:
        raise ValueError(f"dimension mismatch: ambient {w.ambient_dim}, vectors of length {vectors.cols}")


def _as_rows(v, p: int) -> FpMatrix:
    if isinstance(v, FpMatrix):
        return v
    return FpMatrix.from_dense(np.atleast_2d(np.asarray(v, dtype=np.int64)), p)


def row_space(m: FpMatrix) -> Subspace:
    """Echelonised span of the rows of ``m``; dim equals rank(m)."""
    if m.rows == 0 or m.cols == 0:
        return Subspace.zero(m.cols, m.p)
    a, piv = _eliminate(m, full=True)
    return Subspace._from_rref(a, piv, m.cols, m.p)


def left_kernel(m: FpMatrix) -> Subspace:
    """{v : v M = 0}, echelonised; dim equals rows - rank(m)."""
    n = m.rows
    if n == 0:
        return Subspace.zero(0, m.p)
    if m.cols == 0:
        return Subspace.full(n, m.p)
    if m.p == 2:
        wm = m.native.shape[1]
        aug = np.concatenate([m.native, _pack(np.eye(n, dtype=np.uint8))], axis=1)
        piv = _eliminate2(aug, m.cols, full=False)
        tail = aug[len(piv):, wm:]
    else:
        aug = np.concatenate([np.array(m.native), np.eye(n, dtype=np.int64)], axis=1)
        piv = _eliminatep(aug, m.p, m.cols, full=False)
        tail = aug[len(piv):, m.cols:]
    return row_space(FpMatrix(tail.shape[0], n, m.p, tail))


def subspace_contains(w: Subspace, v) -> bool:
    rows = _as_rows(v, w.p)
    _check_ambient(w, rows)
    return w.reduce(rows).is_zero()


def subspace_leq(w1: Subspace, w2: Subspace) -> bool:
    _check_pair(w1, w2)
    return w2.reduce(w1.basis).is_zero()


def _check_pair(w1: Subspace, w2: Subspace) -> None:
    if w1.p != w2.p:
        raise ValueError(f"modulus mismatch: GF({w1.p}) vs GF({w2.p})")
    if w1.ambient_dim != w2.ambient_dim:
        raise ValueError(f"ambient mismatch: {w1.ambient_dim} vs {w2.ambient_dim}")


def subspace_sum(w1: Subspace, w2: Subspace) -> Subspace:
    _check_pair(w1, w2)
    return row_space(FpMatrix.vstack([w1.basis, w2.basis]))


def subspace_intersection(w1: Subspace, w2: Subspace) -> Subspace:
    # (a | b) in the left kernel of [B1; B2] gives a B1 = -b B2 in both
    _check_pair(w1, w2)
    if w1.dim == 0 or w2.dim == 0:
        return Subspace.zero(w1.ambient_dim, w1.p)
    rel = left_kernel(FpMatrix.vstack([w1.basis, w2.basis]))
    if rel.dim == 0:
        return Subspace.zero(w1.ambient_dim, w1.p)
    coeff = rel.basis.take_cols(range(w1.dim))
    return row_space(coeff @ w1.basis)


def image_of(w: Subspace, m: FpMatrix) -> Subspace:
    """Row space of (basis of w) times m."""
    if w.ambient_dim != m.rows or w.p != m.p:
        raise ValueError("subspace and map do not match")
    if w.dim == 0:
        return Subspace.zero(m.cols, m.p)
    return row_space(w.basis @ m)


def complement_columns(w: Subspace) -> np.ndarray:
    """Non-pivot columns of w; they index a basis of the quotient."""
    mask = np.ones(w.ambient_dim, dtype=bool)
    mask[list(w.pivot_cols)] = False
    return np.flatnonzero(mask)


def quotient_coordinates(w: Subspace, ambient: int, vectors) -> FpMatrix:
    """Coordinates of each vector's image in GF(p)^ambient / w.

    The quotient basis is the set of non-pivot columns of w's echelon form; a
    row is zero exactly when the vector lies in w.
    """
    if ambient != w.ambient_dim:
        raise ValueError(f"ambient mismatch: {ambient} vs {w.ambient_dim}")
    rows = _as_rows(vectors, w.p)
    _check_ambient(w, rows)
    return w.reduce(rows).take_cols(complement_columns(w))


def lift_quotient(w: Subspace, coords: FpMatrix) -> FpMatrix:
    """Inverse of quotient_coordinates on reduced representatives."""
    cols = complement_columns(w)
    dense = np.zeros((coords.rows, w.ambient_dim), dtype=np.int64)
    dense[:, cols] = coords.to_dense()
    return FpMatrix.from_dense(dense, w.p)


def coordinates_in(w: Subspace, vectors: FpMatrix) -> FpMatrix:
    """Coefficients expressing each row of ``vectors`` in w's echelon basis.

    Raises if some row is not in w.
    """
    if not w.reduce(vectors).is_zero():
        raise ValueError("vector not in subspace")
    return vectors.take_cols(w.pivot_cols)


# ---------------------------------------------------------------------------
# Incremental span


class SpanBuilder:
    """Grow an echelon basis one vector at a time.

    Rows are kept fully reduced, so reducing a new vector is one gather over
    the pivots it touches.  Vectors are dense residue arrays of length
    ``ambient_dim``.
    """

    def __init__(self, start: Subspace):
        self.p = start.p
        self.ambient_dim = start.ambient_dim
        width = start.basis.native.shape[1]
        dtype = start.basis.native.dtype
        self._rows = np.zeros((self.ambient_dim, width), dtype=dtype)
        self._rows[: start.dim] = start.basis.native
        self._piv = np.zeros(self.ambient_dim, dtype=np.int64)
        self._piv[: start.dim] = start.pivot_cols
        self._n = start.dim
        self.initial_dim = start.dim

    @property
    def dim(self) -> int:
        return self._n

    def _native(self, v: np.ndarray) -> np.ndarray:
        v = np.mod(np.asarray(v, dtype=np.int64), self.p)
        if self.p == 2:
            return _pack(v.reshape(1, -1))[0]
        return v

    def _dense(self, x: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return _unpack(x.reshape(1, -1), self.ambient_dim)[0].astype(np.int64)
        return x

    def _reduce_native(self, x: np.ndarray) -> np.ndarray:
        n = self._n
        if n == 0:
            return x
        piv = self._piv[:n]
        if self.p == 2:
            sel = ((x[piv >> 6] >> (piv & 63).astype(np.uint64)) & _ONE).astype(bool)
            if sel.any():
                x = x ^ np.bitwise_xor.reduce(self._rows[:n][sel], axis=0)
            return x
        coeff = x[piv]
        nz = np.flatnonzero(coeff)
        if nz.size:
            x = (x - coeff[nz] @ self._rows[nz]) % self.p
        return x

    def reduce(self, v) -> np.ndarray:
        return self._dense(self._reduce_native(self._native(v)))

    def add(self, v) -> bool:
        """Add v to the span; True if the dimension grew."""
        x = self._reduce_native(self._native(v))
        if not x.any():
            return False
        n = self._n
        if self.p == 2:
            w = int(np.flatnonzero(x)[0])
            c = w * 64 + (int(x[w]) & -int(x[w])).bit_length() - 1
            hit = np.flatnonzero((self._rows[:n, w] >> np.uint64(c & 63)) & _ONE)
            if hit.size:
                self._rows[hit] ^= x
        else:
            c = int(np.flatnonzero(x)[0])
            x = (x * pow(int(x[c]), -1, self.p)) % self.p
            hit = np.flatnonzero(self._rows[:n, c])
            if hit.size:
                self._rows[hit] = (self._rows[hit] - self._rows[hit, c : c + 1] * x) % self.p
        self._rows[n] = x
        self._piv[n] = c
        self._n += 1
        return True

    def subspace(self) -> Subspace:
        # rows are reduced at the pivots but need not be in echelon order
        return row_space(FpMatrix(self._n, self.ambient_dim, self.p, self._rows[: self._n].copy()))
