"""Homology of the multistep complexes, exactness predicates and their witnesses.

At degree k the homology is ker(phi_t^k) / im(phi_s^(k+s)).  Dimensions come
from ranks alone; the structural checks (splittings, cyclic generation, the
square-zero endomorphism theta) work with explicit subspaces.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .boundary import (
    OmegaVector,
    VkSpec,
    apply_phi,
    apply_perm,
    build_v,
    composes_to_zero,
    permutation_matrix,
    phi_matrix,
    transposition,
)
from .cache import CacheKey, cache_get, cache_put
from .errors import ChainConditionError, InapplicableError
from .gfmat import (
    FpMatrix,
    SpanBuilder,
    Subspace,
    coordinates_in,
    image_of,
    left_kernel,
    lift_quotient,
    quotient_coordinates,
    rank,
    row_space,
    subspace_intersection,
    subspace_leq,
)
from .subsets import (
    Subset,
    binomial,
    carry_free,
    is_prime,
    is_two_power,
    least_two_power,
    permutation_indices,
    subset_masks,
)

__all__ = [
    "ChainComplexSpec",
    "HomologyReport",
    "ExactnessReport",
    "SplitReport",
    "ThetaReport",
    "GeneratorReport",
    "phi_rank",
    "homology_dim",
    "complex_profile",
    "exactness_predicate",
    "split_exact_predicate",
    "split_exactness_report",
    "invariant_line_has_complement",
    "non_split_degree",
    "surjectivity_predicate",
    "homotopy_split_check",
    "check_phiphistar_expansion",
    "check_gamma_triple",
    "cyclic_span",
    "generator_check",
    "generator_report",
    "theta_on_homology",
    "kernel_containment_witness",
]


# ---------------------------------------------------------------------------
# Ranks


@lru_cache(maxsize=None)
def phi_rank(n: int, t: int, k: int, p: int = 2) -> int:
    """rank of phi_t^k over GF(p); consults the disk cache when one is set."""
    if k < 0 or k > n or k - t < 0:
        return 0
    key = CacheKey(n, p, t, k, False, "rank")
    hit = cache_get(key)
    if hit is not None:
        return int(hit)
    r = rank(phi_matrix(n, t, k, p))
    cache_put(key, r)
    return r


def kernel_dim(n: int, t: int, k: int, p: int = 2) -> int:
    return binomial(n, k) - phi_rank(n, t, k, p)


@lru_cache(maxsize=None)
def _chain_ok(n: int, s: int, t: int, k: int, p: int) -> bool:
    return composes_to_zero(n, s, t, k, p)


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class HomologyReport:
    """Homology dimensions at one degree of a complex."""

    n: int
    p: int
    k: int
    s_in: int | None
    t_out: int | None
    dim_ker: int
    dim_im: int
    predicted_dim: int | None = None
    label: str | None = None

    def __post_init__(self):
        if self.dim_H < 0:
            raise ValueError(f"image ({self.dim_im}) larger than kernel ({self.dim_ker})")

    @property
    def dim_H(self) -> int:
        return self.dim_ker - self.dim_im

    @property
    def exact(self) -> bool:
        return self.dim_H == 0

    @property
    def agrees(self) -> bool | None:
        """Whether dim_H matches the prediction; None without one."""
        return None if self.predicted_dim is None else self.dim_H == self.predicted_dim

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "k": self.k,
            "s_in": self.s_in,
            "t_out": self.t_out,
            "dim_ker": self.dim_ker,
            "dim_im": self.dim_im,
            "dim_H": self.dim_H,
            "exact": self.exact,
            "predicted_dim": self.predicted_dim,
            "label": self.label,
        }


@dataclass(frozen=True)
class ChainComplexSpec:
    """The complex with maps phi_t between degrees a, a+t, ..., a+ct <= n."""

    n: int
    p: int
    a: int
    t: int

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("step t must be >= 1")
        if not 0 <= self.a < self.t:
            raise ValueError(f"base degree must satisfy 0 <= a < t, got a={self.a}, t={self.t}")
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if binomial(2 * self.t, self.t) % self.p:
            raise ChainConditionError(f"phi_{self.t} twice is C({2 * self.t},{self.t}) phi_{2 * self.t}, nonzero mod {self.p}")

    @property
    def degrees(self) -> list[int]:
        return list(range(self.a, self.n + 1, self.t))


def predicted_homology(n: int, p: int, k: int, s: int | None, t: int | None) -> tuple[int | None, str | None]:
    """Closed-form dimension where one is known (characteristic 2, equal steps)."""
    if p != 2 or s is None or t is None or s != t or not 0 <= k <= n:
        return None, None
    if t == 2:
        m, odd = divmod(n, 2)
        if not odd and k == m:
            return 2**m, f"E^({m + 1},{m - 1})"
        if odd and k in (m, m + 1):
            return 2**m, f"D^({m + 1},{m})"
        return 0, None
    if exactness_predicate(n, t, k).predicate:
        return 0, None
    return None, None


def homology_dim(n: int, p: int, k: int, s_in: int | None, t_out: int | None) -> HomologyReport:
    """dim ker phi_(t_out)^k - dim im phi_(s_in)^(k+s_in) over GF(p).

    ``None`` for either step stands for the zero map, as at the ends of a
    truncated complex.  Raises ChainConditionError if the two maps do not
    compose to zero mod p.
    """
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    if not 0 <= k <= n:
        raise ValueError(f"degree {k} outside 0..{n}")
    if s_in is not None and t_out is not None and not _chain_ok(n, s_in, t_out, k, p):
        raise ChainConditionError(f"phi_{s_in} then phi_{t_out} into degree {k - t_out} is nonzero mod {p}")
    dim_ker = binomial(n, k) if t_out is None else kernel_dim(n, t_out, k, p)
    dim_im = 0 if s_in is None else phi_rank(n, s_in, k + s_in, p)
    pred, label = predicted_homology(n, p, k, s_in, t_out)
    return HomologyReport(n, p, k, s_in, t_out, dim_ker, dim_im, pred, label)


def complex_profile(spec: ChainComplexSpec) -> list[HomologyReport]:
    """Homology at every degree of the complex, ends included."""
    return [homology_dim(spec.n, spec.p, k, spec.t, spec.t) for k in spec.degrees]


# ---------------------------------------------------------------------------
# Exactness predicates


@dataclass(frozen=True)
class ExactnessReport:
    n: int
    t: int
    k: int
    tau_power: int
    predicate: bool
    condition_hit: str
    brute_force: bool | None = None

    @property
    def agrees(self) -> bool | None:
        return None if self.brute_force is None else self.brute_force == self.predicate

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "k": self.k,
            "tau_power": self.tau_power,
            "predicate": self.predicate,
            "brute_force": self.brute_force,
            "condition_hit": self.condition_hit,
        }


def exactness_predicate(n: int, t: int, k: int, brute_force: bool = False) -> ExactnessReport:
    """Closed-form test for ker phi_t^k = im phi_t^(k+t) over GF(2).

    With 2^tau the least two-power in t, the complex is exact at k iff
    t = 1, or k < 2^tau and k+t <= n-k (or the same with k and n-k swapped),
    or t is a two-power and k lies outside the band n-2k in (-t, t).
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if not 0 <= k <= n:
        raise ValueError(f"degree {k} outside 0..{n}")
    tp = least_two_power(t)
    if t == 1:
        hit = "t_is_1"
    elif k < tp and k + t <= n - k:
        hit = "small_k_side"
    elif n - k < tp and n - k + t <= k:
        hit = "small_nk_side"
    elif is_two_power(t) and (n >= 2 * k + t or n <= 2 * k - t):
        hit = "two_power_range"
    else:
        hit = "none"
    bf = homology_dim(n, 2, k, t, t).exact if brute_force else None
    return ExactnessReport(n, t, k, tp, hit != "none", hit, bf)


def surjectivity_predicate(n: int, t: int, k: int) -> bool:
    """Closed form for phi_t^(k+t) mapping onto FOmega_k over GF(2)."""
    return k < least_two_power(t) and k + t <= n - k


def split_exact_predicate(n: int, t: int, a: int) -> tuple[bool, str | None]:
    """Closed form for the complex on degrees a, a+t, ... to be split exact.

    Returns the verdict and which condition fired: "a" for n = 2a+t with
    a below the least two-power of t, "b" for t a two-power with
    n = 2a+t mod 2t.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if not 0 <= a < t:
        raise ValueError(f"need 0 <= a < t, got a={a}, t={t}")
    if n == 2 * a + t and a < least_two_power(t):
        return True, "a"
    if is_two_power(t) and (n - 2 * a - t) % (2 * t) == 0:
        return True, "b"
    return False, None


def homotopy_split_check(n: int, t: int, k: int, p: int = 2) -> bool:
    """Check the contracting-homotopy identity and the splitting it gives.

    Needs t a two-power and n = 2k+t mod 2t.  Verifies
    P_k P_k^T + P_(k+t)^T P_(k+t) = I on FOmega_k and that FOmega_k is the
    direct sum of ker phi_t^k and the image of the dual map into degree k.
    """
    if not is_two_power(t):
        raise InapplicableError(f"t={t} is not a two-power")
    if (n - 2 * k - t) % (2 * t):
        raise InapplicableError(f"n={n} is not 2k+t mod 2t for k={k}, t={t}")
    if not 0 <= k <= n:
        raise InapplicableError(f"degree {k} outside 0..{n}")
    pk = phi_matrix(n, t, k, p)
    pkt = phi_matrix(n, t, k + t, p)
    size = binomial(n, k)
    if pk @ pk.T + pkt.T @ pkt != FpMatrix.identity(size, p):
        return False
    ker = left_kernel(pk)
    dual_image = row_space(pk.T)
    if ker.dim + dual_image.dim != size:
        return False
    return subspace_intersection(ker, dual_image).dim == 0


def invariant_line_has_complement(v: OmegaVector) -> bool:
    """For a vector fixed by S_n, whether its span has an invariant complement.

    FOmega_k is a transitive permutation module, so its only invariant linear
    functionals are multiples of the coordinate sum; a fixed line has an
    invariant complement exactly when that sum is nonzero on it.
    """
    for i in range(1, v.n):
        if apply_perm(transposition(v.n, i, i + 1), v) != v:
            raise ValueError("vector is not fixed by S_n")
    if v.is_zero():
        raise ValueError("zero vector spans no line")
    return int(np.sum(v.coords)) % v.p != 0


def non_split_degree(n: int, t: int, a: int) -> int | None:
    """A degree where the kernel provably has no invariant complement, or None.

    Only the one-dimensional kernels spanned by a fixed vector are examined,
    which covers the top of the t = 1 complex.
    """
    for k in ChainComplexSpec(n, 2, a, t).degrees:
        ker = left_kernel(phi_matrix(n, t, k))
        if ker.dim != 1:
            continue
        v = OmegaVector.from_row(n, k, ker.basis)
        try:
            if not invariant_line_has_complement(v):
                return k
        except ValueError:
            continue
    return None


@dataclass(frozen=True)
class SplitReport:
    n: int
    t: int
    a: int
    predicate: bool
    condition: str | None
    dims: tuple[int, ...]
    homotopy_ok: bool | None
    non_split_at: int | None

    @property
    def exact_everywhere(self) -> bool:
        return not any(self.dims)

    @property
    def agrees(self) -> bool:
        """predicate <=> exact in every degree, with homotopy witnesses when true."""
        if self.predicate != self.exact_everywhere:
            return False
        return self.homotopy_ok is not False

    @property
    def split_agrees(self) -> bool:
        """predicate <=> split exact: witnesses when true, an obstruction when false."""
        if self.predicate:
            return self.exact_everywhere and bool(self.homotopy_ok)
        return not self.exact_everywhere or self.non_split_at is not None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "a": self.a,
            "predicate": self.predicate,
            "condition": self.condition,
            "dims": list(self.dims),
            "exact_everywhere": self.exact_everywhere,
            "homotopy_ok": self.homotopy_ok,
            "non_split_at": self.non_split_at,
            "agrees": self.agrees,
            "split_agrees": self.split_agrees,
        }


def split_exactness_report(n: int, t: int, a: int) -> SplitReport:
    """Predicate against brute force, with homotopy witnesses when it holds.

    The homotopy identity is checked at every degree of the complex where
    its congruence hypothesis applies (all of them under condition (b)).
    When the predicate fails but the complex is exact, a one-dimensional
    kernel without invariant complement is searched for.
    """
    pred, cond = split_exact_predicate(n, t, a)
    spec = ChainComplexSpec(n, 2, a, t)
    dims = tuple(r.dim_H for r in complex_profile(spec))
    homotopy = None
    if pred:
        checked = [homotopy_split_check(n, t, k) for k in spec.degrees if is_two_power(t) and (n - 2 * k - t) % (2 * t) == 0]
        homotopy = all(checked)
    obstruction = non_split_degree(n, t, a) if not pred and not any(dims) else None
    return SplitReport(n, t, a, pred, cond, dims, homotopy, obstruction)


# ---------------------------------------------------------------------------
# Products of a map with its dual


def _symmetric_difference_matrix(n: int, k: int, d: int, p: int) -> FpMatrix:
    """A_d on FOmega_k: (Y, X) = 1 iff |X symdiff Y| = 2d."""
    masks = subset_masks(n, k)
    dist = np.bitwise_count((masks[:, None] ^ masks[None, :]).astype(np.uint64))
    return FpMatrix.from_dense((dist == 2 * d).astype(np.int64), p)


def check_phiphistar_expansion(n: int, t: int, k: int, p: int = 2) -> bool:
    """Expand P P^T and P^T P in the symmetric-difference matrices A_d.

    P_k P_k^T = sum_d C(k-d, t-d) A_d and P_(k+t)^T P_(k+t) = sum_d
    C(n-k-d, t-d) A_d on FOmega_k.  For t = 1 also checks that the two
    products add up to n I + 2 A_1 (so n I when p = 2).
    """
    if not 0 <= k <= n:
        raise ValueError(f"degree {k} outside 0..{n}")
    size = binomial(n, k)
    down = FpMatrix.zeros(size, size, p)
    up = FpMatrix.zeros(size, size, p)
    for d in range(0, t + 1):
        a_d = _symmetric_difference_matrix(n, k, d, p)
        down = down + a_d.scale(binomial(k - d, t - d))
        up = up + a_d.scale(binomial(n - k - d, t - d))
    pk = phi_matrix(n, t, k, p)
    pkt = phi_matrix(n, t, k + t, p)
    ok = pk @ pk.T == down and pkt.T @ pkt == up
    if t == 1:
        expect = FpMatrix.identity(size, p).scale(n) + _symmetric_difference_matrix(n, k, 1, p).scale(2)
        ok = ok and pk @ pk.T + pkt.T @ pkt == expect
    return ok


def check_gamma_triple(n: int, k: int, p: int = 2) -> bool:
    """gamma gamma* gamma == n gamma on FOmega_k."""
    g = phi_matrix(n, 1, k, p)
    return g @ g.T @ g == g.scale(n)


# ---------------------------------------------------------------------------
# Cyclic generation


def _adjacent_index_maps(n: int, k: int) -> list[np.ndarray]:
    return [permutation_indices(transposition(n, i, i + 1), n, k) for i in range(1, n)]


def cyclic_span(v: OmegaVector, modulo: Subspace) -> int:
    """Dimension of the S_n-submodule generated by v in FOmega_k / modulo.

    ``modulo`` should itself be S_n-invariant.  New vectors are pushed
    through every adjacent transposition until nothing enlarges the span.
    """
    if modulo.ambient_dim != v.dim or modulo.p != v.p:
        raise ValueError(f"v lives in GF({v.p})^{v.dim}, modulo in GF({modulo.p})^{modulo.ambient_dim}")
    builder = SpanBuilder(modulo)
    if not builder.add(v.coords):
        return 0
    maps = _adjacent_index_maps(v.n, v.k)
    queue = deque([np.asarray(v.coords, dtype=np.int64)])
    while queue:
        u = queue.popleft()
        for idx in maps:
            w = np.empty_like(u)
            w[idx] = u
            if builder.add(w):
                queue.append(w)
    return builder.dim - builder.initial_dim


@dataclass(frozen=True)
class GeneratorReport:
    n: int
    t: int
    k: int
    in_kernel: bool
    span_dim: int
    dim_H: int

    @property
    def generates(self) -> bool:
        return self.in_kernel and self.span_dim == self.dim_H

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "k": self.k,
            "in_kernel": self.in_kernel,
            "span_dim": self.span_dim,
            "dim_H": self.dim_H,
            "generates": self.generates,
        }


def generator_report(n: int, t: int, k: int, p: int = 2) -> GeneratorReport:
    """Does v_k^(t) generate ker phi_t^k / im phi_t^(k+t)?"""
    v = build_v(VkSpec(n, k, t), p)
    in_kernel = apply_phi(v, t).is_zero()
    dim_h = homology_dim(n, p, k, t, t).dim_H
    span = cyclic_span(v, row_space(phi_matrix(n, t, k + t, p))) if in_kernel else 0
    return GeneratorReport(n, t, k, in_kernel, span, dim_h)


def generator_check(n: int, t: int, k: int, p: int = 2) -> bool:
    return generator_report(n, t, k, p).generates


# ---------------------------------------------------------------------------
# The square-zero endomorphism on the middle homology


@dataclass(frozen=True, eq=False)
class ThetaReport:
    """theta induced by gamma_m gamma_m* on H_m for n = 2m, t = 2."""

    m: int
    dim_H: int
    theta_matrix: FpMatrix
    kernel_stable: bool
    image_stable: bool
    v_theta_ok: bool
    v_chain_ok: bool
    annihilated: bool
    equivariant: bool

    @property
    def nonzero(self) -> bool:
        return not self.theta_matrix.is_zero()

    @property
    def square_zero(self) -> bool:
        return (self.theta_matrix @ self.theta_matrix).is_zero()

    @property
    def ok(self) -> bool:
        return all(
            (
                self.kernel_stable,
                self.image_stable,
                self.v_theta_ok,
                self.v_chain_ok,
                self.annihilated,
                self.equivariant,
                self.nonzero,
                self.square_zero,
            )
        )

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "dim_H": self.dim_H,
            "nonzero": self.nonzero,
            "square_zero": self.square_zero,
            "kernel_stable": self.kernel_stable,
            "image_stable": self.image_stable,
            "v_theta_ok": self.v_theta_ok,
            "v_chain_ok": self.v_chain_ok,
            "annihilated": self.annihilated,
            "equivariant": self.equivariant,
            "theta_rank": rank(self.theta_matrix),
        }


def theta_on_homology(n: int) -> ThetaReport:
    """Build theta on H_m = ker eps_m / im eps_(m+2) over GF(2), n = 2m.

    Homology coordinates: reduce kernel vectors modulo the echelon basis of
    the image, keep the non-pivot columns, and express the result in the
    echelon basis of the resulting subspace.
    """
    if n % 2:
        raise ValueError(f"theta needs n even, got {n}")
    m = n // 2
    if m < 2:
        raise ValueError("theta needs n >= 4")
    p = 2
    size = binomial(n, m)
    gamma = phi_matrix(n, 1, m, p)
    e = gamma @ gamma.T
    eps = phi_matrix(n, 2, m, p)
    ker = left_kernel(eps)
    im = row_space(phi_matrix(n, 2, m + 2, p))

    kernel_stable = (ker.basis @ e @ eps).is_zero()
    image_stable = subspace_leq(image_of(im, e), im)

    h = row_space(quotient_coordinates(im, size, ker.basis))

    def coords(vectors: FpMatrix) -> FpMatrix:
        return coordinates_in(h, quotient_coordinates(im, size, vectors))

    lifts = lift_quotient(im, h.basis)
    theta = coords(lifts @ e)

    sigma = transposition(n, 2 * m - 1, 2 * m)
    v = build_v(VkSpec(n, m, 2), p)
    u = v + apply_perm(sigma, v)
    ve = OmegaVector.from_row(n, m, v.as_row() @ e)
    v_chain_ok = ve == u
    v_theta_ok = coords(v.as_row()) @ theta == coords(u.as_row())
    annihilated = (u.as_row() @ e).is_zero()

    equivariant = True
    for i in range(1, n):
        rho = coords(lifts @ permutation_matrix(transposition(n, i, i + 1), n, m, p))
        if rho @ theta != theta @ rho:
            equivariant = False
            break

    return ThetaReport(m, h.dim, theta, kernel_stable, image_stable, v_theta_ok, v_chain_ok, annihilated, equivariant)


# ---------------------------------------------------------------------------
# Proper kernel containment


@dataclass(frozen=True)
class ContainmentReport:
    n: int
    s: int
    t: int
    k: int
    contained: bool
    witness_in_t_kernel: bool
    witness_outside_s_kernel: bool

    @property
    def proper(self) -> bool:
        return self.contained and self.witness_in_t_kernel and self.witness_outside_s_kernel

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "t": self.t,
            "k": self.k,
            "contained": self.contained,
            "witness_in_t_kernel": self.witness_in_t_kernel,
            "witness_outside_s_kernel": self.witness_outside_s_kernel,
            "proper": self.proper,
        }


def containment_report(n: int, s: int, t: int, k: int, p: int = 2) -> ContainmentReport:
    if p != 2:
        raise InapplicableError("the witness construction is for characteristic 2")
    if not 1 <= s < t:
        raise InapplicableError(f"need 1 <= s < t, got s={s}, t={t}")
    if not carry_free(s, t - s):
        raise InapplicableError(f"C({t},{s}) is even")
    if k < s:
        raise InapplicableError(f"need k >= s, got k={k}")
    beta = least_two_power(t & ~s)
    if k + beta > n:
        raise InapplicableError(f"witness needs k + {beta} <= n")
    contained = subspace_leq(left_kernel(phi_matrix(n, s, k, p)), left_kernel(phi_matrix(n, t, k, p)))
    top = OmegaVector.basis_element(Subset.of(range(1, k + beta + 1), n), p)
    v = apply_phi(top, beta)
    return ContainmentReport(n, s, t, k, contained, apply_phi(v, t).is_zero(), not apply_phi(v, s).is_zero())


def kernel_containment_witness(n: int, s: int, t: int, k: int, p: int = 2) -> bool:
    """ker phi_s^k lies in ker phi_t^k, properly, shown by an explicit vector.

    Needs s < t with C(t, s) odd and k >= s.  With 2^beta the lowest bit of
    t missing from s, the witness is {1, ..., k + 2^beta} phi_(2^beta).
    """
    return containment_report(n, s, t, k, p).proper
