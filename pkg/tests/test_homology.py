import numpy as np
import pytest

from msh.boundary import OmegaVector, VkSpec, build_v, phi_matrix
from msh.errors import ChainConditionError, InapplicableError
from msh.gfmat import FpMatrix, Subspace, left_kernel, rank, row_space, subspace_leq
from msh.homology import (
    ChainComplexSpec,
    _symmetric_difference_matrix,
    check_gamma_triple,
    check_phiphistar_expansion,
    complex_profile,
    cyclic_span,
    exactness_predicate,
    generator_check,
    homology_dim,
    homotopy_split_check,
    invariant_line_has_complement,
    kernel_containment_witness,
    split_exact_predicate,
    split_exactness_report,
    surjectivity_predicate,
    theta_on_homology,
)
from msh.subsets import binomial


def test_homology_examples():
    assert homology_dim(6, 2, 3, 2, 2).dim_H == 8
    assert homology_dim(7, 2, 3, 2, 2).dim_H == 8
    assert homology_dim(4, 2, 0, 2, 2).dim_H == 0
    r = homology_dim(6, 2, 3, 2, 2)
    assert r.dim_H == r.dim_ker - r.dim_im and not r.exact
    assert r.predicted_dim == 8 and r.label == "E^(4,2)"
    assert homology_dim(7, 2, 4, 2, 2).label == "D^(4,3)"


def test_kernel_dims_example():
    assert left_kernel(phi_matrix(6, 2, 2)).dim == 14
    assert left_kernel(phi_matrix(6, 2, 4)).dim == 1


def test_zero_maps_at_the_ends():
    r = homology_dim(5, 2, 5, None, 1)
    assert r.dim_im == 0 and r.dim_ker == 0  # gamma_5 is injective
    r = homology_dim(5, 2, 0, 1, None)
    assert r.dim_ker == 1 and r.dim_im == 1  # gamma_1 is onto FOmega_0


def test_chain_condition_error():
    with pytest.raises(ChainConditionError):
        homology_dim(6, 2, 3, 1, 2)  # C(3,1) is odd
    with pytest.raises(ChainConditionError):
        ChainComplexSpec(6, 3, 0, 1)  # C(2,1) = 2 is a unit mod 3
    with pytest.raises(ValueError):
        ChainComplexSpec(6, 2, 2, 2)
    with pytest.raises(ValueError):
        homology_dim(6, 4, 3, 2, 2)


def test_complex_profile_examples():
    assert [r.dim_H for r in complex_profile(ChainComplexSpec(6, 2, 0, 2))] == [0, 0, 0, 0]
    prof = complex_profile(ChainComplexSpec(6, 2, 1, 2))
    assert [r.k for r in prof] == [1, 3, 5] and [r.dim_H for r in prof] == [0, 8, 0]
    prof = complex_profile(ChainComplexSpec(13, 2, 0, 4))
    assert [r.k for r in prof] == [0, 4, 8, 12]
    assert [r.dim_H > 0 for r in prof] == [False, False, True, False]


def test_exactness_examples():
    r = exactness_predicate(13, 4, 4)
    assert r.predicate and r.condition_hit == "two_power_range" and r.tau_power == 4
    assert not exactness_predicate(13, 4, 8).predicate
    assert not exactness_predicate(9, 3, 4).predicate
    assert all(exactness_predicate(n, 1, k).predicate for n in range(1, 10) for k in range(n + 1))
    assert exactness_predicate(10, 6, 1).condition_hit == "small_k_side"
    assert exactness_predicate(10, 6, 9).condition_hit == "small_nk_side"
    with pytest.raises(ValueError):
        exactness_predicate(5, 1, 6)


def test_exactness_brute_force_small():
    for n in range(1, 10):
        for t in range(1, n + 1):
            for k in range(n + 1):
                r = exactness_predicate(n, t, k, brute_force=True)
                assert r.agrees, r


def test_surjectivity():
    for n in range(1, 13):
        for t in range(1, n + 1):
            for k in range(0, n + 1):
                onto = rank(phi_matrix(n, t, k + t)) == binomial(n, k)
                assert onto == surjectivity_predicate(n, t, k), (n, t, k)


def test_homology_duality():
    for n in range(1, 12):
        for t in range(1, n + 1):
            for k in range(n + 1):
                assert homology_dim(n, 2, k, t, t).dim_H == homology_dim(n, 2, n - k, t, t).dim_H


def test_split_predicate_examples():
    assert split_exact_predicate(6, 2, 0) == (True, "b")
    assert split_exact_predicate(5, 2, 1) == (False, None)
    assert split_exact_predicate(10, 4, 3) == (True, "a")
    with pytest.raises(ValueError):
        split_exact_predicate(10, 4, 4)


def test_homotopy_examples():
    assert homotopy_split_check(6, 2, 2)
    assert homotopy_split_check(6, 2, 0)
    assert homotopy_split_check(10, 4, 3)
    with pytest.raises(InapplicableError):
        homotopy_split_check(7, 2, 2)
    with pytest.raises(InapplicableError):
        homotopy_split_check(9, 3, 0)


def test_direct_sum_example():
    ker = left_kernel(phi_matrix(6, 2, 2))
    dual_image = row_space(phi_matrix(6, 2, 2).T)
    assert (ker & dual_image).dim == 0
    assert ker.dim + dual_image.dim == binomial(6, 2)


def test_split_exactness_corrected_reading():
    # exact everywhere but not split: the top kernel of the t = 1 complex
    for n in range(2, 11, 2):
        r = split_exactness_report(n, 1, 0)
        assert r.exact_everywhere and not r.predicate and r.non_split_at == n - 1
    for n in range(1, 11):
        for t in range(1, n + 1):
            for a in range(t):
                assert split_exactness_report(n, t, a).split_agrees


def test_invariant_line():
    n = 5
    all_ones = OmegaVector(n, n - 1, 2, np.ones(n, dtype=np.int64))
    assert invariant_line_has_complement(all_ones)
    assert not invariant_line_has_complement(OmegaVector(6, 5, 2, np.ones(6, dtype=np.int64)))
    with pytest.raises(ValueError):
        invariant_line_has_complement(OmegaVector(4, 1, 2, np.array([1, 0, 0, 0])))


@pytest.mark.parametrize("p", [2, 3])
def test_phiphistar_expansion(p):
    for n in range(0, 9):
        for t in range(1, 4):
            for k in range(0, n + 1):
                assert check_phiphistar_expansion(n, t, k, p), (n, t, k)


def test_gamma_sums_examples():
    g2, g3 = phi_matrix(5, 1, 2), phi_matrix(5, 1, 3)
    assert g2 @ g2.T + g3.T @ g3 == FpMatrix.identity(10, 2)
    g2, g3 = phi_matrix(4, 1, 2), phi_matrix(4, 1, 3)
    assert (g2 @ g2.T + g3.T @ g3).is_zero()
    assert _symmetric_difference_matrix(6, 3, 0, 2) == FpMatrix.identity(20, 2)


def test_gamma_triple():
    for n in range(0, 11):
        for k in range(0, n + 1):
            assert check_gamma_triple(n, k)
            if n % 2 == 0:
                g = phi_matrix(n, 1, k)
                assert (g @ g.T @ g).is_zero()


def test_cyclic_span_examples():
    empty = OmegaVector.from_sets(5, [()], k=0)
    assert cyclic_span(empty, Subspace.zero(1, 2)) == 1
    one = OmegaVector.from_sets(7, [(1,)])
    assert cyclic_span(one, Subspace.zero(7, 2)) == 7
    v3 = build_v(VkSpec(6, 3, 2))
    assert cyclic_span(v3, row_space(phi_matrix(6, 2, 5))) == 8
    with pytest.raises(ValueError):
        cyclic_span(v3, Subspace.zero(5, 2))


def test_generator_examples():
    assert generator_check(6, 2, 3)
    assert generator_check(7, 2, 3)
    assert generator_check(12, 4, 6)


@pytest.mark.parametrize("n,dim", [(4, 4), (6, 8), (8, 16)])
def test_theta(n, dim):
    rep = theta_on_homology(n)
    assert rep.dim_H == dim and rep.theta_matrix.shape == (dim, dim)
    assert rep.nonzero and rep.square_zero
    assert rep.kernel_stable and rep.image_stable
    assert rep.v_theta_ok and rep.v_chain_ok and rep.annihilated
    assert rep.equivariant


def test_theta_errors():
    with pytest.raises(ValueError):
        theta_on_homology(7)
    with pytest.raises(ValueError):
        theta_on_homology(2)


def test_kernel_containment():
    assert kernel_containment_witness(10, 2, 3, 4)
    assert kernel_containment_witness(12, 1, 5, 3)
    assert subspace_leq(left_kernel(phi_matrix(8, 1, 4)), left_kernel(phi_matrix(8, 3, 4)))
    for n in range(2, 11):
        for t in range(2, 7):
            for s in range(1, t):
                if s & t != s:
                    continue
                beta = (t & ~s) & -(t & ~s)
                for k in range(s, n - beta + 1):
                    assert kernel_containment_witness(n, s, t, k), (n, s, t, k)
    with pytest.raises(InapplicableError):
        kernel_containment_witness(10, 1, 2, 4)  # C(2,1) even
    with pytest.raises(InapplicableError):
        kernel_containment_witness(10, 2, 3, 1)  # k < s
    with pytest.raises(InapplicableError):
        kernel_containment_witness(5, 1, 3, 4)  # no room for the witness
