import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msh.gfmat import (
    FpMatrix,
    SpanBuilder,
    Subspace,
    coordinates_in,
    image_of,
    left_kernel,
    lift_quotient,
    quotient_coordinates,
    rank,
    read_matrix,
    row_space,
    subspace_contains,
    subspace_intersection,
    subspace_leq,
    subspace_sum,
    write_matrix,
)

PRIMES = [2, 3, 5, 7]


def oracle_rank(a, p):
    """Textbook elimination on Python ints."""
    a = [[int(x) % p for x in row] for row in a]
    r = 0
    cols = len(a[0]) if a else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
    return r


def random_matrix(rng, rows, cols, p, density=0.5):
    a = rng.integers(0, p, size=(rows, cols))
    a[rng.random((rows, cols)) > density] = 0
    return a


matrices = st.tuples(
    st.sampled_from(PRIMES),
    st.integers(0, 40),
    st.integers(0, 140),
    st.integers(0, 2**32 - 1),
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_matches_oracle(case):
    p, rows, cols, seed = case
    a = random_matrix(np.random.default_rng(seed), rows, cols, p)
    m = FpMatrix.from_dense(a, p)
    assert rank(m) == oracle_rank(a.tolist(), p)
    assert rank(m) == rank(m.T)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_left_kernel(case):
    p, rows, cols, seed = case
    a = random_matrix(np.random.default_rng(seed), rows, cols, p)
    m = FpMatrix.from_dense(a, p)
    ker = left_kernel(m)
    assert ker.dim + rank(m) == rows
    assert (ker.basis @ m).is_zero()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_rank_transpose_large(p):
    rng = np.random.default_rng(p)
    a = random_matrix(rng, 200, 170, p, density=0.1)
    # force a dependency
    a[5] = (a[1] + a[2]) % p
    m = FpMatrix.from_dense(a, p)
    assert rank(m) == rank(m.T) == oracle_rank(a.tolist(), p)


def test_rank_examples():
    assert rank(FpMatrix.from_dense(np.ones((3, 1)), 2)) == 1
    assert rank(FpMatrix.identity(5, 2)) == 5
    assert left_kernel(FpMatrix.identity(4, 3)).dim == 0
    assert left_kernel(FpMatrix.from_dense(np.ones((6, 1)), 2)).dim == 5


def test_kernel_of_sum_map():
    ker = left_kernel(FpMatrix.from_dense(np.ones((3, 1)), 2))
    assert ker.dim == 2
    assert ker == row_space(FpMatrix.from_dense([[1, 1, 0], [0, 1, 1]], 2))


def test_row_space_examples():
    assert row_space(FpMatrix.zeros(3, 4, 2)).dim == 0
    assert row_space(FpMatrix.identity(4, 5)) == Subspace.full(4, 5)
    w = row_space(FpMatrix.from_dense([[1, 1, 1]], 2))
    assert w.dim == 1 and w.contains([1, 1, 1]) and not w.contains([1, 1, 0])


@pytest.mark.parametrize("p", PRIMES)
def test_row_space_is_canonical(p):
    rng = np.random.default_rng(10 + p)
    a = random_matrix(rng, 30, 90, p)
    w1 = row_space(FpMatrix.from_dense(a, p))
    w2 = row_space(FpMatrix.from_dense(a[rng.permutation(30)], p))
    assert w1 == w2
    piv = list(w1.pivot_cols)
    assert piv == sorted(piv)
    dense = w1.basis.to_dense()
    assert np.array_equal(dense[:, piv], np.eye(len(piv), dtype=np.int64))


@pytest.mark.parametrize("p", PRIMES)
def test_modular_law(p):
    rng = np.random.default_rng(20 + p)
    for _ in range(10):
        n = int(rng.integers(1, 70))
        u = row_space(FpMatrix.from_dense(random_matrix(rng, int(rng.integers(0, n + 1)), n, p), p))
        w = row_space(FpMatrix.from_dense(random_matrix(rng, int(rng.integers(0, n + 1)), n, p), p))
        s, i = subspace_sum(u, w), subspace_intersection(u, w)
        assert s.dim + i.dim == u.dim + w.dim
        assert subspace_leq(i, u) and subspace_leq(i, w)
        assert subspace_leq(u, s) and subspace_leq(w, s)


def test_subspace_trivia():
    w = row_space(FpMatrix.from_dense([[1, 0, 1, 0], [0, 1, 1, 1]], 2))
    zero = Subspace.zero(4, 2)
    assert w & zero == zero and w + zero == w and w & w == w
    assert w <= w and subspace_contains(w, [0, 0, 0, 0])
    with pytest.raises(ValueError):
        subspace_leq(w, Subspace.zero(5, 2))
    with pytest.raises(ValueError):
        subspace_leq(w, Subspace.zero(4, 3))


@pytest.mark.parametrize("p", PRIMES)
def test_quotient_coordinates(p):
    rng = np.random.default_rng(30 + p)
    n = 50
    w = row_space(FpMatrix.from_dense(random_matrix(rng, 20, n, p), p))
    vecs = random_matrix(rng, 15, n, p)
    vecs[:5] = (w.basis.to_dense()[:5] * 2) % p  # members of w
    q = quotient_coordinates(w, n, vecs)
    assert q.cols == n - w.dim
    for i in range(15):
        assert (not q.to_dense()[i].any()) == subspace_contains(w, vecs[i])
    # lifting then re-projecting is the identity
    assert quotient_coordinates(w, n, lift_quotient(w, q)) == q
    # zero subspace: coordinates are the vectors themselves
    assert quotient_coordinates(Subspace.zero(n, p), n, vecs) == FpMatrix.from_dense(vecs, p)


def test_coordinates_in():
    w = row_space(FpMatrix.from_dense([[1, 2, 0], [0, 1, 1]], 3))
    v = FpMatrix.from_dense([[2, 2, 1]], 3)  # 2*(1,2,0) + (0,1,1)
    c = coordinates_in(w, v)
    assert c @ w.basis == v
    with pytest.raises(ValueError):
        coordinates_in(w, FpMatrix.from_dense([[0, 0, 1]], 3))


def test_image_of():
    m = FpMatrix.from_dense([[1, 1], [1, 1], [0, 1]], 2)
    w = row_space(FpMatrix.from_dense([[1, 1, 0]], 2))
    assert image_of(w, m).dim == 0
    assert image_of(Subspace.full(3, 2), m).dim == 2


@pytest.mark.parametrize("p", PRIMES)
def test_matmul_and_arithmetic(p):
    rng = np.random.default_rng(40 + p)
    a = rng.integers(0, p, size=(13, 77))
    b = rng.integers(0, p, size=(77, 9))
    ma, mb = FpMatrix.from_dense(a, p), FpMatrix.from_dense(b, p)
    assert np.array_equal((ma @ mb).to_dense(), (a @ b) % p)
    assert np.array_equal((ma + ma).to_dense(), (2 * a) % p)
    assert (ma - ma).is_zero()
    assert np.array_equal(ma.T.to_dense(), a.T)
    assert np.array_equal(ma.scale(3).to_dense(), (3 * a) % p)


def test_empty_shapes():
    z = FpMatrix.zeros(0, 5, 2)
    assert rank(z) == 0
    assert left_kernel(FpMatrix.zeros(4, 0, 2)).dim == 4
    prod = FpMatrix.zeros(3, 0, 2) @ FpMatrix.zeros(0, 3, 2)
    assert prod.shape == (3, 3) and prod.is_zero()


@pytest.mark.parametrize("p", PRIMES)
def test_triplet_round_trip(p):
    rng = np.random.default_rng(50 + p)
    m = FpMatrix.from_dense(random_matrix(rng, 17, 131, p, density=0.2), p)
    buf = io.StringIO()
    write_matrix(m, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == f"17 131 {p}"
    assert text.splitlines()[-1] == "0 0 0"
    assert read_matrix(io.StringIO(text)) == m
    assert FpMatrix.from_text(m.to_text()) == m


def test_triplet_errors():
    with pytest.raises(ValueError):
        read_matrix(io.StringIO(""))
    with pytest.raises(ValueError):
        read_matrix(io.StringIO("2 2 2\n1 1 1\n"))
    with pytest.raises(ValueError):
        read_matrix(io.StringIO("2 2 2\n3 1 1\n0 0 0\n"))
    with pytest.raises(ValueError):
        read_matrix(io.StringIO("2 2 3\n1 1 3\n0 0 0\n"))


@pytest.mark.parametrize("p", PRIMES)
def test_span_builder_matches_row_space(p):
    rng = np.random.default_rng(60 + p)
    n = 100
    start = row_space(FpMatrix.from_dense(random_matrix(rng, 10, n, p), p))
    builder = SpanBuilder(start)
    added = [start.basis.to_dense()]
    for _ in range(40):
        v = random_matrix(rng, 1, n, p, density=0.05)[0]
        grew = builder.add(v)
        assert grew == (not subspace_contains(row_space(FpMatrix.from_dense(np.vstack(added), p)), v))
        added.append(v[None, :])
    expect = row_space(FpMatrix.from_dense(np.vstack(added), p))
    assert builder.subspace() == expect
    assert builder.dim == expect.dim


def test_entries_are_reduced():
    m = FpMatrix.from_dense([[5, -1], [7, 3]], 3)
    assert m.to_dense().tolist() == [[2, 2], [1, 0]]
