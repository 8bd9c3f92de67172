import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from balcover import exactfield as ef

PRIMES = [2, 3, 5, 7, 32003, 2147483647]


def mats(p, max_side=6):
    shape = st.tuples(st.integers(0, max_side), st.integers(0, max_side))
    return shape.flatmap(lambda s: arrays(np.int64, s, elements=st.integers(0, p - 1)))


def test_solve_identity(backend):
    sol = ef.solve_linear(ef.identity(2), [3, 5], 7)
    assert sol.x.tolist() == [3, 5]
    assert sol.kernel.shape == (2, 0)


def test_solve_rank_one(backend):
    sol = ef.solve_linear(np.array([[1, 1]]), [0], 5)
    assert sol.x.tolist() == [0, 0]
    assert sol.kernel.shape == (2, 1)
    v = sol.kernel[:, 0]
    # spans the line through (1, 4)
    assert ef.rank(np.column_stack([v, [1, 4]]), 5) == 1


def test_inconsistent(backend):
    assert ef.solve_linear(np.array([[0]]), [1], 7) is None


def test_dimension_mismatch_is_distinct(backend):
    with pytest.raises(ef.DimensionError):
        ef.solve_linear(ef.identity(2), [1, 2, 3], 7)


def test_rank_zero_and_kernel_of_identity(backend):
    assert ef.rank(ef.zeros(3, 3), 7) == 0
    assert ef.kernel_basis(ef.identity(4), 7).shape == (4, 0)


def test_invert_example(backend):
    assert ef.invert(np.array([[1, 1], [0, 1]]), 7).tolist() == [[1, 6], [0, 1]]


def test_invert_singular(backend):
    with pytest.raises(ef.SingularMatrixError):
        ef.invert(np.array([[1, 2], [2, 4]]), 7)
    with pytest.raises(ef.DimensionError):
        ef.invert(ef.zeros(2, 3), 7)


def test_zero_sized(backend):
    assert ef.matmul(ef.zeros(3, 0), ef.zeros(0, 4), 7).tolist() == ef.zeros(3, 4).tolist()
    assert ef.invert(ef.zeros(0, 0), 7).shape == (0, 0)
    assert ef.rank(ef.zeros(0, 5), 7) == 0
    assert ef.kernel_basis(ef.zeros(0, 3), 7).shape == (3, 3)


def test_large_prime_products_do_not_overflow(backend):
    p = 2147483647
    A = np.full((5, 5), p - 1, dtype=np.int64)
    assert (ef.matmul(A, A, p) == 5).all()


def test_prime_checks():
    assert ef.check_prime(2) == 2
    for bad in (1, 4, 32004, 2**31 + 11):
        with pytest.raises(ValueError):
            ef.check_prime(bad)
    assert ef.inv_mod(3, 7) == 5


@pytest.mark.parametrize("p", PRIMES)
def test_backends_agree(p):
    if not ef.compiled_available():
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(p % 1000)
    for _ in range(20):
        A = rng.integers(0, p, size=(int(rng.integers(0, 9)), int(rng.integers(0, 9))), dtype=np.int64)
        B = rng.integers(0, p, size=(A.shape[1], int(rng.integers(0, 9))), dtype=np.int64)
        out = {}
        for name in ("python", "compiled"):
            ef.use_backend(name)
            out[name] = (ef.rref(A, p)[0].tolist(), ef.matmul(A, B, p).tolist())
        ef.use_backend("compiled")
        assert out["python"] == out["compiled"]


@given(st.sampled_from(PRIMES).flatmap(lambda p: st.tuples(st.just(p), mats(p))), st.data())
def test_solve_property(pA, data):
    p, A = pA
    b = data.draw(arrays(np.int64, A.shape[0], elements=st.integers(0, p - 1)))
    sol = ef.solve_linear(A, b, p)
    if sol is not None:
        assert (ef.matmul(A, sol.x.reshape(-1, 1), p)[:, 0] == b % p).all()
    else:
        # inconsistent: b is outside the column space
        assert ef.rank(np.column_stack([A, b]) if A.size else b.reshape(-1, 1), p) > ef.rank(A, p)
    K = ef.kernel_basis(A, p)
    assert not ef.matmul(A, K, p).any()
    assert K.shape[1] + ef.rank(A, p) == A.shape[1]


@given(st.sampled_from(PRIMES).flatmap(lambda p: st.tuples(st.just(p), mats(p))))
def test_rank_transpose(pA):
    p, A = pA
    assert ef.rank(A, p) == ef.rank(np.ascontiguousarray(A.T), p)


@given(st.sampled_from(PRIMES).flatmap(
    lambda p: st.tuples(st.just(p), st.integers(0, 6).flatmap(
        lambda n: arrays(np.int64, (n, n), elements=st.integers(0, p - 1))))))
def test_invert_property(pA):
    p, A = pA
    try:
        B = ef.invert(A, p)
    except ef.SingularMatrixError:
        assert ef.rank(A, p) < A.shape[0]
        return
    n = A.shape[0]
    assert (ef.matmul(A, B, p) == ef.identity(n)).all()
    assert (ef.matmul(B, A, p) == ef.identity(n)).all()


@given(st.sampled_from([2, 3, 32003]).flatmap(lambda p: st.tuples(st.just(p), mats(p))))
def test_rref_is_reduced(pA):
    p, A = pA
    R, piv = ef.rref(A, p)
    assert len(piv) == ef.rank(A, p)
    for r, c in enumerate(piv):
        assert R[r, c] == 1
        assert (R[:, c] == np.eye(R.shape[0], dtype=np.int64)[:, r]).all()
