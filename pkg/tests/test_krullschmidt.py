import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from balcover import exactfield as ef
from balcover import krullschmidt as ks
from balcover import repmod as rm
from balcover import cleaving as cl
from balcover.fileio import Workspace
from balcover.functorcore import check_covering
from balcover.krullschmidt import MatrixAlgebra

WS = Workspace()


def generated_algebra(gens, p):
    """Span closure of ``1`` and ``gens`` under multiplication."""
    n = gens[0].shape[0]
    basis = [ef.identity(n)]
    flat = lambda: np.stack([b.reshape(-1) for b in basis], axis=1)
    frontier = [g % p for g in gens]
    while frontier:
        new = []
        for x in frontier:
            if ef.rank(np.column_stack([flat(), x.reshape(-1)]), p) > len(basis):
                basis.append(x)
                new.append(x)
        frontier = [ef.matmul(a, b, p) for a in new for b in basis] + [ef.matmul(b, a, p) for a in new for b in basis]
    return MatrixAlgebra(basis, p, n)


def _power(M, k, p):
    R = ef.identity(M.shape[0])
    for _ in range(k):
        R = ef.matmul(R, M, p)
    return R


def brute_radical(alg):
    """All ``x`` with ``x*y`` nilpotent for every ``y`` of the algebra."""
    p, d = alg.p, alg.dim
    elems = [alg.element(c) for c in itertools.product(range(p), repeat=d)]
    return {tuple(c) for c, x in zip(itertools.product(range(p), repeat=d), elems)
            if all(not _power(ef.matmul(x, y, p), alg.size, p).any() for y in elems)}


def span_set(rows, p, d):
    if not len(rows):
        return {(0,) * d}
    out = set()
    for c in itertools.product(range(p), repeat=len(rows)):
        out.add(tuple(int(v) for v in (np.asarray(c) @ rows) % p))
    return out


def test_upper_triangular_radical():
    E = lambda i, j: np.eye(2, dtype=np.int64)[:, [i]] @ np.eye(2, dtype=np.int64)[[j], :]
    alg = MatrixAlgebra([E(0, 0), E(1, 1), E(0, 1)], 7, 2)
    R = ks.algebra_radical(alg)
    assert R.shape[0] == 1
    assert np.array_equal(alg.element(R[0]) % 7 != 0, E(0, 1) != 0)


def test_upper_triangular_3x3_brute_force_char_two():
    basis = [np.eye(3, dtype=np.int64)[:, [i]] @ np.eye(3, dtype=np.int64)[[j], :] for i in range(3) for j in range(i, 3)]
    alg = MatrixAlgebra(basis, 2, 3)
    rad = brute_radical(alg)
    assert len(rad) == 8
    assert span_set(ks.algebra_radical(alg), 2, alg.dim) == rad


@settings(max_examples=25)
@given(st.sampled_from([2, 3]), st.integers(0, 2**32 - 1))
def test_radical_matches_brute_force(p, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    gens = []
    for _ in range(int(rng.integers(1, 3))):
        M = rng.integers(0, p, size=(n, n), dtype=np.int64)
        if rng.random() < 0.6:
            M = np.triu(M)  # keeps the algebra small
        gens.append(M)
    alg = generated_algebra(gens, p)
    if p ** alg.dim > 729:
        return
    R = ks.algebra_radical(alg)
    assert span_set(R, p, alg.dim) == brute_radical(alg)


@pytest.mark.parametrize("p", [2, 3])
def test_end_radical_brute_force(p):
    ws = Workspace(p)
    rng = np.random.default_rng(p)
    done = 0
    for name in ["ex_c.A.json", "ex_c.B.json", "square.json", "ex_b.B.json"]:
        A = ws.category(name)
        for _ in range(6):
            X = rm.random_representation(A, rng, 4)
            E = ks.endomorphism_algebra(X)
            if not E.dim or p ** E.dim > 729:
                continue
            C = E.table()
            alg = ks.regular_algebra(C, p)
            assert span_set(ks.algebra_radical(alg), p, alg.dim) == brute_radical(alg)
            done += 1
    assert done >= 5


def test_simple_end_and_double():
    B = WS.category("ex_c.B.json")
    S = rm.simple_rep(B, "a")
    E = ks.endomorphism_algebra(S)
    assert E.dim == 1
    alg = ks.regular_algebra(E.table(), S.p)
    assert ks.algebra_radical(alg).shape[0] == 0
    E2 = ks.endomorphism_algebra(rm.direct_sum(S, S))
    assert E2.dim == 4
    assert not E2.algebra.is_commutative()


def test_ex_c_pulled_is_indecomposable_local():
    F = WS.functor("ex_c.functor.json")
    X = WS.representation("ex_c.X.json")
    Y = cl.epsilon(check_covering(F), X).pulled
    D = ks.decompose(Y)
    assert len(D.components) == 1
    cert = D.components[0].certificate
    assert cert.top_dim == 1 and cert.kind == "local"
    assert cert.radical_dim == cert.end_dim - 1
    assert dict(D.components[0].rep.dims) == {"a2": 1, "a1": 1, "b1": 1, "b2": 1}


def test_simples_multiset():
    B = WS.category("ex_c.B.json")
    S, T = rm.simple_rep(B, "a"), rm.simple_rep(B, "b")
    D = ks.decompose(rm.direct_sum(S, S, T))
    counts = sorted((tuple(Y.dims.values()), m) for Y, m in D.classes)
    assert counts == [((0, 1), 1), ((1, 0), 2)]
    assert D.verify()


def test_kronecker():
    X, Y = WS.representation("kronecker_plus.json"), WS.representation("kronecker_minus.json")
    assert len(ks.decompose(Y).components) == 1
    assert not ks.are_isomorphic(X, Y).isomorphic
    assert ks.are_isomorphic(X, X).isomorphic
    assert ks.are_isomorphic(rm.direct_sum(X, Y), rm.direct_sum(Y, X)).isomorphic


def test_kronecker_char_two_collapse():
    ws = Workspace(2)
    assert ks.are_isomorphic(ws.representation("kronecker_plus.json"), ws.representation("kronecker_minus.json")).isomorphic


def test_field_extension_top_is_indecomposable():
    # one loop acting by a companion matrix of x^2 + 1 over F_3: End is F_9
    from balcover.quivercat import BoundCategory
    C = BoundCategory.from_data(["a"], [("rho", "a", "a")], [], 5, 3)
    X = rm.Representation(C, {"a": 2}, {"rho": [[0, 2], [1, 0]]}, check=False)
    D = ks.decompose(X)
    assert len(D.components) == 1
    assert D.components[0].certificate.kind == "field"
    assert D.components[0].certificate.top_dim == 2


def test_summand_examples():
    F = WS.functor("ex_c.functor.json")
    X = WS.representation("ex_c.X.json")
    Y = cl.epsilon(check_covering(F), X).pulled
    r = ks.is_direct_summand(X, Y)
    assert not r.summand and not r.method1 and not r.method2
    Z = WS.representation("ex_c.Y.json")
    r = ks.is_direct_summand(X, rm.direct_sum(Z, X))
    assert r.summand and r.split is not None
    i, q = r.split
    assert i.then(q).is_identity()


def test_solve_retraction_inclusion():
    X, Y = WS.representation("ex_c.X.json"), WS.representation("ex_c.Y.json")
    S = rm.direct_sum(X, Y)
    inc = rm.sum_injections([X, Y], S)[0]
    r = ks.solve_retraction(inc)
    assert r is not None and inc.then(r).is_identity()


def test_ex_b_summands():
    F = WS.functor("ex_b.functor.json")
    cert = check_covering(F)
    rng = np.random.default_rng(0)
    for _ in range(5):
        X = rm.random_representation(F.source, rng, 4)
        if X.total_dim > 4:
            continue
        assert ks.is_direct_summand(X, cl.epsilon(cert, X).pulled).summand


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_decomposition_invariants(seed):
    rng = np.random.default_rng(seed)
    A = WS.category(["ex_c.A.json", "ex_c.B.json", "ex_b.B.json", "square.json"][seed % 4])
    X = rm.random_representation(A, rng, 5)
    D0, D1 = ks.decompose(X, seed), ks.decompose(X, seed + 1)
    assert D0.verify()
    assert ks.same_multiset(D0, D1)
    total = {a: 0 for a in A.objects}
    for c in D0.components:
        for a in A.objects:
            total[a] += c.rep.dims[a]
    assert total == X.dims


def test_idempotent_lifting_exact():
    # upper triangular 3x3 over F_5 with a noisy idempotent
    p = 5
    basis = [np.eye(3, dtype=np.int64)[:, [i]] @ np.eye(3, dtype=np.int64)[[j], :] for i in range(3) for j in range(i, 3)]
    alg = MatrixAlgebra(basis, p, 3)
    e = np.diag([1, 0, 0]).astype(np.int64)
    e[0, 1], e[1, 2] = 3, 4
    f = ks.lift_idempotent(alg, e)
    assert np.array_equal(alg.mul(f, f), f)
    assert 0 < ef.rank(f, p) < 3
