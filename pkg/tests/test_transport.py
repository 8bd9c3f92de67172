import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from balcover import acceptance
from balcover import krullschmidt as ks
from balcover import repmod as rm
from balcover import transport as tr
from balcover.fileio import Workspace
from balcover.functorcore import LinearFunctor, check_balanced, check_covering

WS = Workspace()
COVERINGS = acceptance.coverings(WS)


def _ex_c():
    F = WS.functor("ex_c.functor.json")
    return F, check_covering(F), WS.representation("ex_c.X.json")


def test_ex_c_push_down():
    F, cert, X = _ex_c()
    L = tr.push_down(cert, X).rep
    p = L.p
    assert L.dims == {"a": 1, "b": 1}
    assert L.mats["alpha"].tolist() == [[1]]
    assert L.mats["beta"].tolist() == [[p - 1]]


def test_ex_c_push_down_right():
    F, cert, X = _ex_c()
    R = tr.push_down_right(cert, X).rep
    assert R.mats["alpha"].tolist() == [[1]]
    assert R.mats["beta"].tolist() == [[0]]
    assert not R.same_as(tr.push_down(cert, X).rep)


def test_ex_c_pull_up_of_push_down():
    F, cert, X = _ex_c()
    Y = tr.pull_up(F, tr.push_down(cert, X).rep)
    p = Y.p
    assert Y.dims == {"a2": 1, "a1": 1, "b1": 1, "b2": 1}
    assert {k: v.tolist() for k, v in Y.mats.items()} == {
        "alpha1": [[1]], "alpha2": [[1]], "beta1": [[p - 1]], "beta2": [[0]]}


def test_pull_up_simple():
    F, _, _ = _ex_c()
    Y = tr.pull_up(F, rm.simple_rep(F.target, "b"))
    assert Y.dims == {"a2": 0, "a1": 0, "b1": 1, "b2": 1}
    assert all(not M.any() for M in Y.mats.values())


def test_pull_up_identity():
    X = WS.representation("kronecker_plus.json")
    assert tr.pull_up(LinearFunctor.identity(X.category), X).same_as(X)


def test_push_down_zero():
    F, cert, _ = _ex_c()
    assert tr.push_down(cert, rm.zero_rep(F.source)).rep.total_dim == 0


def test_balanced_push_downs_are_literally_equal():
    F = WS.functor("ex_b.functor.json")
    cert = check_covering(F)
    rng = np.random.default_rng(0)
    for _ in range(10):
        X = rm.random_representation(F.source, rng)
        assert tr.push_down(cert, X).rep.same_as(tr.push_down_right(cert, X).rep)


@pytest.mark.parametrize("name", sorted(COVERINGS))
def test_projectives_and_injectives(name):
    F = COVERINGS[name]
    cert = check_covering(F)
    A, B = F.source, F.target
    for a in A.objects:
        assert ks.are_isomorphic(tr.push_down(cert, rm.projective_rep(A, a)).rep, rm.projective_rep(B, F(a))).isomorphic
        assert ks.are_isomorphic(tr.push_down_right(cert, rm.injective_rep(A, a)).rep,
                                 rm.injective_rep(B, F(a))).isomorphic


@pytest.mark.parametrize("name", sorted(COVERINGS))
def test_functoriality(name):
    out = acceptance.transport_functoriality(COVERINGS[name], np.random.default_rng(7), pairs=5)
    assert out == {"push_down": True, "pull_up": True, "projectives": True, "injectives": True}


@settings(max_examples=20)
@given(st.sampled_from(sorted(COVERINGS)), st.integers(0, 2**32 - 1))
def test_bookkeeping_and_sums(name, seed):
    F = COVERINGS[name]
    cert = check_covering(F)
    rng = np.random.default_rng(seed)
    X, Y = rm.random_representation(F.source, rng, 4), rm.random_representation(F.source, rng, 4)
    res = tr.push_down(cert, X)
    for i, fib in cert.fibers.items():
        assert res.rep.dims[i] == sum(X.dims[a] for a in fib)
    assert res.rep.total_dim == X.total_dim
    lhs = tr.push_down(cert, rm.direct_sum(X, Y)).rep
    rhs = rm.direct_sum(res.rep, tr.push_down(cert, Y).rep)
    assert ks.are_isomorphic(lhs, rhs, seed).isomorphic
    if check_balanced(cert).balanced:
        assert res.rep.same_as(tr.push_down_right(cert, X).rep)


def test_push_down_of_mono_is_mono():
    F = WS.functor("ex_b.functor.json")
    cert = check_covering(F)
    rng = np.random.default_rng(3)
    X, W = rm.random_representation(F.source, rng, 3), rm.random_representation(F.source, rng, 3)
    S = rm.direct_sum(X, W)
    inc = rm.sum_injections([X, W], S)[0]
    v = tr.push_down_morphism(cert, inc)
    from balcover import exactfield as ef
    assert all(ef.rank(M, S.p) == M.shape[1] for M in v.maps.values())
    ident = tr.push_down_morphism(cert, rm.identity_morphism(X))
    assert ident.is_identity()
