import numpy as np
import pytest

from balcover import acceptance
from balcover import cleaving as cl
from balcover import exactfield as ef
from balcover import galois as gl
from balcover import krullschmidt as ks
from balcover import repmod as rm
from balcover import transport as tr
from balcover.fileio import Workspace
from balcover.functorcore import LinearFunctor, check_balanced, check_covering, covering_order
from conftest import terms

WS = Workspace()
COVERINGS = acceptance.coverings(WS)


def test_identity_covering():
    A = WS.category("ex_c.A.json")
    cert = check_covering(LinearFunctor.identity(A))
    t = cl.retraction_table(cert)
    assert all(np.array_equal(M, ef.identity(M.shape[0])) for M in t.maps.values())
    X = WS.representation("ex_c.Y.json")
    e = cl.epsilon(cert, X)
    assert e.morphism.is_identity()


def test_ex_c_retraction_values():
    F = WS.functor("ex_c.functor.json")
    t = cl.retraction_table(check_covering(F))
    A, B = F.source, F.target
    assert terms(A, t.apply("a2", "b2", B.arrow_morphism("beta"))) == {}
    assert terms(A, t.apply("a2", "b2", B.arrow_morphism("alpha"))) == {"alpha2": 1}
    assert t.left_inverse


@pytest.mark.parametrize("name", sorted(COVERINGS))
def test_left_inverse_and_squares(name):
    cert = check_covering(COVERINGS[name])
    t = cl.retraction_table(cert)
    assert t.left_inverse
    sq = cl.check_naturality_squares(t)
    assert sq.square1
    assert sq.square2 == check_balanced(cert).balanced


def test_ex_b_squares_and_quotient_squares():
    for name in ("ex_b", "ex_a_quotient"):
        sq = cl.check_naturality_squares(cl.retraction_table(check_covering(COVERINGS[name])))
        assert sq.square1 and sq.square2


def test_ex_c_square_two_witness():
    sq = cl.check_naturality_squares(cl.retraction_table(check_covering(COVERINGS["ex_c"])))
    assert not sq.square2
    hits = [w for w in sq.failures2 if w["to_pair"] == ["a2", "b2"]]
    assert hits
    assert hits[0]["E_on_basis"] == {"alpha": {"alpha2": 1}, "beta": {}}


def test_ex_c_epsilon_components():
    F = WS.functor("ex_c.functor.json")
    X = WS.representation("ex_c.X.json")
    e = cl.epsilon(check_covering(F), X)
    m = e.morphism.maps
    assert m["a2"].tolist() == [[1]] and m["b2"].tolist() == [[1]]
    assert m["a1"].shape == (1, 0) and m["b1"].shape == (1, 0)


def test_ex_b_epsilon_on_projectives():
    F = WS.functor("ex_b.functor.json")
    cert = check_covering(F)
    for a in F.source.objects:
        P = rm.projective_rep(F.source, a)
        e = cl.epsilon(cert, P)
        assert all(ef.rank(M, P.p) == M.shape[1] for M in e.morphism.maps.values())
        assert ks.are_isomorphic(e.pushed.rep, rm.projective_rep(F.target, F(a))).isomorphic


def _check_split(cert, X):
    r = cl.cleaving_test(cert, X)
    assert r.splits, X.dims
    assert r.epsilon.morphism.then(r.retraction).is_identity()
    assert r.idempotent
    assert r.summand.summand
    return r


def test_ex_b_cleaves():
    F = WS.functor("ex_b.functor.json")
    cert = check_covering(F)
    n = covering_order(cert)
    samples = [rm.simple_rep(F.source, a) for a in F.source.objects]
    rng = np.random.default_rng(0)
    while len(samples) < 7:
        X = rm.random_representation(F.source, rng, 4)
        if 0 < X.total_dim <= 4:
            samples.append(X)
    for X in samples:
        r = _check_split(cert, X)
        assert r.epsilon.pulled.total_dim == n * X.total_dim


def test_ex_c_does_not_cleave():
    F = WS.functor("ex_c.functor.json")
    r = cl.cleaving_test(check_covering(F), WS.representation("ex_c.X.json"))
    assert not r.splits and r.retraction is None
    assert not r.summand.summand
    assert r.to_json()["verdict"] == "does not split"


def test_quotient_cleaves():
    cert = check_covering(COVERINGS["ex_a_quotient"])
    rng = np.random.default_rng(5)
    for _ in range(4):
        _check_split(cert, rm.random_representation(cert.source, rng, 5))


@pytest.mark.parametrize("name", sorted(COVERINGS))
def test_epsilon_is_morphism_everywhere(name):
    cert = check_covering(COVERINGS[name])
    rng = np.random.default_rng(11)
    for _ in range(3):
        X = rm.random_representation(cert.source, rng, 4)
        e = cl.epsilon(cert, X)
        assert e.morphism.is_morphism()
        if check_balanced(cert).balanced:
            _check_split(cert, X)
