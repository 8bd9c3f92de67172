import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from balcover import krullschmidt as ks
from balcover import repmod as rm
from balcover.fileio import Workspace
from balcover.quivercat import BoundCategory
from balcover.repmod import Representation, RepresentationError

WS = Workspace()
CATS = ["ex_a.A.json", "ex_b.A.json", "ex_b.B.json", "ex_c.A.json", "ex_c.B.json", "square.json", "octagon.json"]


def loop(n):
    return BoundCategory.from_data(["a"], [("rho", "a", "a")], [], n)


def test_identity_evaluates_to_identity(ws):
    X = ws.representation("kronecker_plus.json")
    assert (X.evaluate(X.category.identity("a")) == np.eye(1, dtype=np.int64)).all()


def test_ex_c_X_on_beta2(ws):
    X = ws.representation("ex_c.X.json")
    M = X.evaluate(X.category.arrow_morphism("beta2"))
    assert M.shape == (0, 1)
    assert X.evaluate(X.category.arrow_morphism("alpha2")).tolist() == [[1]]


def test_loop_jordan_square():
    C = loop(3)
    J = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    X = Representation(C, {"a": 3}, {"rho": J})
    assert X.evaluate(C.path_morphism(["rho", "rho"])).tolist() == (J @ J).tolist()


def test_relations_checked_at_load():
    C = BoundCategory.from_data(["a"], [("rho", "a", "a")], [], 2)
    with pytest.raises(RepresentationError):
        Representation(C, {"a": 2}, {"rho": [[0, 1], [1, 0]]})


def test_hom_simple_and_kronecker(ws):
    S = rm.simple_rep(ws.category("ex_c.B.json"), "a")
    assert rm.hom_dim(S, S) == 1
    X, Y = ws.representation("kronecker_plus.json"), ws.representation("kronecker_minus.json")
    assert rm.hom_dim(X, Y) == 0 and rm.hom_dim(Y, X) == 0


def test_projective_dims(ws):
    A2 = ws.category("a2.json")
    assert rm.projective_rep(A2, "a").dims == {"a": 1, "b": 1}
    assert rm.projective_rep(A2, "b").dims == {"a": 0, "b": 1}
    assert rm.projective_rep(ws.category("ex_c.B.json"), "a").dims == {"a": 1, "b": 2}
    P = rm.projective_rep(loop(2), "a")
    assert P.dims == {"a": 2}
    assert P.mats["rho"].tolist() == [[0, 0], [1, 0]]


def test_injective_dims(ws):
    A2 = ws.category("a2.json")
    assert rm.injective_rep(A2, "a").dims == {"a": 1, "b": 0}
    assert rm.injective_rep(ws.category("ex_c.B.json"), "b").dims == {"a": 2, "b": 1}


def test_radical_and_top(ws):
    X = ws.representation("ex_c.X.json")
    R, _ = rm.radical(X)
    T, _ = rm.top(X)
    assert R.dims == {"a2": 0, "a1": 0, "b1": 0, "b2": 1}
    assert T.dims == {"a2": 1, "a1": 0, "b1": 0, "b2": 0}
    B = ws.category("ex_c.B.json")
    T, _ = rm.top(rm.projective_rep(B, "a"))
    assert ks.are_isomorphic(T, rm.simple_rep(B, "a")).isomorphic


def test_direct_sum_dims(ws):
    X, Y = ws.representation("ex_c.X.json"), ws.representation("ex_c.Y.json")
    S = rm.direct_sum(X, Y)
    assert S.dims == {a: X.dims[a] + Y.dims[a] for a in X.dims}


def test_random_rep_is_valid_and_nontrivial():
    rng = np.random.default_rng(1)
    sizes = []
    for name in CATS:
        A = WS.category(name)
        for _ in range(4):
            X = rm.random_representation(A, rng)
            X.validate()
            sizes.append(X.total_dim)
    assert max(sizes) > 1


@settings(max_examples=30)
@given(st.sampled_from(CATS), st.integers(0, 2**32 - 1), st.data())
def test_evaluate_multiplicative(name, seed, data):
    A = WS.category(name)
    X = rm.random_representation(A, np.random.default_rng(seed))
    a, b, c = (data.draw(st.sampled_from(A.objects)) for _ in range(3))
    co = lambda x, y: data.draw(st.lists(st.integers(0, A.p - 1), min_size=A.hom_dim(x, y), max_size=A.hom_dim(x, y)))
    f, g = A.morphism(a, b, co(a, b)), A.morphism(b, c, co(b, c))
    lhs = X.evaluate(A.compose(g, f))
    rhs = (X.evaluate(g) @ X.evaluate(f)) % A.p if X.dims[b] else np.zeros_like(lhs)
    assert (lhs == rhs).all()


@settings(max_examples=25)
@given(st.sampled_from(CATS), st.integers(0, 2**32 - 1))
def test_hom_space_intertwines_and_yoneda(name, seed):
    A = WS.category(name)
    rng = np.random.default_rng(seed)
    X, Y = rm.random_representation(A, rng, 4), rm.random_representation(A, rng, 4)
    for u in rm.hom_space(X, Y):
        assert u.is_morphism()
    a = A.objects[seed % len(A.objects)]
    assert rm.hom_dim(rm.projective_rep(A, a), Y) == Y.dims[a]


@settings(max_examples=15)
@given(st.sampled_from(CATS), st.integers(0, 2**32 - 1))
def test_direct_sum_commutative_associative(name, seed):
    A = WS.category(name)
    rng = np.random.default_rng(seed)
    X, Y, Z = (rm.random_representation(A, rng, 3) for _ in range(3))
    assert ks.are_isomorphic(rm.direct_sum(X, Y), rm.direct_sum(Y, X)).isomorphic
    assert ks.are_isomorphic(rm.direct_sum(rm.direct_sum(X, Y), Z), rm.direct_sum(X, rm.direct_sum(Y, Z))).isomorphic


def test_file_round_trip(ws):
    from balcover.fileio import representation_from_json
    X = ws.representation("ex_c.X.json")
    Y = representation_from_json(X.to_json(), X.category)
    assert X.same_as(Y)
