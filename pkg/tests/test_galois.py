import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from balcover import galois as gl
from balcover.fileio import Workspace
from balcover.functorcore import LinearFunctor, check_balanced, check_covering, check_functor, covering_order, induced_functor
from balcover.quivercat import check_schurian

WS = Workspace()


def _induced(name):
    q, A, B = WS.quiver_map(name)
    return induced_functor(q, A, B)[0]


def test_group_validation():
    with pytest.raises(gl.GroupError):
        gl.FiniteGroup(["e", "g"], [["e", "g"], ["g", "g"]])
    C3 = gl.FiniteGroup.cyclic(3)
    g = C3.elements[1]
    assert C3.mul(g, C3.inv(g)) == C3.identity


def test_ex_a_action_free_and_quotient():
    action = WS.group_action("ex_a.group.json")
    assert gl.check_action(action).ok
    quot = gl.galois_quotient(action)
    assert len(quot.category.objects) == 3
    assert covering_order(quot.certificate) == 2
    assert quot.balanced
    iso = gl.factor_through_quotient(quot, WS.functor("ex_a.functor.json"))
    assert iso.isomorphic
    B = WS.category("ex_a.B.json")
    assert sorted(quot.category.hom_dims().values()) == sorted(B.hom_dims().values())


def test_trivial_group():
    A = WS.category("ex_c.B.json")
    act = gl.GroupAction(A, gl.FiniteGroup.trivial(), {"e": LinearFunctor.identity(A)})
    assert gl.check_action(act).ok
    quot = gl.galois_quotient(act)
    assert gl.factor_through_quotient(quot, LinearFunctor.identity(A)).isomorphic


def test_identity_action_not_free():
    A = WS.category("ex_c.B.json")
    I = LinearFunctor.identity(A)
    act = gl.GroupAction(A, gl.FiniteGroup.cyclic(2, ["e", "g"]), {"e": I, "g": I})
    r = gl.check_action(act)
    assert not r.free and not r.ok
    assert r.witness["object"] in A.objects


def test_double_cover_quotient_is_a2():
    quot = gl.galois_quotient(WS.group_action("a2_double.group.json"))
    assert gl.factor_through_quotient(quot, _induced("a2_double.quivermap.json")).isomorphic


@pytest.mark.parametrize("name", ["ex_a.group.json", "a2_double.group.json", "a2_crossed.group.json", "octagon.group.json"])
def test_quotient_projection_is_balanced_covering(name):
    action = WS.group_action(name)
    quot = gl.galois_quotient(action)
    cert = check_covering(quot.projection)
    assert check_balanced(cert).balanced
    assert quot.category.check_associativity()
    assert quot.category.check_identity_laws()
    assert check_functor(quot.projection).ok
    assert len(action.category.objects) == len(action.group.elements) * len(quot.category.objects)


@settings(max_examples=30)
@given(st.sampled_from(["ex_a.group.json", "octagon.group.json"]), st.data())
def test_projection_respects_composition(name, data):
    quot = gl.galois_quotient(WS.group_action(name))
    P, A = quot.projection, quot.action.category
    a, b, c = (data.draw(st.sampled_from(A.objects)) for _ in range(3))
    co = lambda x, y: data.draw(st.lists(st.integers(0, A.p - 1), min_size=A.hom_dim(x, y), max_size=A.hom_dim(x, y)))
    f, g = A.morphism(a, b, co(a, b)), A.morphism(b, c, co(b, c))
    Q = quot.category
    assert P.apply(A.compose(g, f)) == Q.compose(P.apply(g), P.apply(f))


def test_graded_components():
    g = WS.grading("ex_c.grading_B.json")
    assert gl.graded_component(g, "a", "b", "e").shape == (2, 1)
    assert gl.graded_component(g, "a", "b", "g").shape == (2, 1)
    A = g.category
    triv = gl.Grading(A, g.group, {n: "e" for n in g.degrees})
    assert gl.graded_component(triv, "a", "b", "e").shape == (2, 2)


def test_inhomogeneous_relation_rejected():
    A = WS.category("ex_a.A.json")
    G = gl.FiniteGroup.cyclic(2, ["e", "g"])
    degrees = {a.name: "e" for a in A.quiver.arrows}
    degrees["rho0"] = "g"
    r = gl.check_grading(gl.Grading(A, G, degrees))
    assert not r.ok and "rho0" in str(r.witness)


def test_kronecker_smash():
    S = gl.smash_product(WS.grading("ex_c.grading_B.json"))
    assert len(S.category.objects) == 4
    assert check_schurian(S.category)
    assert gl.check_action(S.action).ok
    assert gl.canonical_quotient_iso(S).isomorphic
    assert S.connected
    # hom ((a,g),(b,h)) has the dimension of B^{g^-1 h}(a,b)
    for g in ("e", "g"):
        for h in ("e", "g"):
            assert S.category.hom_dim(gl.smash_vertex("a", g), gl.smash_vertex("b", h)) == 1


def test_trivial_grading_smash():
    B = WS.category("ex_a.B.json")
    S = gl.smash_product(gl.Grading(B, gl.FiniteGroup.trivial(), {a.name: "e" for a in B.quiver.arrows}))
    assert sorted(S.category.hom_dims().values()) == sorted(B.hom_dims().values())
    assert gl.canonical_quotient_iso(S).isomorphic


def test_smash_functor_balanced_and_not():
    r = gl.smash_functor(WS.functor("ex_b.functor.json"), WS.grading("ex_b.grading_A.json"), WS.grading("ex_b.grading_B.json"))
    assert r.square_commutes and r.covering and r.balanced_F and r.balanced_smash
    r = gl.smash_functor(WS.functor("ex_c.functor.json"), WS.grading("ex_c.grading_A_all_g.json"),
                         WS.grading("ex_c.grading_B_all_g.json"))
    assert r.square_commutes and r.covering and not r.balanced_F and not r.balanced_smash


def test_smash_functor_identity():
    g = WS.grading("ex_c.grading_B.json")
    r = gl.smash_functor(LinearFunctor.identity(g.category), g, g)
    assert all(k == v for k, v in r.functor.object_map.items())
    assert gl.is_isomorphism(r.functor)


def test_incompatible_grading_rejected():
    with pytest.raises(gl.GroupError) as exc:
        gl.smash_functor(WS.functor("ex_c.functor.json"), WS.grading("ex_c.grading_A_mixed.json"),
                         WS.grading("ex_c.grading_B.json"))
    assert exc.value.witness["arrow"] == "beta2"


def test_induce_grading():
    F = _induced("a2_double.quivermap.json")
    gA = gl.induce_grading_schurian(F, WS.grading("a2.grading.json"))
    assert gA.degrees == {"x1": "g", "x2": "g"}
    F = WS.functor("octagon.functor.json")
    gA = gl.induce_grading_schurian(F, WS.grading("square.grading.json"))
    assert gl.check_grading(gA).ok
    assert gl.check_compatible(F, gA, WS.grading("square.grading.json")).ok
    B = WS.category("square.json")
    triv = gl.Grading(B, gl.FiniteGroup.trivial(), {a.name: "e" for a in B.quiver.arrows})
    assert set(gl.induce_grading_schurian(F, triv).degrees.values()) == {"e"}
    with pytest.raises(gl.GroupError):
        gl.induce_grading_schurian(WS.functor("ex_c.functor.json"), WS.grading("ex_c.grading_B.json"))


@pytest.mark.parametrize("gname", ["ex_c.grading_B.json", "ex_a.grading_B.json", "square.grading.json", "a2.grading.json"])
def test_tower_round_trip(gname):
    g = WS.grading(gname)
    S = gl.smash_product(g)
    t = gl.grading_from_schurian_galois(LinearFunctor.identity(g.category), S.projection, S.action)
    assert t.grading_B.degrees == g.degrees
    assert t.square_commutes and t.comparison_is_iso and t.factors


def test_a2_towers_by_hand():
    B = WS.category("a2.json")
    t = gl.grading_from_schurian_galois(LinearFunctor.identity(B), _induced("a2_crossed.quivermap.json"),
                                        WS.group_action("a2_crossed.group.json"))
    assert t.grading_B.degrees == {"x": "g"}  # x0 runs a0 -> b1
    t = gl.grading_from_schurian_galois(LinearFunctor.identity(B), _induced("a2_double.quivermap.json"),
                                        WS.group_action("a2_double.group.json"))
    assert t.grading_B.degrees == {"x": "e"}
    assert t.comparison_is_iso
