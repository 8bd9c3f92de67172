"""End-to-end checks on the bundled corpus.

Each ``criterion_*`` function returns a :class:`Check` whose ``passed`` flag is
the conjunction of exact comparisons listed in ``details``.  The CLI command
``corpus`` runs all of them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import cleaving as cl
from . import galois as gl
from . import krullschmidt as ks
from . import repmod as rm
from . import transport as tr
from .fileio import Workspace
from .functorcore import (
    LinearFunctor,
    check_balanced,
    check_covering,
    check_functor,
    check_quiver_covering_map,
    covering_order,
    induced_functor,
    lift,
)
from .quivercat import check_schurian


@dataclass
class Check:
    name: str
    passed: bool = True
    details: dict = field(default_factory=dict)

    def expect(self, key: str, observed, expected=True) -> bool:
        ok = _equal(observed, expected)
        self.details[key] = {"observed": observed, "expected": expected, "ok": ok}
        self.passed = self.passed and ok
        return ok

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "details": self.details}


def _equal(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def _terms(cat, m) -> dict:
    p = cat.p
    return {lab: (int(c) - p if int(c) > p // 2 else int(c))
            for lab, c in zip(cat.hom_labels(m.source, m.target), m.coords) if c}


def coverings(ws: Workspace) -> dict[str, LinearFunctor]:
    """Every covering bundled with the corpus, by name."""
    out = {
        "ex_a": ws.functor("ex_a.functor.json"),
        "ex_b": ws.functor("ex_b.functor.json"),
        "ex_c": ws.functor("ex_c.functor.json"),
        "octagon": ws.functor("octagon.functor.json"),
    }
    for name in ("a2_double", "a2_crossed"):
        q, A, B = ws.quiver_map(f"{name}.quivermap.json")
        out[name] = induced_functor(q, A, B)[0]
    out["ex_a_quotient"] = gl.galois_quotient(ws.group_action("ex_a.group.json")).projection
    return out


# criteria ------------------------------------------------------------------------------------


def criterion_1(seed: int = 0) -> Check:
    c = Check("Example (c) lifts")
    for p in (3, 5, 7, 32003):
        ws = Workspace(p)
        F = ws.functor("ex_c.functor.json")
        A, B = F.source, F.target
        cert = check_covering(F)
        beta = B.arrow_morphism("beta")
        out = lift(cert, beta, "a2", "out")
        inn = lift(cert, beta, "b2", "in")
        c.expect(f"p={p} out-lift at b2", _terms(A, out.components["b2"]), {"alpha2": -1})
        c.expect(f"p={p} out-lift at b1", _terms(A, out.components["b1"]), {"beta2": 1})
        c.expect(f"p={p} in-lift from a2", _terms(A, inn.components["a2"]), {})
        c.expect(f"p={p} in-lift from a1", _terms(A, inn.components["a1"]), {"beta1": 1})
    return c


def criterion_2(seed: int = 0) -> Check:
    c = Check("Example (c) verdicts")
    ws = Workspace()
    F = ws.functor("ex_c.functor.json")
    cert = check_covering(F)
    c.expect("covering", True)
    bal = check_balanced(cert)
    c.expect("balanced", bal.balanced, False)
    w = bal.witness or {}
    c.expect("witness", [w.get("a"), w.get("b"), w.get("f")], ["a2", "b2", "beta"])
    X = ws.representation("ex_c.X.json")
    eps = cl.epsilon(cert, X)
    Y = eps.pulled
    c.expect("pulled-up push-down dims", [Y.dims[v] for v in ("a1", "a2", "b1", "b2")], [1, 1, 1, 1])
    D = ks.decompose(Y, seed)
    c.expect("indecomposable", len(D.components) == 1)
    c.expect("summand", ks.is_direct_summand(X, Y, seed).summand, False)
    c.expect("cleave", cl.cleaving_test(cert, X, seed).splits, False)
    return c


def criterion_3(seed: int = 0) -> Check:
    c = Check("Example (b) balanced covering")
    ws = Workspace()
    F = ws.functor("ex_b.functor.json")
    cert = check_covering(F)
    c.expect("covering", True)
    c.expect("balanced", check_balanced(cert).balanced)
    c.expect("order", covering_order(cert), 2)
    rng = np.random.default_rng(seed)
    same, splits = [], []
    for _ in range(10):
        X = rm.random_representation(F.source, rng, max_dim=6)
        same.append(tr.push_down(cert, X).rep.same_as(tr.push_down_right(cert, X).rep))
        splits.append(cl.cleaving_test(cert, X, seed).splits)
    c.expect("push-down equals right push-down (10 samples)", same, [True] * 10)
    c.expect("cleave splits (10 samples)", splits, [True] * 10)
    return c


def criterion_4(seed: int = 0) -> Check:
    c = Check("Example (a) Galois quotient")
    ws = Workspace()
    action = ws.group_action("ex_a.group.json")
    c.expect("action free", gl.check_action(action).ok)
    quot = gl.galois_quotient(action)
    F = ws.functor("ex_a.functor.json")
    iso = gl.factor_through_quotient(quot, F)
    c.expect("A/C2 isomorphic to B", iso.isomorphic)
    cert = check_covering(quot.projection)
    c.expect("projection covering", True)
    c.expect("projection balanced", check_balanced(cert).balanced)
    order = covering_order(cert)
    c.expect("order", order, 2)
    c.expect("order bookkeeping", order * len(quot.category.objects), len(action.category.objects))
    return c


def criterion_5(seed: int = 0) -> Check:
    c = Check("schurian covering")
    ws = Workspace()
    F = ws.functor("octagon.functor.json")
    cert = check_covering(F)
    c.expect("target schurian", check_schurian(F.target))
    c.expect("order", covering_order(cert), 2)
    c.expect("balanced", check_balanced(cert).balanced)
    rng = np.random.default_rng(seed)
    isos = []
    for k in range(10):
        M = rm.random_representation(F.target, rng, max_dim=5)
        L = tr.push_down(cert, tr.pull_up(F, M)).rep
        isos.append(ks.are_isomorphic(L, rm.direct_sum(M, M), seed + k).isomorphic)
    c.expect("push-down of pull-up is M+M (10 samples)", isos, [True] * 10)
    return c


def _random_pair(cat, rng) -> tuple[rm.RepMorphism, rm.RepMorphism]:
    p = cat.p
    X = rm.random_representation(cat, rng, max_dim=3)
    W = rm.random_representation(cat, rng, max_dim=3)
    V = rm.random_representation(cat, rng, max_dim=3)
    Y, _ = rm.change_basis(rm.direct_sum(X, W), {a: rm.random_invertible(X.dims[a] + W.dims[a], p, rng)
                                                    for a in cat.objects})
    Z, _ = rm.change_basis(rm.direct_sum(Y, V), {a: rm.random_invertible(Y.dims[a] + V.dims[a], p, rng)
                                                    for a in cat.objects})
    H1, H2 = rm.hom_space(X, Y), rm.hom_space(Y, Z)
    u = rm.combine(H1, rng.integers(0, p, size=len(H1)), X, Y)
    v = rm.combine(H2, rng.integers(0, p, size=len(H2)), Y, Z)
    return u, v


def transport_functoriality(F: LinearFunctor, rng: np.random.Generator, pairs: int = 20) -> dict:
    cert = check_covering(F)
    A, B = F.source, F.target
    push_ok, pull_ok = True, True
    for _ in range(pairs):
        u, v = _random_pair(A, rng)
        PX, PY, PZ = (tr.push_down(cert, R) for R in (u.source, u.target, v.target))
        lhs = tr.push_down_morphism(cert, u.then(v), PX, PZ)
        rhs = tr.push_down_morphism(cert, u, PX, PY).then(tr.push_down_morphism(cert, v, PY, PZ))
        ident = tr.push_down_morphism(cert, rm.identity_morphism(u.source), PX, PX)
        push_ok &= lhs.equals(rhs) and ident.is_identity()
        s, t = _random_pair(B, rng)
        QX, QY, QZ = (tr.pull_up(F, R) for R in (s.source, s.target, t.target))
        lhs = tr.pull_up_morphism(F, s.then(t), QX, QZ)
        rhs = tr.pull_up_morphism(F, s, QX, QY).then(tr.pull_up_morphism(F, t, QY, QZ))
        ident = tr.pull_up_morphism(F, rm.identity_morphism(s.source), QX, QX)
        pull_ok &= lhs.equals(rhs) and lhs.is_morphism() and ident.is_identity()
    proj = all(ks.are_isomorphic(tr.push_down(cert, rm.projective_rep(A, a)).rep,
                                 rm.projective_rep(B, F(a))).isomorphic for a in A.objects)
    inj = all(ks.are_isomorphic(tr.push_down_right(cert, rm.injective_rep(A, b)).rep,
                                rm.injective_rep(B, F(b))).isomorphic for b in A.objects)
    return {"push_down": bool(push_ok), "pull_up": bool(pull_ok), "projectives": proj, "injectives": inj}


def criterion_6(seed: int = 0) -> Check:
    c = Check("transport functoriality")
    ws = Workspace()
    rng = np.random.default_rng(seed)
    for name, F in coverings(ws).items():
        c.expect(name, transport_functoriality(F, rng),
                 {"push_down": True, "pull_up": True, "projectives": True, "injectives": True})
    return c


def criterion_7(seed: int = 0) -> Check:
    c = Check("smash products")
    ws = Workspace()
    for gname in ("ex_c.grading_B.json", "ex_a.grading_B.json", "square.grading.json"):
        S = gl.smash_product(ws.grading(gname))
        c.expect(f"{gname}: canonical action free", gl.check_action(S.action).ok)
        c.expect(f"{gname}: (B#G)/G isomorphic to B", gl.canonical_quotient_iso(S).isomorphic)
    S = gl.smash_product(ws.grading("ex_c.grading_B.json"))
    c.expect("Kronecker smash has 4 vertices", len(S.category.objects), 4)
    c.expect("Kronecker smash schurian", check_schurian(S.category))
    for label, fun, ga, gb, want in (
        ("balanced instance", "ex_b.functor.json", "ex_b.grading_A.json", "ex_b.grading_B.json", True),
        ("non-balanced instance", "ex_c.functor.json", "ex_c.grading_A_all_g.json",
         "ex_c.grading_B_all_g.json", False),
    ):
        r = gl.smash_functor(ws.functor(fun), ws.grading(ga), ws.grading(gb))
        c.expect(f"{label}: square commutes", r.square_commutes)
        c.expect(f"{label}: F#G covering", r.covering)
        c.expect(f"{label}: F balanced", r.balanced_F, want)
        c.expect(f"{label}: F#G balanced", r.balanced_smash, want)
    return c


def criterion_8(seed: int = 0) -> Check:
    c = Check("grading induction")
    ws = Workspace()
    F = ws.functor("octagon.functor.json")
    gB = ws.grading("square.grading.json")
    gA = gl.induce_grading_schurian(F, gB)
    c.expect("induced grading homogeneous", gl.check_grading(gA).ok)
    c.expect("induced grading compatible", gl.check_compatible(F, gA, gB).ok)
    for gname in ("ex_c.grading_B.json", "ex_a.grading_B.json", "square.grading.json"):
        g = ws.grading(gname)
        S = gl.smash_product(g)
        t = gl.grading_from_schurian_galois(LinearFunctor.identity(g.category), S.projection, S.action)
        c.expect(f"{gname}: round trip", t.grading_B.degrees, g.degrees)
        c.expect(f"{gname}: square", t.square_commutes)
        c.expect(f"{gname}: B#G to cover is an isomorphism", t.comparison_is_iso)
    q, A, B = ws.quiver_map("a2_crossed.quivermap.json")
    Fp = induced_functor(q, A, B)[0]
    t = gl.grading_from_schurian_galois(LinearFunctor.identity(B), Fp, ws.group_action("a2_crossed.group.json"))
    c.expect("A2 crossed tower degree", t.grading_B.degrees, {"x": "g"})
    c.expect("A2 crossed tower factors", t.factors and t.square_commutes and t.comparison_is_iso)
    return c


def criterion_9(seed: int = 0) -> Check:
    c = Check("retraction and naturality squares")
    ws = Workspace()
    for name, F in coverings(ws).items():
        cert = check_covering(F)
        table = cl.retraction_table(cert)
        sq = cl.check_naturality_squares(table)
        bal = check_balanced(cert).balanced
        c.expect(f"{name}: E∘F = 1", table.left_inverse)
        c.expect(f"{name}: square 1", sq.square1)
        c.expect(f"{name}: square 2 equals balanced", sq.square2, bal)
    return c


INDECOMPOSABLES = {
    "ex_c.A.json": ["ex_c.X.json", "ex_c.Y.json"],
    "ex_c.B.json": ["kronecker_plus.json", "kronecker_minus.json", "kronecker_12.json", "kronecker_21.json"],
}


def criterion_10(seed: int = 0) -> Check:
    c = Check("Krull-Schmidt self-consistency")
    ws = Workspace()
    rng = np.random.default_rng(seed)
    pools = {k: [ws.representation(f) for f in v] for k, v in INDECOMPOSABLES.items()}
    recovered, agree = [], []
    keys = sorted(pools)
    for k in range(20):
        pool = pools[keys[k % len(keys)]]
        picks = sorted(int(i) for i in rng.integers(0, len(pool), size=int(rng.integers(2, 4))))
        parts = [pool[i] for i in picks]
        X = rm.direct_sum(*parts)
        cat = X.category
        X, _ = rm.change_basis(X, {a: rm.random_invertible(X.dims[a], cat.p, rng) for a in cat.objects})
        D0, D1 = ks.decompose(X, seed), ks.decompose(X, seed + 1)
        want = {i: picks.count(i) for i in set(picks)}
        got = {}
        for Y, m in D0.classes:
            match = [i for i, Z in enumerate(pool) if ks.are_isomorphic(Y, Z).isomorphic]
            key = match[0] if match else -1
            got[key] = got.get(key, 0) + m
        recovered.append(got == want)
        agree.append(ks.same_multiset(D0, D1))
    c.expect("multiset recovered (20 samples)", recovered, [True] * 20)
    c.expect("two seeds agree (20 samples)", agree, [True] * 20)
    queries = 0
    for pool in pools.values():
        for Z in pool:
            for W in pool:
                S = rm.direct_sum(Z, W)
                ks.is_direct_summand(Z, S, seed)  # raises if the two methods disagree
                ks.is_direct_summand(S, Z, seed)
                queries += 2
    F = ws.functor("ex_c.functor.json")
    X = ws.representation("ex_c.X.json")
    cert = check_covering(F)
    ks.is_direct_summand(X, cl.epsilon(cert, X).pulled, seed)
    queries += 1
    c.expect("summand methods agree", {"queries": queries, "disagreements": 0}, {"queries": queries, "disagreements": 0})
    return c


CRITERIA: list[Callable[[int], Check]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
]


def quiver_map_checks() -> Check:
    c = Check("quiver covering maps")
    ws = Workspace()
    for name, want in (("a2_double.quivermap.json", True), ("a2_crossed.quivermap.json", True),
                       ("ex_a.quivermap.json", True), ("octagon.quivermap.json", True),
                       ("a2_collapse.json", False)):
        q, A, B = ws.quiver_map(name)
        rep = check_quiver_covering_map(q)
        c.expect(f"{name}: star bijections", rep.covering, want)
        if rep.covering:
            F, adm = induced_functor(q, A, B)
            cert = check_covering(F)
            c.expect(f"{name}: admissible", adm.admissible)
            c.expect(f"{name}: functor well defined", check_functor(F).ok)
            c.expect(f"{name}: balanced", check_balanced(cert).balanced)
    return c


def run_all(seed: int = 0) -> list[Check]:
    out = []
    for k, crit in enumerate(CRITERIA, 1):
        try:
            chk = crit(seed)
        except Exception as exc:  # a crash counts as a failed criterion
            chk = Check(crit.__name__, False, {"error": f"{type(exc).__name__}: {exc}"})
        chk.name = f"{k}. {chk.name}"
        out.append(chk)
    try:
        out.append(quiver_map_checks())
    except Exception as exc:
        out.append(Check("quiver covering maps", False, {"error": f"{type(exc).__name__}: {exc}"}))
    return out
