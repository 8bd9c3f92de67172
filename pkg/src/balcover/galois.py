"""Finite group actions, Galois quotients, arrow gradings and smash products."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import exactfield as ef
from .functorcore import (
    CoveringCertificate,
    FunctorError,
    LinearFunctor,
    check_balanced,
    check_covering,
    check_functor,
    lift,
)
from .quivercat import (
    Arrow,
    BoundCategory,
    CategoryError,
    LinearCategory,
    Morphism,
    PathCombo,
    Quiver,
    TabulatedCategory,
    check_schurian,
)


class GroupError(ValueError):
    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class FiniteGroup:
    """A finite group from its multiplication table; ``table[g][h] = g·h``."""

    def __init__(self, elements: Sequence[str], table: Mapping[str, Mapping[str, str]] | Sequence[Sequence[str]]):
        self.elements = [str(g) for g in elements]
        if len(set(self.elements)) != len(self.elements):
            raise GroupError("group elements must be distinct")
        if isinstance(table, Mapping):
            self.table = {g: dict(table[g]) for g in self.elements}
        else:
            self.table = {g: dict(zip(self.elements, row)) for g, row in zip(self.elements, table)}
        self._validate()

    def _validate(self) -> None:
        els = set(self.elements)
        for g in self.elements:
            row = self.table.get(g)
            if row is None or set(row) != els or not set(row.values()) <= els:
                raise GroupError(f"multiplication table row for {g} is incomplete")
        ids = [e for e in self.elements if all(self.table[e][g] == g == self.table[g][e] for g in self.elements)]
        if len(ids) != 1:
            raise GroupError("no two-sided identity")
        self.identity = ids[0]
        self._inv = {}
        for g in self.elements:
            inv = [h for h in self.elements if self.table[g][h] == self.identity == self.table[h][g]]
            if not inv:
                raise GroupError(f"{g} has no inverse", {"element": g})
            self._inv[g] = inv[0]
        for g in self.elements:
            for h in self.elements:
                for k in self.elements:
                    if self.table[self.table[g][h]][k] != self.table[g][self.table[h][k]]:
                        raise GroupError("multiplication is not associative", {"triple": [g, h, k]})

    def mul(self, g: str, h: str) -> str:
        return self.table[g][h]

    def inv(self, g: str) -> str:
        return self._inv[g]

    def prod(self, elems: Sequence[str]) -> str:
        out = self.identity
        for g in elems:
            out = self.mul(out, g)
        return out

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def cyclic(cls, n: int, names: Sequence[str] | None = None) -> "FiniteGroup":
        if names is None:
            names = ["e", "g"] if n == 2 else ["e"] + [f"g{k}" for k in range(1, n)]
        names = list(names)
        return cls(names, [[names[(i + j) % n] for j in range(n)] for i in range(n)])

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls(["e"], [["e"]])

    def to_json(self) -> dict:
        return {"elements": list(self.elements),
                "table": [[self.table[g][h] for h in self.elements] for g in self.elements]}


# actions --------------------------------------------------------------------------------


@dataclass
class GroupAction:
    category: LinearCategory
    group: FiniteGroup
    functors: dict[str, LinearFunctor]

    def act(self, g: str, a: str) -> str:
        return self.functors[g](a)

    def act_morphism(self, g: str, f: Morphism) -> Morphism:
        return self.functors[g].apply(f)

    def orbits(self) -> list[list[str]]:
        seen, out = set(), []
        for a in self.category.objects:
            if a in seen:
                continue
            orb = {self.act(g, a) for g in self.group.elements}
            seen |= orb
            out.append([x for x in self.category.objects if x in orb])
        return out

    def transporter(self, a: str, b: str) -> str:
        """The unique ``g`` with ``g·a = b`` (free actions)."""
        for g in self.group.elements:
            if self.act(g, a) == b:
                return g
        raise GroupError(f"{b} is not in the orbit of {a}")


@dataclass
class ActionReport:
    ok: bool
    free: bool
    homomorphism: bool
    invertible: bool
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "free": self.free, "homomorphism": self.homomorphism,
                "invertible": self.invertible, "witness": self.witness}


def check_action(action: GroupAction) -> ActionReport:
    A, G = action.category, action.group
    for g, Fg in action.functors.items():
        rep = check_functor(Fg)
        if not rep.ok:
            return ActionReport(False, False, False, False, {"element": g, "functor": rep.witness})
    if set(action.functors) != set(G.elements):
        return ActionReport(False, False, False, False, {"missing": sorted(set(G.elements) - set(action.functors))})
    hom, wit = True, {}
    if not action.functors[G.identity].same_as(LinearFunctor.identity(A)):
        hom, wit = False, {"identity_element_acts_nontrivially": G.identity}
    for g in G.elements:
        for h in G.elements:
            if not hom:
                break
            comp = action.functors[h].then(action.functors[g])
            if not comp.same_as(action.functors[G.mul(g, h)]):
                hom, wit = False, {"pair": [g, h]}
    inv = True
    for g, Fg in action.functors.items():
        if sorted(Fg.object_map.values()) != sorted(A.objects):
            inv, wit = False, wit or {"element": g, "reason": "object map is not bijective"}
            break
        if not all(ef.is_invertible(Fg.hom_matrix(a, b), A.p) for a in A.objects for b in A.objects):
            inv, wit = False, wit or {"element": g, "reason": "hom map is singular"}
            break
    free = True
    for a in A.objects:
        for g in G.elements:
            if g != G.identity and action.act(g, a) == a:
                free = False
                wit = wit or {"object": a, "element": g}
                break
        if not free:
            break
    return ActionReport(hom and inv and free, free, hom, inv, wit)


# Galois quotient ------------------------------------------------------------------------------


@dataclass
class GaloisQuotient:
    category: TabulatedCategory
    projection: LinearFunctor
    action: GroupAction
    representatives: dict[str, str]  # orbit name -> representative
    orbit_members: dict[str, list[str]]
    certificate: CoveringCertificate
    balanced: bool


def galois_quotient(action: GroupAction) -> GaloisQuotient:
    """``A/G`` with ``Hom(ī, j̄) = ⊕_{b ∈ orbit j} A(a0, b)``, ``a0`` the first object of ``ī``."""
    rep = check_action(action)
    if not rep.ok:
        raise GroupError("the action is not a free action by automorphisms", rep.witness)
    A, G, p = action.category, action.group, action.category.p
    orbits = action.orbits()
    names = [orb[0] for orb in orbits]
    members = {orb[0]: orb for orb in orbits}
    orbit_of = {a: orb[0] for orb in orbits for a in orb}
    offsets: dict[tuple[str, str], dict[str, int]] = {}
    labels = {}
    for i in names:
        for j in names:
            off, labs, table = 0, [], {}
            for b in members[j]:
                table[b] = off
                d = A.hom_dim(i, b)
                labs += [f"{lab}@{b}" for lab in A.hom_labels(i, b)]
                off += d
            offsets[(i, j)] = table
            labels[(i, j)] = labs
    tensors = {}
    for i in names:
        for j in names:
            for k in names:
                dij, djk, dik = len(labels[(i, j)]), len(labels[(j, k)]), len(labels[(i, k)])
                T = np.zeros((dij, djk, dik), dtype=np.int64)
                for b in members[j]:
                    h = action.transporter(j, b)
                    ob = offsets[(i, j)][b]
                    for cp in members[k]:
                        oc = offsets[(j, k)][cp]
                        c = action.act(h, cp)
                        out_off = offsets[(i, k)][c]
                        for s in range(A.hom_dim(i, b)):
                            f = A.basis_morphism(i, b, s)
                            for t in range(A.hom_dim(j, cp)):
                                g = action.act_morphism(h, A.basis_morphism(j, cp, t))
                                v = A.compose(g, f).coords
                                T[ob + s, oc + t, out_off:out_off + len(v)] += v
                tensors[(i, j, k)] = T % p
    idents = {i: offsets[(i, i)][i] + A.identity_index(i) for i in names}
    Q = TabulatedCategory(names, labels, tensors, idents, p, name=f"{getattr(A, 'name', '')}/G")
    homs = {}
    for a in A.objects:
        ia = orbit_of[a]
        h_inv = action.transporter(a, ia)
        for b in A.objects:
            jb = orbit_of[b]
            M = ef.zeros(len(labels[(ia, jb)]), A.hom_dim(a, b))
            slot = action.act(h_inv, b)
            off = offsets[(ia, jb)][slot]
            Mh = action.functors[h_inv].hom_matrix(a, b)
            M[off:off + Mh.shape[0]] = Mh
            homs[(a, b)] = M
    P = LinearFunctor(A, Q, orbit_of, hom_matrices=homs, name="projection")
    cert = check_covering(P)
    bal = check_balanced(cert)
    if not bal.balanced:
        raise AssertionError(f"Galois projection is not balanced: {bal.witness}")
    return GaloisQuotient(Q, P, action, {n: n for n in names}, members, cert, True)


@dataclass
class IsoWitness:
    isomorphic: bool
    functor: LinearFunctor | None
    witness: dict = field(default_factory=dict)


def factor_through_quotient(quot: GaloisQuotient, F: LinearFunctor) -> IsoWitness:
    """Factor a G-invariant ``F: A -> B`` as ``Φ∘P`` and test whether ``Φ`` is an isomorphism."""
    A, action = quot.action.category, quot.action
    if F.source is not A:
        raise FunctorError("functor does not start at the acted-on category")
    for g, Fg in action.functors.items():
        if not Fg.then(F).same_as(F):
            return IsoWitness(False, None, {"not_invariant_under": g})
    Q, B = quot.category, F.target
    obj = {i: F(i) for i in Q.objects}
    homs = {}
    for i in Q.objects:
        for j in Q.objects:
            blocks = [F.hom_matrix(i, b) for b in quot.orbit_members[j]]
            homs[(i, j)] = np.concatenate(blocks, axis=1)
    Phi = LinearFunctor(Q, B, obj, hom_matrices=homs, name="quotient comparison")
    rep = check_functor(Phi)
    if not rep.ok:
        return IsoWitness(False, Phi, {"functor": rep.witness})
    if sorted(obj.values()) != sorted(B.objects) or len(set(obj.values())) != len(obj):
        return IsoWitness(False, Phi, {"reason": "not bijective on objects"})
    for (i, j), M in homs.items():
        if not ef.is_invertible(M, B.p):
            return IsoWitness(False, Phi, {"pair": [i, j], "reason": "hom map not invertible"})
    if not quot.projection.then(Phi).same_as(F):
        return IsoWitness(False, Phi, {"reason": "factorisation does not reproduce F"})
    return IsoWitness(True, Phi)


# gradings -----------------------------------------------------------------------------------


@dataclass
class Grading:
    category: BoundCategory
    group: FiniteGroup
    degrees: dict[str, str]

    def __post_init__(self):
        names = {a.name for a in self.category.quiver.arrows}
        if set(self.degrees) != names:
            raise GroupError("degrees must be given for exactly the arrows",
                             {"missing": sorted(names - set(self.degrees)),
                              "extra": sorted(set(self.degrees) - names)})
        for a, g in self.degrees.items():
            if g not in self.group.elements:
                raise GroupError(f"degree of {a} is not a group element")

    def path_degree(self, arrows: Sequence[int]) -> str:
        q = self.category.quiver
        return self.group.prod([self.degrees[q.arrows[i].name] for i in arrows])

    def to_json(self) -> dict:
        return {"degrees": dict(self.degrees)}


@dataclass
class GradingReport:
    ok: bool
    witness: dict = field(default_factory=dict)


def check_grading(grading: Grading) -> GradingReport:
    B = grading.category
    for k, rel in enumerate(B.relations):
        degs = {grading.path_degree(arr) for _, arr in rel.terms}
        if len(degs) > 1:
            return GradingReport(False, {
                "relation": k,
                "terms": [[c, [B.quiver.arrows[i].name for i in arr], grading.path_degree(arr)]
                          for c, arr in rel.terms],
            })
    return GradingReport(True)


def graded_component(grading: Grading, i: str, j: str, g: str) -> np.ndarray:
    """Columns spanning ``B^g(i, j)`` in hom-basis coordinates."""
    if not check_grading(grading).ok:
        raise GroupError("relations are not homogeneous")
    B = grading.category
    basis = B.hom_basis(i, j)
    cols = [k for k, pth in enumerate(basis) if grading.path_degree(pth.arrows) == g]
    M = ef.zeros(len(basis), len(cols))
    for c, k in enumerate(cols):
        M[k, c] = 1
    return M


def homogeneous_degree(grading: Grading, f: Morphism) -> str | None:
    """The degree of ``f`` if it is homogeneous and nonzero."""
    B = grading.category
    degs = {grading.path_degree(pth.arrows) for c, pth in zip(f.coords, B.hom_basis(f.source, f.target)) if c}
    return degs.pop() if len(degs) == 1 else None


# smash products -----------------------------------------------------------------------------


def smash_vertex(i: str, g: str) -> str:
    return f"({i},{g})"


def smash_arrow(alpha: str, g: str) -> str:
    return f"({alpha},{g})"


@dataclass
class SmashCategory:
    category: BoundCategory
    grading: Grading
    action: GroupAction
    projection: LinearFunctor
    connected: bool

    def vertex(self, i: str, g: str) -> str:
        return smash_vertex(i, g)


def smash_product(grading: Grading) -> SmashCategory:
    rep = check_grading(grading)
    if not rep.ok:
        raise GroupError("grading is not homogeneous", rep.witness)
    B, G, p = grading.category, grading.group, grading.category.p
    q = B.quiver
    vertices = [smash_vertex(i, g) for g in G.elements for i in B.objects]
    arrows = []
    for g in G.elements:
        for a in q.arrows:
            d = grading.degrees[a.name]
            arrows.append(Arrow(smash_arrow(a.name, g), smash_vertex(a.source, g), smash_vertex(a.target, G.mul(g, d))))
    Q2 = Quiver(vertices, arrows)
    rels = []
    for rel in B.relations:
        for g in G.elements:
            terms = [(c, _lift_path(grading, arr, g)) for c, arr in rel.terms]
            rels.append(PathCombo.from_terms(Q2, terms, p))
    S = BoundCategory(Q2, [r for r in rels if r.terms], B.n, p, name=f"{B.name}#G")
    functors = {}
    for t in G.elements:
        obj = {smash_vertex(i, g): smash_vertex(i, G.mul(t, g)) for g in G.elements for i in B.objects}
        imgs = {smash_arrow(a.name, g): S.arrow_morphism(smash_arrow(a.name, G.mul(t, g)))
                for g in G.elements for a in q.arrows}
        functors[t] = LinearFunctor(S, S, obj, arrow_images=imgs, name=f"translate {t}")
    action = GroupAction(S, G, functors)
    act_rep = check_action(action)
    if not act_rep.ok:
        raise AssertionError(f"canonical action is not free: {act_rep.witness}")
    obj = {smash_vertex(i, g): i for g in G.elements for i in B.objects}
    imgs = {smash_arrow(a.name, g): B.arrow_morphism(a.name) for g in G.elements for a in q.arrows}
    proj = LinearFunctor(S, B, obj, arrow_images=imgs, name="smash projection")
    for g in G.elements:
        for h in G.elements:
            for i in B.objects:
                for j in B.objects:
                    want = graded_component(grading, i, j, G.mul(G.inv(g), h)).shape[1]
                    if S.hom_dim(smash_vertex(i, g), smash_vertex(j, h)) != want:
                        raise AssertionError(f"smash hom dimension mismatch at {(i, g, j, h)}")
    return SmashCategory(S, grading, action, proj, S.is_connected())


def _lift_path(grading: Grading, arrows: Sequence[int], g: str) -> list[str]:
    q, G = grading.category.quiver, grading.group
    out, cur = [], g
    for i in arrows:
        name = q.arrows[i].name
        out.append(smash_arrow(name, cur))
        cur = G.mul(cur, grading.degrees[name])
    return out


def _lift_morphism(grading: Grading, smash: SmashCategory, f: Morphism, g: str) -> Morphism:
    """Lift a homogeneous ``f`` of B to ``B#G`` starting at ``(f.source, g)``."""
    B, S, G = grading.category, smash.category, grading.group
    d = homogeneous_degree(grading, f)
    if d is None:
        if f.is_zero():
            return S.zero(smash_vertex(f.source, g), smash_vertex(f.target, g))
        raise GroupError("morphism mixes degrees", {"terms": _terms(grading, f)})
    src, tgt = smash_vertex(f.source, g), smash_vertex(f.target, G.mul(g, d))
    acc = S.zero(src, tgt)
    for c, pth in zip(f.coords, B.hom_basis(f.source, f.target)):
        if c:
            acc = S.add(acc, S.path_morphism(_lift_path(grading, pth.arrows, g), src), int(c))
    return acc


@dataclass
class SmashFunctorResult:
    functor: LinearFunctor
    square_commutes: bool
    covering: bool
    balanced_F: bool
    balanced_smash: bool
    source_smash: SmashCategory
    target_smash: SmashCategory
    witness: dict = field(default_factory=dict)

    @property
    def biconditional(self) -> bool:
        return self.balanced_F == self.balanced_smash

    def to_json(self) -> dict:
        return {"square_commutes": self.square_commutes, "covering": self.covering,
                "balanced": self.balanced_F, "smash_balanced": self.balanced_smash,
                "biconditional_holds": self.biconditional,
                "source_connected": self.source_smash.connected,
                "target_connected": self.target_smash.connected, "witness": self.witness}


def check_compatible(F: LinearFunctor, grading_A: Grading, grading_B: Grading) -> GradingReport:
    for name, img in F.arrow_images.items():
        d = grading_A.degrees[name]
        if img.is_zero():
            continue
        if homogeneous_degree(grading_B, img) != d:
            return GradingReport(False, {"arrow": name, "degree": d,
                                         "image_terms": _terms(grading_B, img)})
    return GradingReport(True)


def _terms(grading: Grading, f: Morphism) -> list:
    B = grading.category
    return [[int(c), B.path_label(pth), grading.path_degree(pth.arrows)]
            for c, pth in zip(f.coords, B.hom_basis(f.source, f.target)) if c]


def smash_functor(F: LinearFunctor, grading_A: Grading, grading_B: Grading,
                  source_smash: SmashCategory | None = None,
                  target_smash: SmashCategory | None = None) -> SmashFunctorResult:
    """``F#G: A#G -> B#G`` with ``(a, g) ↦ (Fa, g)``."""
    if grading_A.group is not grading_B.group and grading_A.group.to_json() != grading_B.group.to_json():
        raise GroupError("gradings use different groups")
    comp = check_compatible(F, grading_A, grading_B)
    if not comp.ok:
        raise GroupError("functor is not compatible with the gradings", comp.witness)
    G = grading_A.group
    SA = source_smash or smash_product(grading_A)
    SB = target_smash or smash_product(grading_B)
    A = grading_A.category
    obj = {smash_vertex(a, g): smash_vertex(F(a), g) for g in G.elements for a in A.objects}
    imgs = {}
    for g in G.elements:
        for arr in A.quiver.arrows:
            imgs[smash_arrow(arr.name, g)] = _lift_morphism(grading_B, SB, F.arrow_images[arr.name], g)
    FG = LinearFunctor(SA.category, SB.category, obj, arrow_images=imgs, name="F#G")
    rep = check_functor(FG)
    if not rep.ok:
        raise AssertionError(f"F#G is not well defined: {rep.witness}")
    left = FG.then(SB.projection)
    right = SA.projection.then(F)
    square = all(np.array_equal(left.arrow_images[n].coords, right.arrow_images[n].coords) for n in imgs)
    try:
        cert = check_covering(FG)
        covering, bal_smash = True, check_balanced(cert).balanced
    except Exception:
        covering, bal_smash = False, False
    bal_F = check_balanced(check_covering(F)).balanced
    return SmashFunctorResult(FG, square, covering, bal_F, bal_smash, SA, SB)


# grading induction -------------------------------------------------------------------------------


def induce_grading_schurian(F: LinearFunctor, grading_B: Grading) -> Grading:
    """Pull a grading back along a covering onto a schurian category."""
    B, A = grading_B.category, F.source
    if not check_schurian(B):
        raise GroupError("target category is not schurian")
    check_covering(F)
    degrees = {}
    for arr in A.quiver.arrows:
        img = F.arrow_images[arr.name]
        d = homogeneous_degree(grading_B, img)
        if d is None:
            raise GroupError(f"image of {arr.name} is zero", {"arrow": arr.name})
        degrees[arr.name] = d
    grading_A = Grading(A, grading_B.group, degrees)
    rep = check_grading(grading_A)
    if not rep.ok:
        raise GroupError("induced grading is not homogeneous", rep.witness)
    comp = check_compatible(F, grading_A, grading_B)
    if not comp.ok:
        raise GroupError("induced grading is not compatible", comp.witness)
    return grading_A


@dataclass
class TowerResult:
    grading_A: Grading
    grading_B: Grading
    comparison: LinearFunctor  # A#G -> B'
    smash_to_cover: LinearFunctor  # B#G -> B'
    choice: dict[str, str]
    square_commutes: bool
    comparison_is_iso: bool
    factors: bool

    def to_json(self) -> dict:
        return {"degrees_A": dict(self.grading_A.degrees), "degrees_B": dict(self.grading_B.degrees),
                "choice": dict(self.choice), "square_commutes": self.square_commutes,
                "smash_to_cover_is_iso": self.comparison_is_iso, "factors_through_smash": self.factors}


def _arrow_of(cat: BoundCategory, f: Morphism) -> str:
    for arr in cat.quiver.arrows:
        if (arr.source, arr.target) == (f.source, f.target) and np.array_equal(cat.arrow_morphism(arr.name).coords,
                                                                               f.coords):
            return arr.name
    raise FunctorError("image is not the class of an arrow")


def _degrees_via_cover(F: LinearFunctor, cert: CoveringCertificate, action: GroupAction,
                       choice: dict[str, str]) -> tuple[dict[str, str], dict[str, Morphism]]:
    A = F.source
    Bp = cert.source
    degrees, lifts = {}, {}
    for arr in A.quiver.arrows:
        f = F.arrow_images[arr.name]
        _arrow_of(F.target, f)
        start = choice[arr.source]
        fam = lift(cert, f, start, "out")
        nonzero = [(b, m) for b, m in fam.components.items() if not m.is_zero()]
        if len(nonzero) != 1:
            raise GroupError(f"lift of {arr.name} is not concentrated at one object", {"arrow": arr.name})
        end, m = nonzero[0]
        degrees[arr.name] = action.transporter(choice[arr.target], end)
        lifts[arr.name] = m
    return degrees, lifts


def grading_from_schurian_galois(F: LinearFunctor, Fp: LinearFunctor, action: GroupAction) -> TowerResult:
    """Grade ``A`` from a Galois covering ``F': B' -> B`` with schurian ``B'``.

    ``a'`` is the first object of ``F'^{-1}(Fa)`` in file order and ``g_α`` is
    the element moving ``b'`` to the end point of the lift of ``F(α)`` at ``a'``.
    """
    A, B, Bp = F.source, F.target, Fp.source
    if Fp.target is not B:
        raise FunctorError("the two functors do not share a target")
    if not check_schurian(Bp):
        raise GroupError("covering category is not schurian")
    if action.category is not Bp:
        raise GroupError("action does not act on the covering category")
    rep = check_action(action)
    if not rep.ok:
        raise GroupError("action is not free", rep.witness)
    G = action.group
    cert = check_covering(Fp)
    for g, Fg in action.functors.items():
        if not Fg.then(Fp).same_as(Fp):
            raise GroupError("covering functor is not invariant under the action", {"element": g})
    if sorted(map(sorted, cert.fibers.values())) != sorted(map(sorted, action.orbits())):
        raise GroupError("fibers of the covering are not the orbits")
    choice_B = {i: cert.fibers[i][0] for i in B.objects}
    choice_A = {a: choice_B[F(a)] for a in A.objects}
    degrees_A, lifts_A = _degrees_via_cover(F, cert, action, choice_A)
    grading_A = Grading(A, G, degrees_A)
    rep = check_grading(grading_A)
    if not rep.ok:
        raise GroupError("constructed grading is not homogeneous", rep.witness)
    idB = LinearFunctor.identity(B)
    degrees_B, lifts_B = _degrees_via_cover(idB, cert, action, choice_B)
    grading_B = Grading(B, G, degrees_B)
    comp = check_compatible(F, grading_A, grading_B)
    if not comp.ok:
        raise GroupError("constructed grading is not compatible", comp.witness)
    SA, SB = smash_product(grading_A), smash_product(grading_B)

    def comparison(S: SmashCategory, grading: Grading, choice, lifts) -> LinearFunctor:
        cat = grading.category
        obj = {smash_vertex(a, g): action.act(g, choice[a]) for g in G.elements for a in cat.objects}
        imgs = {}
        for g in G.elements:
            for arr in cat.quiver.arrows:
                imgs[smash_arrow(arr.name, g)] = action.act_morphism(g, lifts[arr.name])
        return LinearFunctor(S.category, Bp, obj, arrow_images=imgs)

    Psi_A = comparison(SA, grading_A, choice_A, lifts_A)
    Psi_B = comparison(SB, grading_B, choice_B, lifts_B)
    for Psi in (Psi_A, Psi_B):
        r = check_functor(Psi)
        if not r.ok:
            raise AssertionError(f"comparison functor is not well defined: {r.witness}")
    square = Psi_A.then(Fp).same_as(SA.projection.then(F))
    iso = _is_isomorphism(Psi_B)
    sf = smash_functor(F, grading_A, grading_B, SA, SB)
    factors = sf.functor.then(Psi_B).same_as(Psi_A)
    return TowerResult(grading_A, grading_B, Psi_A, Psi_B, choice_A, square, iso, factors)


def _is_isomorphism(F: LinearFunctor) -> bool:
    A, B = F.source, F.target
    if sorted(F.object_map.values()) != sorted(B.objects) or len(set(F.object_map.values())) != len(A.objects):
        return False
    return all(ef.is_invertible(F.hom_matrix(a, b), A.p) and
               F.hom_matrix(a, b).shape[0] == B.hom_dim(F(a), F(b))
               for a in A.objects for b in A.objects)


def is_isomorphism(F: LinearFunctor) -> bool:
    return check_functor(F).ok and _is_isomorphism(F)


def canonical_quotient_iso(smash: SmashCategory) -> IsoWitness:
    """``(B#G)/G ≅ B`` through the canonical projection."""
    quot = galois_quotient(smash.action)
    return factor_through_quotient(quot, smash.projection)
