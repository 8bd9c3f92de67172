"""The retraction ``E(a, b)`` of a covering, its naturality squares, and the
canonical mono ``ε(X): X -> F_•F_λX`` together with the splitting test."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exactfield as ef
from .functorcore import CoveringCertificate, _labelled, in_component_matrix
from .krullschmidt import SummandResult, is_direct_summand, solve_retraction
from .quivercat import Morphism
from .repmod import RepMorphism, Representation
from .transport import TransportResult, pull_up, push_down


@dataclass
class RetractionTable:
    cert: CoveringCertificate
    maps: dict[tuple[str, str], np.ndarray]  # (a, b) -> matrix B(Fa, Fb) -> A(a, b)
    left_inverse: bool
    failures: list[tuple[str, str]] = field(default_factory=list)

    def apply(self, a: str, b: str, f: Morphism) -> Morphism:
        v = ef.matmul(self.maps[(a, b)], np.asarray(f.coords, dtype=np.int64).reshape(-1, 1), self.cert.functor.p)
        return Morphism(a, b, v[:, 0])

    def to_json(self) -> dict:
        A, B, F = self.cert.source, self.cert.target, self.cert.functor
        out = {}
        for (a, b), M in self.maps.items():
            if not M.size:
                continue
            labels = B.hom_labels(F(a), F(b))
            out[f"{a}|{b}"] = {lab: _labelled(A, Morphism(a, b, M[:, k]))["terms"] for k, lab in enumerate(labels)}
        return {"left_inverse": self.left_inverse, "E": out,
                "failures": [list(x) for x in self.failures]}


def retraction_table(cert: CoveringCertificate) -> RetractionTable:
    """``E(a, b): f ↦ •_b f_a``, the in-lift component; checks ``E∘F = 1``."""
    A, F, p = cert.source, cert.functor, cert.functor.p
    maps, bad = {}, []
    for a in A.objects:
        for b in A.objects:
            E = np.ascontiguousarray(in_component_matrix(cert, a, b))
            maps[(a, b)] = E
            if not np.array_equal(ef.matmul(E, F.hom_matrix(a, b), p), ef.identity(A.hom_dim(a, b))):
                bad.append((a, b))
    return RetractionTable(cert, maps, not bad, bad)


@dataclass
class SquaresReport:
    square1: bool
    square2: bool
    failures1: list[dict]
    failures2: list[dict]

    def to_json(self) -> dict:
        return {"post_composition": {"holds": self.square1, "failures": self.failures1},
                "pre_composition": {"holds": self.square2, "failures": self.failures2}}


def check_naturality_squares(table: RetractionTable) -> SquaresReport:
    """Square 1: ``A(a,β)∘E(a,b) = E(a,b')∘B(Fa,Fβ)`` for arrows ``β: b -> b'``.
    Square 2: ``A(α,b)∘E(a,b) = E(a',b)∘B(Fα,Fb)`` for arrows ``α: a' -> a``.
    """
    cert = table.cert
    A, B, F, p = cert.source, cert.target, cert.functor, cert.functor.p
    gens = A.generators()
    f1, f2 = [], []
    for g in gens:
        m = Morphism(g.source, g.target, g.coords)
        Fm = F.apply(m)
        for a in A.objects:
            # post-composition with m: g.source -> g.target
            left = ef.matmul(A.post_matrix(a, m), table.maps[(a, g.source)], p)
            right = ef.matmul(table.maps[(a, g.target)], B.post_matrix(F(a), Fm), p)
            if not np.array_equal(left, right):
                f1.append(_square_witness(table, g.name, a, g.source, a, g.target, left, right))
        for b in A.objects:
            left = ef.matmul(A.pre_matrix(m, b), table.maps[(g.target, b)], p)
            right = ef.matmul(table.maps[(g.source, b)], B.pre_matrix(Fm, F(b)), p)
            if not np.array_equal(left, right):
                f2.append(_square_witness(table, g.name, g.target, b, g.source, b, left, right))
    return SquaresReport(not f1, not f2, f1, f2)


def _square_witness(table, arrow, a, b, a2, b2, left, right) -> dict:
    cert = table.cert
    A, B, F = cert.source, cert.target, cert.functor
    labels = B.hom_labels(F(a), F(b))
    k = next(k for k in range(left.shape[1]) if not np.array_equal(left[:, k], right[:, k]))
    E = table.maps[(a2, b2)]
    return {
        "arrow": arrow,
        "from_pair": [a, b],
        "to_pair": [a2, b2],
        "f": labels[k],
        "left": _labelled(A, Morphism(a2, b2, left[:, k]))["terms"],
        "right": _labelled(A, Morphism(a2, b2, right[:, k]))["terms"],
        "E_on_basis": {lab: _labelled(A, Morphism(a2, b2, E[:, j]))["terms"]
                       for j, lab in enumerate(B.hom_labels(F(a2), F(b2)))},
    }


@dataclass
class EpsilonMono:
    morphism: RepMorphism
    pushed: TransportResult
    pulled: Representation

    def to_json(self) -> dict:
        return {"source_dims": dict(self.morphism.source.dims), "target_dims": dict(self.pulled.dims),
                "components": {a: M.tolist() for a, M in self.morphism.maps.items()}}


class EpsilonError(AssertionError):
    pass


def epsilon(cert: CoveringCertificate, X: Representation) -> EpsilonMono:
    """Slotwise inclusion ``X(a) -> ⊕_{Fa'=Fa} X(a')``; intertwining is asserted."""
    L = push_down(cert, X)
    Y = pull_up(cert.functor, L.rep)
    maps = {}
    for a in X.category.objects:
        i, off, d = L.slot(a)
        M = ef.zeros(Y.dims[a], d)
        M[off:off + d] = ef.identity(d)
        maps[a] = M
    eps = RepMorphism(X, Y, maps)
    if not eps.is_morphism():
        raise EpsilonError("the canonical inclusion is not a module morphism")
    return EpsilonMono(eps, L, Y)


@dataclass
class CleavingResult:
    splits: bool
    retraction: RepMorphism | None
    epsilon: EpsilonMono
    summand: SummandResult
    idempotent: bool | None

    def to_json(self) -> dict:
        return {
            "verdict": "splits" if self.splits else "does not split",
            "dims": dict(self.epsilon.morphism.source.dims),
            "pulled_dims": dict(self.epsilon.pulled.dims),
            "retraction": ({a: M.tolist() for a, M in self.retraction.maps.items()}
                           if self.retraction is not None else None),
            "summand": self.summand.to_json(),
            "epsilon_r_idempotent": self.idempotent,
        }


def cleaving_test(cert: CoveringCertificate, X: Representation, seed: int = 0) -> CleavingResult:
    eps = epsilon(cert, X)
    r = solve_retraction(eps.morphism)
    idem = None
    if r is not None:
        if not eps.morphism.then(r).is_identity():
            raise AssertionError("retraction does not split ε")
        e = r.then(eps.morphism)
        idem = e.then(e).equals(e)
    summ = is_direct_summand(X, eps.pulled, seed)
    return CleavingResult(r is not None, r, eps, summ, idem)
