"""Linear functors, covering certificates, lift families and balancedness.

For a functor ``F: A -> B`` the hom matrix at ``(a, b)`` has shape
``(dim B(Fa, Fb), dim A(a, b))`` and sends A-coordinates to B-coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import exactfield as ef
from .quivercat import (
    BoundCategory,
    CategoryError,
    LinearCategory,
    Morphism,
    Quiver,
    check_schurian,
)


class FunctorError(ValueError):
    """A functor is not well defined; ``witness`` says where."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class NotCoveringError(ValueError):
    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class LinearFunctor:
    """A k-linear functor ``source -> target``.

    Functors out of a :class:`BoundCategory` are given by arrow images;
    functors out of a tabulated category by their hom matrices.
    """

    def __init__(self, source: LinearCategory, target: LinearCategory, object_map: Mapping[str, str],
                 arrow_images: Mapping[str, Morphism] | None = None,
                 hom_matrices: Mapping[tuple[str, str], np.ndarray] | None = None, name: str = ""):
        if source.p != target.p:
            raise FunctorError("source and target live over different primes")
        self.source = source
        self.target = target
        self.p = source.p
        self.name = name
        self.object_map = {str(k): str(v) for k, v in object_map.items()}
        missing = [a for a in source.objects if a not in self.object_map]
        if missing:
            raise FunctorError(f"object map misses {missing}")
        for a, x in self.object_map.items():
            if x not in target.objects:
                raise FunctorError(f"object {a} maps to unknown object {x}")
        self._hom: dict[tuple[str, str], np.ndarray] = {}
        self._given: dict[tuple[str, str], np.ndarray] = {}
        self.arrow_images: dict[str, Morphism] = {}
        if arrow_images is not None:
            if not isinstance(source, BoundCategory):
                raise FunctorError("arrow images need a quiver-presented source")
            for arr in source.quiver.arrows:
                if arr.name not in arrow_images:
                    raise FunctorError(f"no image for arrow {arr.name}")
                img = arrow_images[arr.name]
                want = (self.object_map[arr.source], self.object_map[arr.target])
                if (img.source, img.target) != want:
                    raise FunctorError(f"image of {arr.name} must be a morphism {want[0]}->{want[1]}",
                                       {"arrow": arr.name})
                self.arrow_images[arr.name] = Morphism(img.source, img.target, np.asarray(img.coords) % self.p)
        elif hom_matrices is not None:
            for (a, b), M in hom_matrices.items():
                M = np.asarray(M, dtype=np.int64) % self.p
                want = (target.hom_dim(self(a), self(b)), source.hom_dim(a, b))
                if M.shape != want:
                    raise FunctorError(f"hom matrix at {(a, b)} has shape {M.shape}, expected {want}")
                M.setflags(write=False)
                self._hom[(a, b)] = M
            if isinstance(source, BoundCategory):
                # a quiver-presented source is determined by its arrows; the given
                # matrices are compared with the induced ones in check_functor
                self._given = dict(self._hom)
                for arr in source.quiver.arrows:
                    m = source.arrow_morphism(arr.name)
                    M = self._hom.get((arr.source, arr.target))
                    if M is None:
                        raise FunctorError(f"hom matrix at {(arr.source, arr.target)} not given")
                    v = ef.matmul(M, m.coords.reshape(-1, 1), self.p)[:, 0]
                    self.arrow_images[arr.name] = Morphism(self(arr.source), self(arr.target), v)
        else:
            raise FunctorError("give either arrow images or hom matrices")

    def __call__(self, a: str) -> str:
        return self.object_map[a]

    # evaluation --------------------------------------------------------------------

    def _path_image(self, arrows: tuple[int, ...], source: str) -> np.ndarray:
        A = self.source
        assert isinstance(A, BoundCategory)
        B = self.target
        cur = B.identity(self(source))
        for i in arrows:
            cur = B.compose(self.arrow_images[A.quiver.arrows[i].name], cur)
        return cur.coords

    def hom_matrix(self, a: str, b: str) -> np.ndarray:
        M = self._hom.get((a, b))
        if M is None:
            if not isinstance(self.source, BoundCategory):
                raise FunctorError(f"hom matrix at {(a, b)} not given")
            M = self._induced_hom(a, b)
            self._hom[(a, b)] = M
        return M

    def _induced_hom(self, a: str, b: str) -> np.ndarray:
        A = self.source
        cols = [self._path_image(pth.arrows, a) for pth in A.hom_basis(a, b)]
        d = self.target.hom_dim(self(a), self(b))
        M = np.stack(cols, axis=1) if cols else ef.zeros(d, 0)
        M = np.ascontiguousarray(M % self.p, dtype=np.int64)
        M.setflags(write=False)
        return M

    def apply(self, f: Morphism) -> Morphism:
        M = self.hom_matrix(f.source, f.target)
        v = ef.matmul(M, np.asarray(f.coords, dtype=np.int64).reshape(-1, 1), self.p)[:, 0]
        return Morphism(self(f.source), self(f.target), v)

    def generator_images(self) -> dict[str, Morphism]:
        return {g.name: self.apply(Morphism(g.source, g.target, g.coords)) for g in self.source.generators()}

    def fiber(self, x: str) -> list[str]:
        return [a for a in self.source.objects if self(a) == x]

    def fibers(self) -> dict[str, list[str]]:
        return {x: self.fiber(x) for x in self.target.objects}

    def then(self, other: "LinearFunctor") -> "LinearFunctor":
        """The composite ``other∘self``."""
        if other.source is not self.target:
            raise FunctorError("functors do not compose")
        obj = {a: other(self(a)) for a in self.source.objects}
        if isinstance(self.source, BoundCategory):
            imgs = {name: other.apply(m) for name, m in self.arrow_images.items()}
            return LinearFunctor(self.source, other.target, obj, arrow_images=imgs)
        homs = {
            (a, b): ef.matmul(other.hom_matrix(self(a), self(b)), self.hom_matrix(a, b), self.p)
            for a in self.source.objects for b in self.source.objects
        }
        return LinearFunctor(self.source, other.target, obj, hom_matrices=homs)

    def same_as(self, other: "LinearFunctor") -> bool:
        if self.object_map != other.object_map:
            return False
        return all(
            np.array_equal(self.hom_matrix(a, b), other.hom_matrix(a, b))
            for a in self.source.objects for b in self.source.objects
        )

    @classmethod
    def identity(cls, cat: LinearCategory) -> "LinearFunctor":
        obj = {a: a for a in cat.objects}
        if isinstance(cat, BoundCategory):
            return cls(cat, cat, obj, arrow_images={a.name: cat.arrow_morphism(a.name) for a in cat.quiver.arrows})
        return cls(cat, cat, obj, hom_matrices={(a, b): ef.identity(cat.hom_dim(a, b))
                                                for a in cat.objects for b in cat.objects})


@dataclass
class FunctorReport:
    well_defined: bool
    radical_preserving: bool
    witness: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.well_defined and self.radical_preserving


def check_functor(F: LinearFunctor) -> FunctorReport:
    """Relations and truncation products must vanish; arrow images must be radical."""
    A, B, p = F.source, F.target, F.p
    if isinstance(A, BoundCategory):
        for name, img in F.arrow_images.items():
            x = img.source
            if x == img.target and img.coords[B.identity_index(x)] % p:
                return FunctorReport(True, False, {"arrow": name, "reason": "image has an identity component"})
        for k, rel in enumerate(A.relations):
            acc = np.zeros(B.hom_dim(F(rel.source), F(rel.target)), dtype=np.int64)
            for c, arrows in rel.terms:
                acc = (acc + c * F._path_image(arrows, rel.source)) % p
            if acc.any():
                return FunctorReport(False, True, {
                    "relation": k,
                    "relation_terms": [[c, [A.quiver.arrows[i].name for i in arr]] for c, arr in rel.terms],
                    "image": acc.tolist(),
                })
        for a in A.objects:
            for pth in A.quiver.paths_from(a, A.n):
                if len(pth) == A.n:
                    img = F._path_image(pth.arrows, a)
                    if img.any():
                        return FunctorReport(False, True, {
                            "truncation_path": A.quiver.path_names(pth),
                            "image": img.tolist(),
                        })
        for (a, b), M in F._given.items():
            if not np.array_equal(M, F._induced_hom(a, b)):
                return FunctorReport(False, True, {"pair": [a, b], "reason": "hom matrix differs from the one induced by arrows"})
        return FunctorReport(True, True)
    objs = A.objects
    for a in objs:
        if not np.array_equal(F.apply(A.identity(a)).coords, B.identity(F(a)).coords):
            return FunctorReport(False, True, {"identity": a})
    for a in objs:
        for b in objs:
            for c in objs:
                T = A.mult(a, b, c)
                if 0 in T.shape:
                    continue
                Mab, Mbc, Mac = F.hom_matrix(a, b), F.hom_matrix(b, c), F.hom_matrix(a, c)
                TB = B.mult(F(a), F(b), F(c))
                left = np.einsum("ijk,lk->ijl", T, Mac) % p
                right = np.einsum("xi,yj,xyl->ijl", Mab, Mbc, TB) % p
                if not np.array_equal(left, right):
                    return FunctorReport(False, True, {"triple": [a, b, c]})
    return FunctorReport(True, True)


# coverings ---------------------------------------------------------------------------


@dataclass
class CoveringCertificate:
    functor: LinearFunctor
    fibers: dict[str, list[str]]
    out_matrices: dict[tuple[str, str], np.ndarray]
    out_inverses: dict[tuple[str, str], np.ndarray]
    in_matrices: dict[tuple[str, str], np.ndarray]
    in_inverses: dict[tuple[str, str], np.ndarray]

    @property
    def source(self) -> LinearCategory:
        return self.functor.source

    @property
    def target(self) -> LinearCategory:
        return self.functor.target

    def to_json(self) -> dict:
        return {
            "fibers": self.fibers,
            "out_inverses": {f"{a}|{j}": M.tolist() for (a, j), M in self.out_inverses.items()},
            "in_inverses": {f"{i}|{b}": M.tolist() for (i, b), M in self.in_inverses.items()},
        }


def check_covering(F: LinearFunctor) -> CoveringCertificate:
    """Verify both covering bijections; raises :class:`NotCoveringError` with a witness."""
    A, B, p = F.source, F.target, F.p
    fibers = F.fibers()
    empty = [x for x, fib in fibers.items() if not fib]
    if empty:
        raise NotCoveringError("functor is not onto on objects", {"missed_objects": empty})
    out_m, out_i, in_m, in_i = {}, {}, {}, {}
    for a in A.objects:
        for j in B.objects:
            blocks = [F.hom_matrix(a, b) for b in fibers[j]]
            M = np.concatenate(blocks, axis=1)
            key = (a, j)
            out_m[key] = M
            out_i[key] = _invert_or_raise(M, p, {"direction": "out", "object": a, "target_object": j})
    for b in A.objects:
        for i in B.objects:
            blocks = [F.hom_matrix(a, b) for a in fibers[i]]
            M = np.concatenate(blocks, axis=1)
            key = (i, b)
            in_m[key] = M
            in_i[key] = _invert_or_raise(M, p, {"direction": "in", "object": b, "source_object": i})
    return CoveringCertificate(F, fibers, out_m, out_i, in_m, in_i)


def _invert_or_raise(M: np.ndarray, p: int, where: dict) -> np.ndarray:
    if M.shape[0] != M.shape[1]:
        raise NotCoveringError("covering map between spaces of different dimension",
                               {**where, "dims": [int(M.shape[1]), int(M.shape[0])]})
    try:
        return ef.invert(M, p)
    except ef.SingularMatrixError:
        raise NotCoveringError("covering map is singular", {**where, "rank": ef.rank(M, p)}) from None


def is_covering(F: LinearFunctor) -> bool:
    try:
        check_covering(F)
    except NotCoveringError:
        return False
    return True


@dataclass
class LiftFamily:
    direction: str  # "out" (anchored at a source object) or "in" (anchored at a target object)
    base: Morphism
    anchor: str
    components: dict[str, Morphism]

    def to_json(self, cat: LinearCategory) -> dict:
        return {
            "direction": self.direction,
            "anchor": self.anchor,
            "components": {x: _labelled(cat, m) for x, m in self.components.items()},
        }


def _labelled(cat: LinearCategory, m: Morphism) -> dict:
    labels = cat.hom_labels(m.source, m.target)
    p = cat.p
    terms = {lab: _signed(int(c), p) for lab, c in zip(labels, m.coords) if c}
    return {"source": m.source, "target": m.target, "terms": terms}


def _signed(c: int, p: int) -> int:
    return c - p if c > p // 2 else c


def lift(cert: CoveringCertificate, f: Morphism, anchor: str, direction: str = "out") -> LiftFamily:
    """Components of the unique preimage of ``f`` under a covering bijection.

    ``direction="out"``: anchor ``a`` over ``f.source``; components ``a -> b'``
    for ``b'`` over ``f.target``.  ``direction="in"``: anchor ``b`` over
    ``f.target``; components ``a' -> b`` for ``a'`` over ``f.source``.
    """
    F, A, p = cert.functor, cert.source, cert.functor.p
    v = np.asarray(f.coords, dtype=np.int64).reshape(-1, 1)
    if direction == "out":
        if anchor not in A.objects or F(anchor) != f.source:
            raise NotCoveringError(f"anchor {anchor} does not lie over {f.source}")
        x = ef.matmul(cert.out_inverses[(anchor, f.target)], v, p)[:, 0]
        comps, off = {}, 0
        for b in cert.fibers[f.target]:
            d = A.hom_dim(anchor, b)
            comps[b] = Morphism(anchor, b, x[off:off + d].copy())
            off += d
    elif direction == "in":
        if anchor not in A.objects or F(anchor) != f.target:
            raise NotCoveringError(f"anchor {anchor} does not lie over {f.target}")
        x = ef.matmul(cert.in_inverses[(f.source, anchor)], v, p)[:, 0]
        comps, off = {}, 0
        for a in cert.fibers[f.source]:
            d = A.hom_dim(a, anchor)
            comps[a] = Morphism(a, anchor, x[off:off + d].copy())
            off += d
    else:
        raise ValueError("direction must be 'out' or 'in'")
    return LiftFamily(direction, f, anchor, comps)


def out_component_matrix(cert: CoveringCertificate, a: str, b: str) -> np.ndarray:
    """Matrix of ``f ↦ (out-lift of f at a)_b`` from ``B(Fa, Fb)`` to ``A(a, b)``."""
    F = cert.functor
    j = F(b)
    off = sum(cert.source.hom_dim(a, x) for x in cert.fibers[j][: cert.fibers[j].index(b)])
    d = cert.source.hom_dim(a, b)
    return cert.out_inverses[(a, j)][off:off + d]


def in_component_matrix(cert: CoveringCertificate, a: str, b: str) -> np.ndarray:
    """Matrix of ``f ↦ (in-lift of f at b)_a`` from ``B(Fa, Fb)`` to ``A(a, b)``."""
    F = cert.functor
    i = F(a)
    off = sum(cert.source.hom_dim(x, b) for x in cert.fibers[i][: cert.fibers[i].index(a)])
    d = cert.source.hom_dim(a, b)
    return cert.in_inverses[(i, b)][off:off + d]


@dataclass
class BalanceReport:
    balanced: bool
    failures: list[dict]

    @property
    def witness(self) -> dict | None:
        return self.failures[0] if self.failures else None


def check_balanced(cert: CoveringCertificate) -> BalanceReport:
    """Compare out- and in-lift components on every basis element of every ``B(Fa, Fb)``."""
    A, B, F = cert.source, cert.target, cert.functor
    failures = []
    for a in A.objects:
        for b in A.objects:
            lo = out_component_matrix(cert, a, b)
            li = in_component_matrix(cert, a, b)
            if np.array_equal(lo, li):
                continue
            labels = B.hom_labels(F(a), F(b))
            for k in range(lo.shape[1]):
                if not np.array_equal(lo[:, k], li[:, k]):
                    failures.append({
                        "a": a,
                        "b": b,
                        "f": labels[k],
                        "out_component": _labelled(A, Morphism(a, b, lo[:, k]))["terms"],
                        "in_component": _labelled(A, Morphism(a, b, li[:, k]))["terms"],
                    })
    return BalanceReport(not failures, failures)


class DisconnectedTargetError(ValueError):
    def __init__(self, per_component: list[dict]):
        super().__init__("order is undefined over a disconnected target")
        self.per_component = per_component


def covering_order(cert: CoveringCertificate) -> int:
    """Common fiber size; checks ``ord * |B_0| = |A_0|``."""
    B = cert.target
    sizes = {x: len(v) for x, v in cert.fibers.items()}
    if not B.is_connected():
        comps = B.connected_components()
        raise DisconnectedTargetError([
            {"component": comp, "fiber_sizes": sorted({sizes[x] for x in comp})} for comp in comps
        ])
    values = set(sizes.values())
    if len(values) != 1:
        raise AssertionError(f"fibers over a connected target have sizes {sizes}")
    order = values.pop()
    assert order * len(B.objects) == len(cert.source.objects)
    return order


# quiver maps -------------------------------------------------------------------------


@dataclass
class QuiverMap:
    """A morphism of quivers ``source -> target`` (vertices to vertices, arrows to arrows)."""

    source: Quiver
    target: Quiver
    vertex_map: dict[str, str]
    arrow_map: dict[str, str]

    def __post_init__(self):
        for v in self.source.vertices:
            if self.vertex_map.get(v) not in self.target.vertex_index:
                raise CategoryError(f"vertex {v} has no valid image")
        for a in self.source.arrows:
            img = self.arrow_map.get(a.name)
            if img not in self.target.arrow_index:
                raise CategoryError(f"arrow {a.name} has no valid image")
            t = self.target.arrow(img)
            if (self.vertex_map[a.source], self.vertex_map[a.target]) != (t.source, t.target):
                raise CategoryError(f"arrow {a.name} -> {img} does not respect endpoints")


@dataclass
class QuiverMapReport:
    covering: bool
    witness: dict = field(default_factory=dict)


def check_quiver_covering_map(q: QuiverMap) -> QuiverMapReport:
    """Onto, and bijective on the out- and in-stars of every vertex."""
    missed = [v for v in q.target.vertices if v not in set(q.vertex_map.values())]
    if missed:
        return QuiverMapReport(False, {"reason": "not onto vertices", "vertices": missed})
    for v in q.source.vertices:
        x = q.vertex_map[v]
        for kind, up, down in (
            ("out", q.source.out_arrows(v), q.target.out_arrows(x)),
            ("in", q.source.in_arrows(v), q.target.in_arrows(x)),
        ):
            images = sorted(q.target.arrow_index[q.arrow_map[q.source.arrows[i].name]] for i in up)
            if images != sorted(down):
                return QuiverMapReport(False, {
                    "vertex": v,
                    "star": kind,
                    "upstairs": [q.source.arrows[i].name for i in up],
                    "downstairs": [q.target.arrows[i].name for i in down],
                })
    return QuiverMapReport(True)


@dataclass
class AdmissibilityReport:
    admissible: bool
    witness: dict = field(default_factory=dict)


def induced_functor(q: QuiverMap, A: BoundCategory, B: BoundCategory) -> tuple[LinearFunctor, AdmissibilityReport]:
    """The functor ``A -> B`` sending each arrow to the class of its image arrow.

    ``A`` is presented over ``q.source`` and ``B`` over ``q.target``.  The
    report states whether the relation spaces (with their truncations) match
    fiberwise, in both directions.
    """
    if A.quiver is not q.source and A.quiver.vertices != q.source.vertices:
        raise CategoryError("A is not presented over the source quiver")
    rep = check_quiver_covering_map(q)
    if not rep.covering:
        raise CategoryError(f"not a covering map of quivers: {rep.witness}")
    images = {a.name: B.arrow_morphism(q.arrow_map[a.name]) for a in A.quiver.arrows}
    F = LinearFunctor(A, B, q.vertex_map, arrow_images=images)
    return F, _admissibility(q, A, B)


def _admissibility(q: QuiverMap, A: BoundCategory, B: BoundCategory) -> AdmissibilityReport:
    p = A.p
    N = max(A.n, B.n)
    idA = A.ideal_vectors(max_len=N, include_truncation=True)
    idB = B.ideal_vectors(max_len=N, include_truncation=True)
    pathsB = {i: [pth for pth in B.quiver.paths_from(i, N - 1)] for i in B.objects}
    fiber: dict[str, list[str]] = {}
    for v in A.objects:
        fiber.setdefault(q.vertex_map[v], []).append(v)
    arrow_img = [B.quiver.arrow_index[q.arrow_map[a.name]] for a in A.quiver.arrows]

    def down(arrows):
        return tuple(arrow_img[i] for i in arrows)

    def span_rank(vectors, pos):
        M = ef.zeros(len(vectors), len(pos))
        for r, vec in enumerate(vectors):
            for arr, c in vec.items():
                M[r, pos[arr]] = (M[r, pos[arr]] + c) % p
        return M

    for i in B.objects:
        for j in B.objects:
            pos = {pth.arrows: k for k, pth in enumerate(x for x in pathsB[i] if x.target == j)}
            if not pos:
                continue
            MB = span_rank(idB[(i, j)], pos)
            rB = ef.rank(MB, p) if MB.size else 0
            for mode in ("out", "in"):
                anchors = fiber.get(i if mode == "out" else j, [])
                for anchor in anchors:
                    vecs = []
                    for other in fiber.get(j if mode == "out" else i, []):
                        key = (anchor, other) if mode == "out" else (other, anchor)
                        for vec in idA[key]:
                            vecs.append({down(arr): c for arr, c in vec.items()})
                    MA = span_rank(vecs, pos)
                    rA = ef.rank(MA, p) if MA.size else 0
                    both = ef.rank(np.concatenate([MA, MB]), p) if (MA.size or MB.size) else 0
                    if not (rA == rB == both):
                        return AdmissibilityReport(False, {
                            "pair": [i, j], "anchor": anchor, "direction": mode,
                            "upstairs_rank": rA, "downstairs_rank": rB, "joint_rank": both,
                        })
    return AdmissibilityReport(True)


__all__ = [
    "AdmissibilityReport",
    "BalanceReport",
    "CoveringCertificate",
    "DisconnectedTargetError",
    "FunctorError",
    "FunctorReport",
    "LiftFamily",
    "LinearFunctor",
    "NotCoveringError",
    "QuiverMap",
    "QuiverMapReport",
    "check_balanced",
    "check_covering",
    "check_functor",
    "check_quiver_covering_map",
    "check_schurian",
    "covering_order",
    "in_component_matrix",
    "induced_functor",
    "is_covering",
    "lift",
    "out_component_matrix",
]
