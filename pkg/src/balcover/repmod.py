"""Finite-dimensional representations of a linear category and their morphisms.

A representation stores one matrix per generator of its category (the arrows,
for a quiver-presented category).  Matrices act on column vectors, so
``X.mats[alpha]`` has shape ``(dim X(target), dim X(source))`` and
``evaluate(X, g∘f) == X(g) @ X(f)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import exactfield as ef
from .quivercat import BoundCategory, LinearCategory, Morphism


class RepresentationError(ValueError):
    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class Representation:
    def __init__(self, category: LinearCategory, dims: Mapping[str, int],
                 mats: Mapping[str, np.ndarray] | None = None, check: bool = True, name: str = ""):
        self.category = category
        self.p = category.p
        self.name = name
        self.dims = {a: int(dims.get(a, 0)) for a in category.objects}
        if any(d < 0 for d in self.dims.values()):
            raise RepresentationError("dimensions must be non-negative")
        unknown = set(dims) - set(category.objects)
        if unknown:
            raise RepresentationError(f"unknown vertices {sorted(unknown)}")
        mats = dict(mats or {})
        self.gens = category.generators()
        gen_names = {g.name for g in self.gens}
        extra = set(mats) - gen_names
        if extra:
            raise RepresentationError(f"matrices for unknown arrows {sorted(extra)}")
        self.mats: dict[str, np.ndarray] = {}
        for g in self.gens:
            shape = (self.dims[g.target], self.dims[g.source])
            M = mats.get(g.name)
            M = ef.zeros(*shape) if M is None else ef.as_matrix(M, self.p, shape)
            if M.shape != shape:
                raise RepresentationError(f"matrix of {g.name} has shape {M.shape}, expected {shape}")
            M.setflags(write=False)
            self.mats[g.name] = M
        self._action: dict[tuple[str, str], list[np.ndarray]] = {}
        if check:
            self.validate()

    # basic data -----------------------------------------------------------------------

    def dim(self, a: str) -> int:
        return self.dims[a]

    def dim_vector(self) -> tuple[int, ...]:
        return tuple(self.dims[a] for a in self.category.objects)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def offsets(self) -> dict[str, int]:
        out, off = {}, 0
        for a in self.category.objects:
            out[a] = off
            off += self.dims[a]
        return out

    def __repr__(self) -> str:
        return f"Representation(dims={self.dim_vector()})"

    # evaluation ------------------------------------------------------------------------

    def basis_action(self, a: str, b: str) -> list[np.ndarray]:
        """``X(basis_k)`` for every basis element of ``Hom(a, b)``."""
        key = (a, b)
        acts = self._action.get(key)
        if acts is None:
            cat = self.category
            if isinstance(cat, BoundCategory):
                arrows = cat.quiver.arrows
                acts = []
                for pth in cat.hom_basis(a, b):
                    M = ef.identity(self.dims[a])
                    for i in pth.arrows:
                        M = ef.matmul(self.mats[arrows[i].name], M, self.p)
                    acts.append(M)
            else:
                acts = [None] * cat.hom_dim(a, b)
                for g in self.gens:
                    if (g.source, g.target) == key:
                        acts[int(np.flatnonzero(g.coords)[0])] = self.mats[g.name]
                if a == b:
                    acts[cat.identity_index(a)] = ef.identity(self.dims[a])
            self._action[key] = acts
        return acts

    def evaluate(self, f: Morphism) -> np.ndarray:
        acc = ef.zeros(self.dims[f.target], self.dims[f.source])
        for c, M in zip(f.coords, self.basis_action(f.source, f.target)):
            if c:
                acc = (acc + int(c) * M) % self.p
        return acc

    def _path_matrix(self, arrows: tuple[int, ...], source: str) -> np.ndarray:
        cat = self.category
        M = ef.identity(self.dims[source])
        for i in arrows:
            M = ef.matmul(self.mats[cat.quiver.arrows[i].name], M, self.p)
        return M

    def validate(self) -> None:
        cat, p = self.category, self.p
        if isinstance(cat, BoundCategory):
            for k, rel in enumerate(cat.relations):
                acc = ef.zeros(self.dims[rel.target], self.dims[rel.source])
                for c, arrows in rel.terms:
                    acc = (acc + c * self._path_matrix(arrows, rel.source)) % p
                if acc.any():
                    raise RepresentationError(f"relation {k} does not vanish", {"relation": k})
            for a in cat.objects:
                if not self.dims[a]:
                    continue
                for pth in cat.quiver.paths_from(a, cat.n):
                    if len(pth) == cat.n and self._path_matrix(pth.arrows, a).any():
                        raise RepresentationError("a path of the nilpotency length acts nonzero",
                                                  {"path": cat.quiver.path_names(pth)})
            return
        objs = cat.objects
        for a in objs:
            for b in objs:
                for c in objs:
                    T = cat.mult(a, b, c)
                    if 0 in T.shape or not (self.dims[a] and self.dims[c]):
                        continue
                    Xab, Xbc, Xac = self.basis_action(a, b), self.basis_action(b, c), self.basis_action(a, c)
                    for i, f in enumerate(Xab):
                        for j, g in enumerate(Xbc):
                            want = ef.zeros(self.dims[c], self.dims[a])
                            for k in np.flatnonzero(T[i, j]):
                                want = (want + int(T[i, j, k]) * Xac[k]) % p
                            if not np.array_equal(ef.matmul(g, f, p), want):
                                raise RepresentationError("representation is not multiplicative",
                                                          {"triple": [a, b, c], "pair": [i, j]})

    def to_json(self) -> dict:
        return {
            "dims": dict(self.dims),
            "matrices": {g: M.tolist() for g, M in self.mats.items() if M.size},
        }

    def same_as(self, other: "Representation") -> bool:
        return self.dims == other.dims and all(np.array_equal(self.mats[g], other.mats[g]) for g in self.mats)


@dataclass
class RepMorphism:
    source: Representation
    target: Representation
    maps: dict[str, np.ndarray]

    @property
    def p(self) -> int:
        return self.source.p

    def is_morphism(self) -> bool:
        X, Y, p = self.source, self.target, self.p
        for g in X.gens:
            left = ef.matmul(self.maps[g.target], X.mats[g.name], p)
            right = ef.matmul(Y.mats[g.name], self.maps[g.source], p)
            if not np.array_equal(left, right):
                return False
        return True

    def then(self, other: "RepMorphism") -> "RepMorphism":
        """``other∘self``."""
        return RepMorphism(self.source, other.target,
                           {a: ef.matmul(other.maps[a], self.maps[a], self.p) for a in self.maps})

    def add(self, other: "RepMorphism", scale: int = 1) -> "RepMorphism":
        return RepMorphism(self.source, self.target,
                           {a: (self.maps[a] + scale * other.maps[a]) % self.p for a in self.maps})

    def scale(self, c: int) -> "RepMorphism":
        return RepMorphism(self.source, self.target, {a: (int(c) * M) % self.p for a, M in self.maps.items()})

    def is_iso(self) -> bool:
        return all(ef.is_invertible(M, self.p) for M in self.maps.values())

    def is_identity(self) -> bool:
        return all(np.array_equal(M, ef.identity(M.shape[0])) for M in self.maps.values()) and \
            self.source.dims == self.target.dims

    def inverse(self) -> "RepMorphism":
        return RepMorphism(self.target, self.source, {a: ef.invert(M, self.p) for a, M in self.maps.items()})

    def block(self) -> np.ndarray:
        """Block-diagonal matrix over all vertices."""
        objs = self.source.category.objects
        return ef.block_diag([self.maps[a] for a in objs])

    def equals(self, other: "RepMorphism") -> bool:
        return all(np.array_equal(self.maps[a], other.maps[a]) for a in self.maps)


def identity_morphism(X: Representation) -> RepMorphism:
    return RepMorphism(X, X, {a: ef.identity(d) for a, d in X.dims.items()})


def zero_morphism(X: Representation, Y: Representation) -> RepMorphism:
    return RepMorphism(X, Y, {a: ef.zeros(Y.dims[a], X.dims[a]) for a in X.dims})


def evaluate(X: Representation, f: Morphism) -> np.ndarray:
    return X.evaluate(f)


def from_block(X: Representation, Y: Representation, M: np.ndarray) -> RepMorphism:
    """Split a block-diagonal matrix into vertex components."""
    ox, oy = X.offsets(), Y.offsets()
    return RepMorphism(X, Y, {
        a: np.ascontiguousarray(M[oy[a]:oy[a] + Y.dims[a], ox[a]:ox[a] + X.dims[a]])
        for a in X.category.objects
    })


# hom spaces ------------------------------------------------------------------------------


def _hom_system(X: Representation, Y: Representation) -> tuple[np.ndarray, dict[str, int]]:
    """Matrix whose kernel is Hom(X, Y), in row-major vectorised vertex components."""
    p = X.p
    objs = X.category.objects
    off, n = {}, 0
    for a in objs:
        off[a] = n
        n += Y.dims[a] * X.dims[a]
    rows = []
    for g in X.gens:
        s, t = g.source, g.target
        m = Y.dims[t] * X.dims[s]
        if not m:
            continue
        block = ef.zeros(m, n)
        # u_t X(g) - Y(g) u_s = 0
        if Y.dims[t] * X.dims[t]:
            block[:, off[t]:off[t] + Y.dims[t] * X.dims[t]] = np.kron(ef.identity(Y.dims[t]), X.mats[g.name].T)
        if Y.dims[s] * X.dims[s]:
            sub = np.kron(Y.mats[g.name], ef.identity(X.dims[s]))
            cols = slice(off[s], off[s] + Y.dims[s] * X.dims[s])
            block[:, cols] = (block[:, cols] - sub) % p
        rows.append(block % p)
    A = np.concatenate(rows, axis=0) if rows else ef.zeros(0, n)
    return A, off


def _unvec(X: Representation, Y: Representation, off: dict[str, int], v: np.ndarray) -> RepMorphism:
    maps = {}
    for a in X.category.objects:
        m = Y.dims[a] * X.dims[a]
        maps[a] = np.ascontiguousarray(v[off[a]:off[a] + m].reshape(Y.dims[a], X.dims[a]))
    return RepMorphism(X, Y, maps)


def _vec(u: RepMorphism) -> np.ndarray:
    return np.concatenate([u.maps[a].reshape(-1) for a in u.source.category.objects]) \
        if u.source.category.objects else ef.zeros(0, 0)[0]


def hom_space(X: Representation, Y: Representation) -> list[RepMorphism]:
    """A basis of Hom(X, Y) as a list of module morphisms."""
    if X.category is not Y.category:
        raise RepresentationError("representations over different categories")
    A, off = _hom_system(X, Y)
    n = A.shape[1]
    K = ef.kernel_basis(A, X.p) if A.shape[0] else ef.identity(n)
    return [_unvec(X, Y, off, K[:, k]) for k in range(K.shape[1])]


def hom_dim(X: Representation, Y: Representation) -> int:
    return len(hom_space(X, Y))


def combine(basis: Sequence[RepMorphism], coeffs, X: Representation, Y: Representation) -> RepMorphism:
    out = zero_morphism(X, Y)
    for c, u in zip(coeffs, basis):
        if c:
            out = out.add(u, int(c))
    return out


# standard representations ------------------------------------------------------------------


def zero_rep(cat: LinearCategory) -> Representation:
    return Representation(cat, {a: 0 for a in cat.objects})


def simple_rep(cat: LinearCategory, a: str) -> Representation:
    return Representation(cat, {x: int(x == a) for x in cat.objects})


def projective_rep(cat: LinearCategory, a: str) -> Representation:
    """``P_a = Hom(a, -)`` with generators acting by post-composition."""
    dims = {x: cat.hom_dim(a, x) for x in cat.objects}
    mats = {}
    for g in cat.generators():
        mats[g.name] = cat.post_matrix(a, Morphism(g.source, g.target, g.coords))
    return Representation(cat, dims, mats, name=f"P_{a}")


def injective_rep(cat: LinearCategory, b: str) -> Representation:
    """``I_b = D Hom(-, b)``: the transpose of pre-composition in dual bases."""
    dims = {x: cat.hom_dim(x, b) for x in cat.objects}
    mats = {}
    for g in cat.generators():
        pre = cat.pre_matrix(Morphism(g.source, g.target, g.coords), b)
        mats[g.name] = pre.T.copy()
    return Representation(cat, dims, mats, name=f"I_{b}")


def direct_sum(*reps: Representation) -> Representation:
    if not reps:
        raise RepresentationError("empty direct sum")
    cat = reps[0].category
    dims = {a: sum(X.dims[a] for X in reps) for a in cat.objects}
    mats = {g.name: ef.block_diag([X.mats[g.name] for X in reps]) for g in reps[0].gens}
    return Representation(cat, dims, mats, check=False)


def sum_injections(reps: Sequence[Representation], total: Representation) -> list[RepMorphism]:
    out, offs = [], {a: 0 for a in total.dims}
    for X in reps:
        maps = {}
        for a in total.dims:
            M = ef.zeros(total.dims[a], X.dims[a])
            M[offs[a]:offs[a] + X.dims[a]] = ef.identity(X.dims[a])
            maps[a] = M
            offs[a] += X.dims[a]
        out.append(RepMorphism(X, total, maps))
    return out


def sum_projections(reps: Sequence[Representation], total: Representation) -> list[RepMorphism]:
    return [RepMorphism(total, X, {a: M.T.copy() for a, M in inj.maps.items()})
            for X, inj in zip(reps, sum_injections(reps, total))]


def power(X: Representation, m: int) -> Representation:
    return direct_sum(*([X] * m)) if m else zero_rep(X.category)


# sub- and quotient representations ----------------------------------------------------------


def submodule_generated(X: Representation, vectors: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Column bases, per vertex, of the smallest subrepresentation containing ``vectors``."""
    p = X.p
    spaces = {}
    for a in X.category.objects:
        v = vectors.get(a)
        V = ef.zeros(X.dims[a], 0) if v is None else np.asarray(v, dtype=np.int64).reshape(X.dims[a], -1)
        spaces[a] = ef.image_basis(V, p) if V.shape[1] else V
    changed = True
    while changed:
        changed = False
        for g in X.gens:
            s, t = g.source, g.target
            if not spaces[s].shape[1]:
                continue
            img = ef.matmul(X.mats[g.name], spaces[s], p)
            both = np.concatenate([spaces[t], img], axis=1)
            new = ef.image_basis(both, p)
            if new.shape[1] > spaces[t].shape[1]:
                spaces[t] = new
                changed = True
    return spaces


def subrepresentation(X: Representation, bases: Mapping[str, np.ndarray]) -> tuple[Representation, RepMorphism]:
    """The subrepresentation spanned by invariant column bases, with its inclusion."""
    p = X.p
    dims = {a: bases[a].shape[1] for a in X.category.objects}
    mats = {}
    for g in X.gens:
        U, V = bases[g.source], bases[g.target]
        img = ef.matmul(X.mats[g.name], U, p)
        if not dims[g.source]:
            mats[g.name] = ef.zeros(dims[g.target], 0)
            continue
        sol = ef.solve_linear(V, img, p)
        if sol is None:
            raise RepresentationError("subspaces are not invariant", {"arrow": g.name})
        mats[g.name] = sol.x
    S = Representation(X.category, dims, mats, check=False)
    return S, RepMorphism(S, X, {a: bases[a].copy() for a in X.category.objects})


def quotient(X: Representation, bases: Mapping[str, np.ndarray]) -> tuple[Representation, RepMorphism]:
    """``X / U`` for an invariant subspace family ``U`` with the projection."""
    p = X.p
    comp, proj = {}, {}
    for a in X.category.objects:
        U = bases[a]
        C = ef.complement_basis(U, X.dims[a], p)
        full = np.concatenate([U, C], axis=1)
        inv = ef.invert(full, p)
        comp[a] = C
        proj[a] = np.ascontiguousarray(inv[U.shape[1]:])
    dims = {a: comp[a].shape[1] for a in X.category.objects}
    mats = {g.name: ef.chain([proj[g.target], X.mats[g.name], comp[g.source]], p) if dims[g.source] and
            dims[g.target] else ef.zeros(dims[g.target], dims[g.source]) for g in X.gens}
    Q = Representation(X.category, dims, mats, check=False)
    return Q, RepMorphism(X, Q, proj)


def radical(X: Representation) -> tuple[Representation, RepMorphism]:
    """``rad X``: at each vertex the sum of images of generators ending there."""
    p = X.p
    spans = {a: ef.zeros(X.dims[a], 0) for a in X.category.objects}
    for g in X.gens:
        if X.dims[g.source] and X.dims[g.target]:
            spans[g.target] = np.concatenate([spans[g.target], X.mats[g.name]], axis=1)
    bases = {a: ef.image_basis(M, p) if M.shape[1] else M for a, M in spans.items()}
    return subrepresentation(X, bases)


def top(X: Representation) -> tuple[Representation, RepMorphism]:
    R, inc = radical(X)
    return quotient(X, inc.maps)


def image(u: RepMorphism) -> tuple[Representation, RepMorphism]:
    p = u.p
    bases = {a: ef.image_basis(M, p) if M.size else ef.zeros(M.shape[0], 0) for a, M in u.maps.items()}
    return subrepresentation(u.target, bases)


def kernel(u: RepMorphism) -> tuple[Representation, RepMorphism]:
    p = u.p
    bases = {a: ef.kernel_basis(M, p) if M.shape[0] else ef.identity(M.shape[1]) for a, M in u.maps.items()}
    return subrepresentation(u.source, bases)


def change_basis(X: Representation, P: Mapping[str, np.ndarray]) -> tuple[Representation, RepMorphism]:
    """Conjugate ``X`` by invertible vertex matrices: ``Y(g) = P_t X(g) P_s^{-1}``."""
    p = X.p
    inv = {a: ef.invert(M, p) for a, M in P.items()}
    mats = {g.name: ef.chain([P[g.target], X.mats[g.name], inv[g.source]], p) for g in X.gens}
    Y = Representation(X.category, X.dims, mats, check=False)
    return Y, RepMorphism(X, Y, {a: np.asarray(M) % p for a, M in P.items()})


def random_invertible(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        M = rng.integers(0, p, size=(n, n), dtype=np.int64)
        if ef.is_invertible(M, p):
            return M


def random_representation(cat: LinearCategory, rng: np.random.Generator, max_dim: int = 6,
                          conjugate: bool = True) -> Representation:
    """A random quotient of a direct sum of one or two projectives.

    The total dimension is at most ``max_dim``; the result is conjugated by
    random vertex bases so that matrices are dense.
    """
    p = cat.p
    objs = cat.objects
    for _ in range(200):
        k = int(rng.integers(1, 3))
        ps = [projective_rep(cat, objs[int(rng.integers(len(objs)))]) for _ in range(k)]
        P = direct_sum(*ps)
        vectors = {}
        while True:
            U = submodule_generated(P, vectors)
            left = P.total_dim - sum(U[a].shape[1] for a in objs)
            if 0 < left <= max_dim:
                break
            if left == 0:
                vectors = None
                break
            a = objs[int(rng.integers(len(objs)))]
            if not P.dims[a]:
                continue
            v = rng.integers(0, p, size=(P.dims[a], 1), dtype=np.int64)
            old = vectors.get(a)
            vectors[a] = v if old is None else np.concatenate([old, v], axis=1)
        if vectors is None:
            continue
        Q, _ = quotient(P, U)
        if conjugate:
            Q, _ = change_basis(Q, {a: random_invertible(Q.dims[a], p, rng) for a in objs})
        Q.validate()
        return Q
    raise RuntimeError("could not sample a representation")
