"""Krull–Schmidt decomposition, isomorphism and direct-summand tests.

Endomorphism rings are handled as matrix algebras: an endomorphism of ``X`` is
the block-diagonal matrix of its vertex components.  The Jacobson radical is
computed with the p-power trace method of Cohen, Ivanyos and Wales, which
reduces to the kernel of the trace form when ``p`` exceeds the matrix size.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_gcdex, gf_mul, gf_pow, gf_quo, gf_rem

from . import exactfield as ef
from .repmod import (
    RepMorphism,
    Representation,
    combine,
    from_block,
    hom_space,
    identity_morphism,
    subrepresentation,
)


class KrullSchmidtError(RuntimeError):
    """Internal consistency failure (for example disagreeing summand tests)."""


# matrix algebras -------------------------------------------------------------------------


class MatrixAlgebra:
    """A unital subalgebra of ``M_m(F_p)`` given by a basis of matrices."""

    def __init__(self, basis: list[np.ndarray], p: int, size: int | None = None):
        self.p = p
        self.basis = [np.asarray(b, dtype=np.int64) % p for b in basis]
        self.size = size if size is not None else (self.basis[0].shape[0] if self.basis else 0)
        self._flat = (np.stack([b.reshape(-1) for b in self.basis], axis=1)
                      if self.basis else ef.zeros(self.size * self.size, 0))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def element(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=np.int64).reshape(-1, 1)
        return ef.matmul(self._flat, c, self.p).reshape(self.size, self.size)

    def coords(self, M: np.ndarray) -> np.ndarray:
        sol = ef.solve_linear(self._flat, np.asarray(M, dtype=np.int64).reshape(-1) % self.p, self.p)
        if sol is None:
            raise ValueError("matrix is not in the algebra")
        return sol.x

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return ef.matmul(x, y, self.p)

    def structure_constants(self) -> np.ndarray:
        """``C[i, j, k]``: coordinate ``k`` of ``basis_i · basis_j``."""
        d = self.dim
        C = np.zeros((d, d, d), dtype=np.int64)
        for i, x in enumerate(self.basis):
            for j, y in enumerate(self.basis):
                C[i, j] = self.coords(self.mul(x, y))
        return C

    def one(self) -> np.ndarray:
        return ef.identity(self.size)

    def power(self, x: np.ndarray, k: int) -> np.ndarray:
        out, base = self.one(), x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def is_commutative(self) -> bool:
        return all(np.array_equal(self.mul(x, y), self.mul(y, x))
                   for i, x in enumerate(self.basis) for y in self.basis[i + 1:])


def regular_algebra(C: np.ndarray, p: int) -> MatrixAlgebra:
    """The left regular representation of a unital algebra given by structure constants."""
    d = C.shape[0]
    # L(b_i)[k, j] = C[i, j, k]
    return MatrixAlgebra([np.ascontiguousarray(C[i].T) for i in range(d)], p, d)


def _span_coords(alg: MatrixAlgebra, rows: np.ndarray) -> list[np.ndarray]:
    return [alg.element(r) for r in rows]


def algebra_radical(alg: MatrixAlgebra) -> np.ndarray:
    """Coordinates (rows) of a basis of the Jacobson radical of ``alg``."""
    p, n, d = alg.p, alg.size, alg.dim
    if d == 0:
        return ef.zeros(0, 0)
    l = 0
    while p ** (l + 1) <= n:
        l += 1
    current = ef.identity(d)  # rows: coordinates of a basis of I_{i-1}
    for i in range(l + 1):
        if not current.shape[0]:
            break
        elems = _span_coords(alg, current)
        G = ef.zeros(len(elems), d)
        for s, a in enumerate(elems):
            for t, b in enumerate(alg.basis):
                G[s, t] = _g(alg.mul(a, b), i, p)
        K = ef.kernel_basis(G.T.copy(), p)  # combos c with sum_s c_s G[s, :] = 0
        current = ef.matmul(K.T.copy(), current, p) if K.shape[1] else ef.zeros(0, d)
        current = ef.row_space(current, p) if current.shape[0] else current
    return current


def _g(M: np.ndarray, i: int, p: int) -> int:
    """``(tr(M~^(p^i)) / p^i) mod p`` for the integer lift ``M~`` of ``M``."""
    if i == 0:
        return int(np.trace(M)) % p
    mod = p ** (i + 1)
    A = np.array(M, dtype=object) % mod
    R = np.eye(M.shape[0], dtype=object)
    e = p ** i
    while e:
        if e & 1:
            R = R.dot(A) % mod
        A = A.dot(A) % mod
        e >>= 1
    tr = int(np.trace(R)) % mod
    if tr % (p ** i):
        raise KrullSchmidtError("p-power trace not divisible; element outside the previous ideal")
    return (tr // p ** i) % p


def quotient_algebra(alg: MatrixAlgebra, rad: np.ndarray) -> tuple[MatrixAlgebra, np.ndarray, np.ndarray]:
    """``alg / rad`` as a regular matrix algebra.

    Returns ``(S, lift, project)``: ``lift`` has the complement coordinates as
    rows (so ``lift.T @ s`` lifts quotient coordinates ``s``) and ``project``
    maps algebra coordinates to quotient coordinates.
    """
    p, d = alg.p, alg.dim
    Rt = rad.T.copy() if rad.shape[0] else ef.zeros(d, 0)
    comp = ef.complement_basis(Rt, d, p)  # columns
    q = comp.shape[1]
    change = np.concatenate([comp, Rt], axis=1)
    inv = ef.invert(change, p)
    project = np.ascontiguousarray(inv[:q])
    C = np.zeros((q, q, q), dtype=np.int64)
    lifted = [alg.element(comp[:, k]) for k in range(q)]
    for i in range(q):
        for j in range(q):
            c = alg.coords(alg.mul(lifted[i], lifted[j]))
            C[i, j] = ef.matmul(project, c.reshape(-1, 1), p)[:, 0]
    return regular_algebra(C, p), comp.T.copy(), project


def center(alg: MatrixAlgebra) -> np.ndarray:
    """Coordinates (rows) of a basis of the center."""
    d, p = alg.dim, alg.p
    if d == 0:
        return ef.zeros(0, 0)
    blocks = []
    for b in alg.basis:
        cols = [(alg.mul(x, b) - alg.mul(b, x)).reshape(-1) % p for x in alg.basis]
        blocks.append(np.stack(cols, axis=1))
    K = ef.kernel_basis(np.concatenate(blocks, axis=0), p)
    return K.T.copy()


def berlekamp(alg: MatrixAlgebra, Z: np.ndarray) -> np.ndarray:
    """Coordinates of ``{z in span Z : z^p = z}`` for a commutative subalgebra ``Z``."""
    p = alg.p
    zs = [alg.element(r) for r in Z]
    sub = MatrixAlgebra(zs, p, alg.size)
    frob = np.stack([sub.coords(alg.power(z, p)) for z in zs], axis=1)
    K = ef.kernel_basis((frob - ef.identity(len(zs))) % p, p)
    return ef.matmul(K.T.copy(), Z, p) if K.shape[1] else ef.zeros(0, alg.dim)


# polynomials ---------------------------------------------------------------------------


def minimal_polynomial(alg: MatrixAlgebra, x: np.ndarray) -> list[int]:
    """Monic minimal polynomial, coefficients from the leading one down."""
    p = alg.p
    powers = [alg.one().reshape(-1)]
    cur = alg.one()
    while True:
        cur = alg.mul(cur, x)
        M = np.stack(powers, axis=1)
        sol = ef.solve_linear(M, cur.reshape(-1), p)
        if sol is not None:
            low = [int(c) for c in sol.x]
            return [1] + [(-c) % p for c in reversed(low)]
        powers.append(cur.reshape(-1))


def poly_eval(alg: MatrixAlgebra, coeffs: list[int], x: np.ndarray) -> np.ndarray:
    out = ef.zeros(alg.size, alg.size)
    for c in coeffs:
        out = (alg.mul(out, x) + int(c) * alg.one()) % alg.p
    return out


def idempotent_from_element(alg: MatrixAlgebra, x: np.ndarray) -> np.ndarray | None:
    """A nontrivial idempotent of ``F_p[x]`` by the Chinese remainder theorem, if one exists."""
    p = alg.p
    m = minimal_polynomial(alg, x)
    _, factors = gf_factor(m, p, ZZ)
    if len(factors) < 2:
        return None
    f1, e1 = factors[0]
    part = gf_pow(f1, e1, p, ZZ)
    rest = gf_quo(m, part, p, ZZ)
    s, t, h = gf_gcdex(rest, part, p, ZZ)  # s*rest + t*part = 1
    assert h == [1]
    u = gf_rem(gf_mul(s, rest, p, ZZ), m, p, ZZ)
    e = poly_eval(alg, u, x)
    assert np.array_equal(alg.mul(e, e), e)
    return e


def lift_idempotent(alg: MatrixAlgebra, e: np.ndarray, max_steps: int = 64) -> np.ndarray:
    """Iterate ``e <- 3e^2 - 2e^3`` until ``e`` is idempotent."""
    p = alg.p
    for _ in range(max_steps):
        e2 = alg.mul(e, e)
        if np.array_equal(e2, e):
            return e
        e3 = alg.mul(e2, e)
        e = (3 * e2 - 2 * e3) % p
    raise KrullSchmidtError("idempotent lifting did not converge")


# endomorphism rings ----------------------------------------------------------------------


@dataclass
class EndAlgebra:
    rep: Representation
    basis: list[RepMorphism]
    algebra: MatrixAlgebra

    @property
    def dim(self) -> int:
        return len(self.basis)

    def table(self) -> np.ndarray:
        return self.algebra.structure_constants()

    def to_morphism(self, M: np.ndarray) -> RepMorphism:
        return from_block(self.rep, self.rep, M)


def endomorphism_algebra(X: Representation) -> EndAlgebra:
    basis = hom_space(X, X)
    n = X.total_dim
    alg = MatrixAlgebra([u.block() for u in basis], X.p, n)
    return EndAlgebra(X, basis, alg)


@dataclass
class Certificate:
    end_dim: int
    radical_dim: int
    top_dim: int
    kind: str  # "local" (End/rad = F_p) or "field" (End/rad a field extension)

    def to_json(self) -> dict:
        return {"end_dim": self.end_dim, "radical_dim": self.radical_dim,
                "top_dim": self.top_dim, "kind": self.kind}


def _find_idempotent(alg: MatrixAlgebra, rad: np.ndarray, rng: np.random.Generator,
                     tries: int = 200) -> tuple[np.ndarray | None, int]:
    """A nontrivial idempotent of ``alg`` or ``None`` if ``alg / rad`` is a field."""
    p = alg.p
    S, lift, _ = quotient_algebra(alg, rad)
    q = S.dim
    if q == 1:
        return None, q
    e_bar = None
    Z = center(S)
    if Z.shape[0] >= 2:
        Bz = berlekamp(S, Z)
        if Bz.shape[0] >= 2:
            for row in Bz:
                z = S.element(row)
                e_bar = idempotent_from_element(S, z)
                if e_bar is not None:
                    break
    if e_bar is None:
        if Z.shape[0] == q:
            return None, q  # commutative and no splitting: a field
        for _ in range(tries):
            z = S.element(rng.integers(0, p, size=q))
            e_bar = idempotent_from_element(S, z)
            if e_bar is not None:
                break
        if e_bar is None:
            raise KrullSchmidtError("no idempotent found in a non-commutative semisimple quotient")
    # e_bar is a q x q regular matrix; its coordinates are its first column (action on the identity)
    one = S.coords(S.one())
    coords_bar = ef.matmul(e_bar, one.reshape(-1, 1), p)[:, 0]
    e0 = alg.element(ef.matmul(lift.T.copy(), coords_bar.reshape(-1, 1), p)[:, 0])
    e = lift_idempotent(alg, e0)
    if not e.any() or np.array_equal(e, alg.one()):
        raise KrullSchmidtError("lifted idempotent is trivial")
    return e, q


@dataclass
class Component:
    rep: Representation
    inclusion: RepMorphism  # rep -> X
    projection: RepMorphism  # X -> rep
    certificate: Certificate


@dataclass
class Decomposition:
    rep: Representation
    components: list[Component]
    classes: list[tuple[Representation, int]] = field(default_factory=list)
    class_of: list[int] = field(default_factory=list)

    def dims_multiset(self) -> list[tuple[tuple[int, ...], int]]:
        return [(Y.dim_vector(), m) for Y, m in self.classes]

    def to_sum(self) -> dict[str, np.ndarray]:
        """Vertex components of ``X -> ⊕ Y_k``."""
        return {a: np.concatenate([c.projection.maps[a] for c in self.components], axis=0)
                if self.components else ef.zeros(0, self.rep.dims[a]) for a in self.rep.category.objects}

    def from_sum(self) -> dict[str, np.ndarray]:
        return {a: np.concatenate([c.inclusion.maps[a] for c in self.components], axis=1)
                if self.components else ef.zeros(self.rep.dims[a], 0) for a in self.rep.category.objects}

    def verify(self) -> bool:
        p = self.rep.p
        to, fr = self.to_sum(), self.from_sum()
        for a in self.rep.category.objects:
            n = self.rep.dims[a]
            if not np.array_equal(ef.matmul(fr[a], to[a], p), ef.identity(n)):
                return False
            if not np.array_equal(ef.matmul(to[a], fr[a], p), ef.identity(to[a].shape[0])):
                return False
        return all(c.inclusion.is_morphism() and c.projection.is_morphism() for c in self.components)

    def to_json(self, witnesses: bool = False) -> dict:
        out = {
            "summands": [
                {"dims": dict(Y.dims), "multiplicity": m,
                 "certificate": self.components[self.class_of.index(k)].certificate.to_json()}
                for k, (Y, m) in enumerate(self.classes)
            ],
            "indecomposable": len(self.components) == 1,
            "total_dim": self.rep.total_dim,
        }
        if witnesses:
            out["components"] = [
                {"rep": c.rep.to_json(),
                 "inclusion": {a: M.tolist() for a, M in c.inclusion.maps.items()},
                 "projection": {a: M.tolist() for a, M in c.projection.maps.items()}}
                for c in self.components
            ]
        return out


def _split(X: Representation, rng: np.random.Generator) -> list[Component]:
    p = X.p
    if X.total_dim == 0:
        return []
    E = endomorphism_algebra(X)
    rad = algebra_radical(E.algebra)
    e, q = _find_idempotent(E.algebra, rad, rng)
    if e is None:
        cert = Certificate(E.dim, rad.shape[0], q, "local" if q == 1 else "field")
        return [Component(X, identity_morphism(X), identity_morphism(X), cert)]
    f = (E.algebra.one() - e) % p
    em, fm = E.to_morphism(e), E.to_morphism(f)
    ims = {}
    for a in X.category.objects:
        ims[a] = (ef.image_basis(em.maps[a], p) if X.dims[a] else ef.zeros(0, 0),
                  ef.image_basis(fm.maps[a], p) if X.dims[a] else ef.zeros(0, 0))
    Y1, i1 = subrepresentation(X, {a: _cols(u, X.dims[a]) for a, (u, _) in ims.items()})
    Y2, i2 = subrepresentation(X, {a: _cols(v, X.dims[a]) for a, (_, v) in ims.items()})
    p1, p2 = {}, {}
    for a in X.category.objects:
        U, V = i1.maps[a], i2.maps[a]
        inv = ef.invert(np.concatenate([U, V], axis=1), p)
        p1[a] = np.ascontiguousarray(inv[:U.shape[1]])
        p2[a] = np.ascontiguousarray(inv[U.shape[1]:])
    out = []
    for Y, inc, proj in ((Y1, i1, RepMorphism(X, Y1, p1)), (Y2, i2, RepMorphism(X, Y2, p2))):
        for c in _split(Y, rng):
            out.append(Component(c.rep, c.inclusion.then(inc), proj.then(c.projection), c.certificate))
    return out


def _cols(M: np.ndarray, n: int) -> np.ndarray:
    return M if M.shape[0] == n else ef.zeros(n, 0)


def _indecomposables_isomorphic(Y: Representation, Z: Representation) -> RepMorphism | None:
    """For indecomposable ``Y`` and ``Z``: an isomorphism among the Hom basis, if any."""
    if Y.dims != Z.dims:
        return None
    for u in hom_space(Y, Z):
        if u.is_iso():
            return u
    return None


def _group(components: list[Component]) -> tuple[list[tuple[Representation, int]], list[int]]:
    reps: list[Representation] = []
    counts: list[int] = []
    class_of = []
    for c in components:
        for k, Y in enumerate(reps):
            if _indecomposables_isomorphic(c.rep, Y) is not None:
                counts[k] += 1
                class_of.append(k)
                break
        else:
            reps.append(c.rep)
            counts.append(1)
            class_of.append(len(reps) - 1)
    order = sorted(range(len(reps)), key=lambda k: (reps[k].total_dim, reps[k].dim_vector(), k))
    rank = {k: r for r, k in enumerate(order)}
    return [(reps[k], counts[k]) for k in order], [rank[k] for k in class_of]


def decompose(X: Representation, seed: int = 0) -> Decomposition:
    rng = np.random.default_rng(seed)
    comps = _split(X, rng)
    classes, class_of = _group(comps)
    D = Decomposition(X, comps, classes, class_of)
    if not D.verify():
        raise KrullSchmidtError("decomposition witnesses do not compose to identities")
    return D


def same_multiset(D1: Decomposition, D2: Decomposition) -> bool:
    """Whether two decompositions have the same indecomposables with multiplicity."""
    if len(D1.classes) != len(D2.classes):
        return False
    used = set()
    for Y, m in D1.classes:
        for k, (Z, n) in enumerate(D2.classes):
            if k not in used and m == n and _indecomposables_isomorphic(Y, Z) is not None:
                used.add(k)
                break
        else:
            return False
    return True


# isomorphism ---------------------------------------------------------------------------------


@dataclass
class IsoResult:
    isomorphic: bool
    forward: RepMorphism | None = None
    backward: RepMorphism | None = None
    method: str = ""


def are_isomorphic(X: Representation, Y: Representation, seed: int = 0, tries: int = 16) -> IsoResult:
    if X.category is not Y.category:
        raise ValueError("representations over different categories")
    if X.dims != Y.dims:
        return IsoResult(False, method="dimension vectors differ")
    if X.total_dim == 0:
        return IsoResult(True, identity_morphism(X), identity_morphism(X), "zero")
    H = hom_space(X, Y)
    if not H:
        return IsoResult(False, method="Hom(X, Y) = 0")
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        u = combine(H, rng.integers(0, X.p, size=len(H)), X, Y)
        if u.is_iso():
            return IsoResult(True, u, u.inverse(), "random")
    DX, DY = decompose(X, seed), decompose(Y, seed)
    pairs = _match(DX, DY)
    if pairs is None:
        return IsoResult(False, method="decompositions differ")
    p = X.p
    maps = {}
    for a in X.category.objects:
        acc = ef.zeros(Y.dims[a], X.dims[a])
        for i, j, phi in pairs:
            cx, cy = DX.components[i], DY.components[j]
            acc = (acc + ef.chain([cy.inclusion.maps[a], phi.maps[a], cx.projection.maps[a]], p)) % p
        maps[a] = acc
    u = RepMorphism(X, Y, maps)
    if not (u.is_morphism() and u.is_iso()):
        raise KrullSchmidtError("assembled isomorphism is invalid")
    return IsoResult(True, u, u.inverse(), "decomposition")


def _match(DX: Decomposition, DY: Decomposition) -> list[tuple[int, int, RepMorphism]] | None:
    if len(DX.components) != len(DY.components):
        return None
    free = list(range(len(DY.components)))
    pairs = []
    for i, c in enumerate(DX.components):
        for j in free:
            phi = _indecomposables_isomorphic(c.rep, DY.components[j].rep)
            if phi is not None:
                pairs.append((i, j, phi))
                free.remove(j)
                break
        else:
            return None
    return pairs


# summands and retractions ----------------------------------------------------------------------


def solve_retraction(u: RepMorphism) -> RepMorphism | None:
    """Some ``r`` with ``r∘u = id``, or ``None``.  The system is linear in ``r``."""
    if not u.is_morphism():
        raise ValueError("u is not a module morphism")
    X, Y, p = u.source, u.target, u.p
    H = hom_space(Y, X)
    objs = X.category.objects
    target = np.concatenate([ef.identity(X.dims[a]).reshape(-1) for a in objs]) if objs else ef.zeros(1, 0)[0]
    if not H:
        return identity_morphism(X) if X.total_dim == 0 else None
    cols = []
    for h in H:
        ru = u.then(h)
        cols.append(np.concatenate([ru.maps[a].reshape(-1) for a in objs]))
    sol = ef.solve_linear(np.stack(cols, axis=1), target, p)
    if sol is None:
        return None
    r = combine(H, sol.x, Y, X)
    assert u.then(r).is_identity()
    return r


@dataclass
class SummandResult:
    summand: bool
    method1: bool
    method2: bool
    method2_exhaustive: bool
    split: tuple[RepMorphism, RepMorphism] | None = None

    def to_json(self) -> dict:
        return {"summand": self.summand, "method1_decomposition": self.method1,
                "method2_retraction": self.method2, "method2_exhaustive": self.method2_exhaustive}


def _contains(DY: Decomposition, DX: Decomposition) -> bool:
    free = list(range(len(DY.components)))
    for c in DX.components:
        for j in free:
            if _indecomposables_isomorphic(c.rep, DY.components[j].rep) is not None:
                free.remove(j)
                break
        else:
            return False
    return True


def _search_split(X: Representation, Y: Representation, rng: np.random.Generator,
                  limit: int = 4096, tries: int = 64) -> tuple[tuple | None, bool]:
    H = hom_space(X, Y)
    p = X.p
    if X.total_dim == 0:
        return (RepMorphism(X, Y, {a: ef.zeros(Y.dims[a], 0) for a in X.dims}),
                RepMorphism(Y, X, {a: ef.zeros(0, Y.dims[a]) for a in X.dims})), True
    if not H:
        return None, True
    exhaustive = p ** len(H) <= limit
    if exhaustive:
        grid = np.indices((p,) * len(H)).reshape(len(H), -1).T
        candidates = (row for row in grid)
    else:
        candidates = (rng.integers(0, p, size=len(H)) for _ in range(tries))
    for c in candidates:
        if not any(c):
            continue
        u = combine(H, c, X, Y)
        r = solve_retraction(u)
        if r is not None:
            return (u, r), exhaustive
    return None, exhaustive


def is_direct_summand(X: Representation, Y: Representation, seed: int = 0) -> SummandResult:
    """Is ``X`` isomorphic to a direct summand of ``Y``?  Two methods, cross-checked."""
    if X.category is not Y.category:
        raise ValueError("representations over different categories")
    rng = np.random.default_rng(seed)
    m1 = _contains(decompose(Y, seed), decompose(X, seed))
    split, exhaustive = _search_split(X, Y, rng)
    m2 = split is not None
    if m1 != m2:
        raise KrullSchmidtError(f"summand methods disagree: decomposition={m1}, retraction={m2}")
    return SummandResult(m1, m1, m2, exhaustive, split)
