"""Finite quivers, bound categories kQ/(I + J^n) and tabulated categories.

Paths are stored in traversal order: ``(alpha, beta)`` means "alpha, then
beta".  Composition follows the juxtaposition convention ``g∘f`` = "f first",
so the morphism class of the path ``(alpha, beta)`` equals
``compose(beta, alpha)``.

Every category here exposes the same small surface used by the rest of the
package: ``objects``, ``p``, ``hom_dim``, ``hom_labels``, ``mult``,
``identity_index`` and ``generators``.  ``mult(a, b, c)`` is the structure
tensor ``T`` with ``T[i, j, k]`` the k-th coordinate of
``basis_j(b, c) ∘ basis_i(a, b)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import exactfield as ef


class CategoryError(ValueError):
    """Malformed quiver, relation or category data."""


class Arrow(NamedTuple):
    name: str
    source: str
    target: str


class Path(NamedTuple):
    """A path ``source -> target`` given by arrow indices in traversal order."""

    source: str
    target: str
    arrows: tuple[int, ...]

    def __len__(self) -> int:  # type: ignore[override]
        return len(self.arrows)

    def sort_key(self) -> tuple:
        return (len(self.arrows), self.arrows)


class Quiver:
    def __init__(self, vertices: Sequence[str], arrows: Iterable[Arrow | tuple]):
        self.vertices = [str(v) for v in vertices]
        if len(set(self.vertices)) != len(self.vertices):
            raise CategoryError("vertex names must be unique")
        self.arrows = [a if isinstance(a, Arrow) else Arrow(*a) for a in arrows]
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise CategoryError("arrow names must be unique")
        if set(names) & set(self.vertices):
            raise CategoryError("arrow and vertex names must be distinct")
        vset = set(self.vertices)
        for a in self.arrows:
            if a.source not in vset or a.target not in vset:
                raise CategoryError(f"arrow {a.name} references an unknown vertex")
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self.arrow_index = {a.name: i for i, a in enumerate(self.arrows)}
        self._out: dict[str, list[int]] = {v: [] for v in self.vertices}
        self._in: dict[str, list[int]] = {v: [] for v in self.vertices}
        for i, a in enumerate(self.arrows):
            self._out[a.source].append(i)
            self._in[a.target].append(i)

    def out_arrows(self, v: str) -> list[int]:
        return self._out[v]

    def in_arrows(self, v: str) -> list[int]:
        return self._in[v]

    def arrow(self, name: str) -> Arrow:
        try:
            return self.arrows[self.arrow_index[name]]
        except KeyError:
            raise CategoryError(f"unknown arrow {name!r}") from None

    def path(self, names: Sequence[str], source: str | None = None) -> Path:
        """Build a path from arrow names in traversal order."""
        if not names:
            if source is None:
                raise CategoryError("a trivial path needs an explicit source")
            return Path(source, source, ())
        idx = tuple(self.arrow_index[n] if n in self.arrow_index else _missing(n) for n in names)
        for x, y in zip(idx, idx[1:]):
            if self.arrows[x].target != self.arrows[y].source:
                raise CategoryError(f"arrows {self.arrows[x].name}, {self.arrows[y].name} do not compose")
        return Path(self.arrows[idx[0]].source, self.arrows[idx[-1]].target, idx)

    def paths_from(self, v: str, max_len: int) -> list[Path]:
        """All paths starting at ``v`` of length ``<= max_len``."""
        out = [Path(v, v, ())]
        frontier = [out[0]]
        for _ in range(max_len):
            nxt = []
            for pth in frontier:
                for i in self._out[pth.target]:
                    nxt.append(Path(v, self.arrows[i].target, pth.arrows + (i,)))
            out.extend(nxt)
            frontier = nxt
        return out

    def path_names(self, path: Path) -> list[str]:
        return [self.arrows[i].name for i in path.arrows]

    def is_connected(self) -> bool:
        edges = [(a.source, a.target) for a in self.arrows]
        return _connected(self.vertices, edges)


def _missing(name):
    raise CategoryError(f"unknown arrow {name!r}")


def _connected(vertices, edges) -> bool:
    if not vertices:
        return True
    adj: dict = {v: set() for v in vertices}
    for s, t in edges:
        adj[s].add(t)
        adj[t].add(s)
    seen = {vertices[0]}
    todo = deque([vertices[0]])
    while todo:
        v = todo.popleft()
        for w in adj[v] - seen:
            seen.add(w)
            todo.append(w)
    return len(seen) == len(vertices)


@dataclass(frozen=True)
class PathCombo:
    """A linear combination of parallel paths ``source -> target``."""

    source: str
    target: str
    terms: tuple[tuple[int, tuple[int, ...]], ...]

    @classmethod
    def from_terms(cls, quiver: Quiver, terms, p: int) -> "PathCombo":
        """``terms`` is an iterable of ``(coeff, [arrow names])``."""
        acc: dict[tuple[int, ...], int] = {}
        ends = set()
        for coeff, names in terms:
            if not names:
                raise CategoryError("relation terms must be nontrivial paths")
            pth = quiver.path(names)
            ends.add((pth.source, pth.target))
            acc[pth.arrows] = (acc.get(pth.arrows, 0) + int(coeff)) % p
        if len(ends) != 1:
            raise CategoryError("relation terms must be parallel paths")
        (s, t), = ends
        clean = tuple(sorted(((c, a) for a, c in acc.items() if c), key=lambda x: (len(x[1]), x[1])))
        return cls(s, t, clean)

    def min_length(self) -> int:
        return min((len(a) for _, a in self.terms), default=0)


@dataclass(frozen=True)
class Morphism:
    source: str
    target: str
    coords: np.ndarray = field(compare=False)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Morphism)
            and (self.source, self.target) == (other.source, other.target)
            and np.array_equal(self.coords, other.coords)
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, tuple(int(x) for x in self.coords)))

    def is_zero(self) -> bool:
        return not np.any(self.coords)


class Generator(NamedTuple):
    """A named morphism generating the radical (an arrow, or a tabulated basis element)."""

    name: str
    source: str
    target: str
    coords: np.ndarray


class LinearCategory:
    """Shared operations over the hom-basis interface."""

    objects: list[str]
    p: int

    def hom_dim(self, a: str, b: str) -> int:
        raise NotImplementedError

    def hom_labels(self, a: str, b: str) -> list[str]:
        raise NotImplementedError

    def mult(self, a: str, b: str, c: str) -> np.ndarray:
        raise NotImplementedError

    def identity_index(self, a: str) -> int:
        raise NotImplementedError

    def generators(self) -> list[Generator]:
        raise NotImplementedError

    def _check_object(self, a: str) -> None:
        if a not in self._object_set:
            raise CategoryError(f"unknown object {a!r}")

    @cached_property
    def _object_set(self) -> frozenset:
        return frozenset(self.objects)

    def identity(self, a: str) -> Morphism:
        v = ef.zeros(1, self.hom_dim(a, a))[0]
        v[self.identity_index(a)] = 1
        return Morphism(a, a, v)

    def zero(self, a: str, b: str) -> Morphism:
        return Morphism(a, b, np.zeros(self.hom_dim(a, b), dtype=np.int64))

    def morphism(self, a: str, b: str, coords) -> Morphism:
        v = np.asarray(coords, dtype=np.int64) % self.p
        if v.shape != (self.hom_dim(a, b),):
            raise ef.DimensionError(f"Hom({a},{b}) has dimension {self.hom_dim(a, b)}, got {v.shape}")
        return Morphism(a, b, v)

    def basis_morphism(self, a: str, b: str, i: int) -> Morphism:
        v = np.zeros(self.hom_dim(a, b), dtype=np.int64)
        v[i] = 1
        return Morphism(a, b, v)

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        """``g∘f``: traverse ``f`` first."""
        if f.target != g.source:
            raise CategoryError(f"cannot compose {f.source}->{f.target} with {g.source}->{g.target}")
        T = self.mult(f.source, f.target, g.target)
        out = ef.contract(ef.contract(T, f.coords, 0, self.p), g.coords, 0, self.p)
        return Morphism(f.source, g.target, out)

    def add(self, f: Morphism, g: Morphism, scale: int = 1) -> Morphism:
        if (f.source, f.target) != (g.source, g.target):
            raise CategoryError("cannot add non-parallel morphisms")
        return Morphism(f.source, f.target, (f.coords + scale * g.coords) % self.p)

    def post_matrix(self, a: str, f: Morphism) -> np.ndarray:
        """Matrix of ``Hom(a, f.source) -> Hom(a, f.target)``, ``h ↦ f∘h``."""
        T = self.mult(a, f.source, f.target)
        return ef.contract(T, f.coords, 1, self.p).T.copy()

    def pre_matrix(self, f: Morphism, c: str) -> np.ndarray:
        """Matrix of ``Hom(f.target, c) -> Hom(f.source, c)``, ``h ↦ h∘f``."""
        T = self.mult(f.source, f.target, c)
        return ef.contract(T, f.coords, 0, self.p).T.copy()

    def hom_dims(self) -> dict[tuple[str, str], int]:
        return {(a, b): self.hom_dim(a, b) for a in self.objects for b in self.objects}

    def is_connected(self) -> bool:
        edges = [(a, b) for (a, b), d in self.hom_dims().items() if d and a != b]
        return _connected(self.objects, edges)

    def connected_components(self) -> list[list[str]]:
        adj: dict = {v: set() for v in self.objects}
        for (a, b), d in self.hom_dims().items():
            if d and a != b:
                adj[a].add(b)
                adj[b].add(a)
        comps, seen = [], set()
        for v in self.objects:
            if v in seen:
                continue
            comp, todo = [], [v]
            seen.add(v)
            while todo:
                x = todo.pop()
                comp.append(x)
                for y in adj[x] - seen:
                    seen.add(y)
                    todo.append(y)
            comps.append(sorted(comp, key=self.objects.index))
        return comps

    def check_associativity(self, triples=None) -> bool:
        """Exhaustive check of ``(h∘g)∘f = h∘(g∘f)`` on basis elements."""
        objs = self.objects
        for a, b, c, d in triples or product(objs, repeat=4):
            Tabc, Tacd = self.mult(a, b, c), self.mult(a, c, d)
            Tbcd, Tabd = self.mult(b, c, d), self.mult(a, b, d)
            left = np.einsum("ijk,klm->ijlm", Tabc, Tacd) % self.p
            right = np.einsum("jln,inm->ijlm", Tbcd, Tabd) % self.p
            if not np.array_equal(left, right):
                return False
        return True


class BoundCategory(LinearCategory):
    """The category kQ/(I + J^n) of a finite quiver with relations and nilpotency bound ``n``."""

    def __init__(self, quiver: Quiver, relations: Sequence[PathCombo], n: int, p: int = ef.DEFAULT_PRIME,
                 name: str = ""):
        self.p = ef.check_prime(p)
        if n < 2:
            raise CategoryError("nilpotency bound must be at least 2")
        for r in relations:
            if any(len(a) < 2 for _, a in r.terms):
                raise CategoryError(f"relation {r} involves a path of length < 2")
        self.quiver = quiver
        self.relations = list(relations)
        self.n = int(n)
        self.name = name
        self.objects = list(quiver.vertices)
        self._paths: dict[tuple[str, str], list[Path]] = {(a, b): [] for a in self.objects for b in self.objects}
        for a in self.objects:
            for pth in quiver.paths_from(a, self.n - 1):
                self._paths[(a, pth.target)].append(pth)
        for key in self._paths:
            self._paths[key].sort(key=Path.sort_key)
        self._path_pos = {k: {pth.arrows: i for i, pth in enumerate(v)} for k, v in self._paths.items()}
        self._build_bases()
        self._mult_cache: dict[tuple[str, str, str], np.ndarray] = {}

    @classmethod
    def from_data(cls, vertices, arrows, relations=(), n: int = 2, p: int = ef.DEFAULT_PRIME,
                  name: str = "") -> "BoundCategory":
        """``arrows``: ``(name, source, target)``; ``relations``: lists of ``(coeff, [names])``."""
        q = Quiver(vertices, [Arrow(*a) for a in arrows])
        rels = [PathCombo.from_terms(q, r, p) for r in relations]
        rels = [r for r in rels if r.terms]
        return cls(q, rels, n, p, name)

    # ideal and reduction ---------------------------------------------------------

    def _into_paths(self, arrows: tuple[int, ...], source: str) -> tuple[str, str, tuple[int, ...]]:
        target = self.quiver.arrows[arrows[-1]].target if arrows else source
        return source, target, arrows

    def ideal_vectors(self, max_len: int | None = None, include_truncation: bool = False
                      ) -> dict[tuple[str, str], list[dict[tuple[int, ...], int]]]:
        """Spanning vectors of the ideal generated by the relations, per hom pair.

        Each vector is a sparse map path -> coefficient over paths of length
        ``< max_len`` (default ``n``); longer terms are dropped.
        """
        max_len = self.n if max_len is None else max_len
        out: dict[tuple[str, str], list[dict]] = {(a, b): [] for a in self.objects for b in self.objects}
        into: dict[str, list[Path]] = {v: [] for v in self.objects}
        outof: dict[str, list[Path]] = {}
        for v in self.objects:
            outof[v] = self.quiver.paths_from(v, max_len - 1)
            for pth in outof[v]:
                into[pth.target].append(pth)
        for r in self.relations:
            m = r.min_length()
            for u in into[r.source]:
                if len(u) + m >= max_len:
                    continue
                for w in outof[r.target]:
                    if len(u) + m + len(w) >= max_len:
                        continue
                    vec: dict[tuple[int, ...], int] = {}
                    for c, arr in r.terms:
                        full = u.arrows + arr + w.arrows
                        if len(full) < max_len:
                            vec[full] = (vec.get(full, 0) + c) % self.p
                    vec = {k: c for k, c in vec.items() if c}
                    if vec:
                        out[(u.source, w.target)].append(vec)
        if include_truncation and max_len > self.n:
            for v in self.objects:
                for pth in outof[v]:
                    if len(pth) >= self.n:
                        out[(v, pth.target)].append({pth.arrows: 1})
        return out

    def _build_bases(self) -> None:
        p = self.p
        self._basis: dict[tuple[str, str], list[Path]] = {}
        self._reduce: dict[tuple[str, str], np.ndarray] = {}
        self._ideal_rank: dict[tuple[str, str], int] = {}
        ideal = self.ideal_vectors()
        for key, paths in self._paths.items():
            pos = self._path_pos[key]
            M = ef.zeros(len(ideal[key]), len(paths))
            for r, vec in enumerate(ideal[key]):
                for arr, c in vec.items():
                    M[r, pos[arr]] = c
            R, pivots = ef.rref(M, p) if len(paths) else (M, [])
            self._ideal_rank[key] = len(pivots)
            pivset = set(pivots)
            free = [c for c in range(len(paths)) if c not in pivset]
            self._basis[key] = [paths[c] for c in free]
            red = ef.zeros(len(free), len(paths))
            fpos = {c: i for i, c in enumerate(free)}
            for c in free:
                red[fpos[c], c] = 1
            for r, c in enumerate(pivots):
                for f in free:
                    red[fpos[f], c] = (-R[r, f]) % p
            self._reduce[key] = red

    def reduce_path(self, arrows: tuple[int, ...], source: str) -> Morphism:
        """Coordinates of the class of a raw path (zero when of length ``>= n``)."""
        s, t, arrows = self._into_paths(tuple(arrows), source)
        d = self.hom_dim(s, t)
        if len(arrows) >= self.n:
            return Morphism(s, t, np.zeros(d, dtype=np.int64))
        return Morphism(s, t, self._reduce[(s, t)][:, self._path_pos[(s, t)][arrows]].copy())

    def reduce_combo(self, combo: PathCombo) -> Morphism:
        acc = np.zeros(self.hom_dim(combo.source, combo.target), dtype=np.int64)
        for c, arrows in combo.terms:
            acc = (acc + c * self.reduce_path(arrows, combo.source).coords) % self.p
        return Morphism(combo.source, combo.target, acc)

    def path_morphism(self, names: Sequence[str], source: str | None = None) -> Morphism:
        pth = self.quiver.path(names, source)
        return self.reduce_path(pth.arrows, pth.source)

    def arrow_morphism(self, name: str) -> Morphism:
        return self.path_morphism([name])

    # category interface ----------------------------------------------------------

    def hom_dim(self, a: str, b: str) -> int:
        return len(self._basis[(a, b)])

    def hom_basis(self, a: str, b: str) -> list[Path]:
        return list(self._basis[(a, b)])

    def hom_labels(self, a: str, b: str) -> list[str]:
        return [self.path_label(pth) for pth in self._basis[(a, b)]]

    def path_label(self, pth: Path) -> str:
        if not pth.arrows:
            return f"e_{pth.source}"
        return "*".join(self.quiver.path_names(pth))

    def raw_path_count(self, a: str, b: str) -> int:
        return len(self._paths[(a, b)])

    def ideal_rank(self, a: str, b: str) -> int:
        return self._ideal_rank[(a, b)]

    def identity_index(self, a: str) -> int:
        return 0

    def mult(self, a: str, b: str, c: str) -> np.ndarray:
        key = (a, b, c)
        T = self._mult_cache.get(key)
        if T is None:
            B1, B2 = self._basis[(a, b)], self._basis[(b, c)]
            T = np.zeros((len(B1), len(B2), self.hom_dim(a, c)), dtype=np.int64)
            for i, f in enumerate(B1):
                for j, g in enumerate(B2):
                    T[i, j] = self.reduce_path(f.arrows + g.arrows, a).coords
            T.setflags(write=False)
            self._mult_cache[key] = T
        return T

    def generators(self) -> list[Generator]:
        return [Generator(a.name, a.source, a.target, self.arrow_morphism(a.name).coords)
                for a in self.quiver.arrows]

    def is_connected(self) -> bool:
        return self.quiver.is_connected()

    # reports ---------------------------------------------------------------------

    def nilpotency_implied(self) -> bool:
        """Whether every path of length ``n`` already lies in the ideal of the relations alone.

        When ``False`` the nilpotency bound contributes relations of its own.
        """
        ideal = self.ideal_vectors(max_len=self.n + 1)
        for a in self.objects:
            long_paths = [pth for pth in self.quiver.paths_from(a, self.n) if len(pth) == self.n]
            by_target: dict[str, list[Path]] = {}
            for pth in long_paths:
                by_target.setdefault(pth.target, []).append(pth)
            for b, targets in by_target.items():
                allp = [pth for pth in self.quiver.paths_from(a, self.n) if pth.target == b]
                pos = {pth.arrows: i for i, pth in enumerate(allp)}
                M = ef.zeros(len(ideal[(a, b)]), len(allp))
                for r, vec in enumerate(ideal[(a, b)]):
                    for arr, c in vec.items():
                        M[r, pos[arr]] = c
                rk = ef.rank(M, self.p) if M.size else 0
                for pth in targets:
                    row = ef.zeros(1, len(allp))
                    row[0, pos[pth.arrows]] = 1
                    if ef.rank(np.concatenate([M, row]), self.p) != rk:
                        return False
        return True

    def validate_locally_bounded(self) -> dict:
        """Witness that every endomorphism ring is local and hom spaces are finite."""
        endo = {}
        for a in self.objects:
            basis = self._basis[(a, a)]
            if not basis or basis[0].arrows:
                raise CategoryError(f"identity of {a} vanishes")
            nonid = [pth for pth in basis[1:]]
            assert all(len(pth) >= 1 for pth in nonid)
            endo[a] = {
                "dim": len(basis),
                "radical_basis": [self.path_label(pth) for pth in nonid],
                "local": True,
            }
        return {
            "locally_bounded": True,
            "finite_hom_dims": True,
            "max_path_length": self.n - 1,
            "endomorphisms": endo,
        }


class TabulatedCategory(LinearCategory):
    """A category given by explicit hom bases and structure tensors."""

    def __init__(self, objects: Sequence[str], labels: dict[tuple[str, str], list[str]],
                 tensors: dict[tuple[str, str, str], np.ndarray], identities: dict[str, int],
                 p: int = ef.DEFAULT_PRIME, name: str = ""):
        self.p = ef.check_prime(p)
        self.objects = list(objects)
        self.name = name
        self._labels = {k: list(v) for k, v in labels.items()}
        self._tensors = {}
        for key, T in tensors.items():
            T = np.asarray(T, dtype=np.int64) % self.p
            a, b, c = key
            want = (self.hom_dim(a, b), self.hom_dim(b, c), self.hom_dim(a, c))
            if T.shape != want:
                raise CategoryError(f"tensor {key} has shape {T.shape}, expected {want}")
            T.setflags(write=False)
            self._tensors[key] = T
        self._identities = dict(identities)

    def hom_dim(self, a: str, b: str) -> int:
        return len(self._labels[(a, b)])

    def hom_labels(self, a: str, b: str) -> list[str]:
        return list(self._labels[(a, b)])

    def mult(self, a: str, b: str, c: str) -> np.ndarray:
        return self._tensors[(a, b, c)]

    def identity_index(self, a: str) -> int:
        return self._identities[a]

    def generators(self) -> list[Generator]:
        gens = []
        for a in self.objects:
            for b in self.objects:
                for i, lab in enumerate(self._labels[(a, b)]):
                    if a == b and i == self._identities[a]:
                        continue
                    v = np.zeros(self.hom_dim(a, b), dtype=np.int64)
                    v[i] = 1
                    gens.append(Generator(f"[{a}->{b}]{lab}", a, b, v))
        return gens

    def check_identity_laws(self) -> bool:
        for a in self.objects:
            ia = self._identities[a]
            for b in self.objects:
                d = self.hom_dim(a, b)
                eye = ef.identity(d)
                if d and not np.array_equal(self.mult(a, a, b)[ia], eye):
                    return False
                ib = self._identities[b]
                if d and not np.array_equal(self.mult(a, b, b)[:, ib, :], eye):
                    return False
        return True


def build_bound_category(quiver: Quiver, relations: Sequence[PathCombo], n: int,
                         p: int = ef.DEFAULT_PRIME) -> BoundCategory:
    return BoundCategory(quiver, relations, n, p)


def check_schurian(cat: LinearCategory) -> bool:
    return all(d <= 1 for d in cat.hom_dims().values())
