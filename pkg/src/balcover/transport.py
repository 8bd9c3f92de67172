"""Push-down, right push-down and pull-up along a covering functor.

Vertex spaces of a push-down are stacked fiber by fiber in the source
category's object order, so ``F_λ`` and ``F_ρ`` can be compared as literal
matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exactfield as ef
from .functorcore import CoveringCertificate, LinearFunctor, in_component_matrix, out_component_matrix
from .quivercat import Morphism
from .repmod import RepMorphism, Representation


@dataclass
class TransportResult:
    rep: Representation
    blocks: dict[str, list[tuple[str, int, int]]]  # vertex -> (fiber object, offset, dim)

    def slot(self, a: str) -> tuple[str, int, int]:
        """``(i, offset, dim)`` of the summand ``X(a)`` inside ``(F_λX)(i)``."""
        for i, rows in self.blocks.items():
            for x, off, d in rows:
                if x == a:
                    return i, off, d
        raise KeyError(a)


def _blocks(cert: CoveringCertificate, X: Representation) -> dict[str, list[tuple[str, int, int]]]:
    out = {}
    for i, fib in cert.fibers.items():
        off, rows = 0, []
        for a in fib:
            rows.append((a, off, X.dims[a]))
            off += X.dims[a]
        out[i] = rows
    return out


def _push(cert: CoveringCertificate, X: Representation, component) -> TransportResult:
    F, B, p = cert.functor, cert.target, X.p
    if X.category is not cert.source:
        raise ValueError("representation is not over the covering's source")
    blocks = _blocks(cert, X)
    dims = {i: sum(d for _, _, d in rows) for i, rows in blocks.items()}
    mats = {}
    for g in B.generators():
        f = Morphism(g.source, g.target, g.coords)
        M = ef.zeros(dims[g.target], dims[g.source])
        for a, oa, da in blocks[g.source]:
            if not da:
                continue
            for b, ob, db in blocks[g.target]:
                if not db:
                    continue
                C = component(cert, a, b)
                comp = ef.matmul(C, np.asarray(f.coords, dtype=np.int64).reshape(-1, 1), p)[:, 0]
                M[ob:ob + db, oa:oa + da] = X.evaluate(Morphism(a, b, comp))
        mats[g.name] = M
    return TransportResult(Representation(B, dims, mats, check=True), blocks)


def push_down(cert: CoveringCertificate, X: Representation) -> TransportResult:
    """``F_λX``: the ``(b', a')`` block of ``F_λX(f)`` is ``X`` of the out-lift component."""
    return _push(cert, X, out_component_matrix)


def push_down_right(cert: CoveringCertificate, X: Representation) -> TransportResult:
    """``F_ρX``: as :func:`push_down` with in-lift components."""
    return _push(cert, X, in_component_matrix)


def pull_up(F: LinearFunctor, M: Representation) -> Representation:
    """``F_•M = M∘F``."""
    if M.category is not F.target:
        raise ValueError("representation is not over the functor's target")
    A = F.source
    dims = {a: M.dims[F(a)] for a in A.objects}
    mats = {name: M.evaluate(img) for name, img in F.generator_images().items()}
    return Representation(A, dims, mats, check=True)


def push_down_morphism(cert: CoveringCertificate, u: RepMorphism,
                       source: TransportResult | None = None,
                       target: TransportResult | None = None) -> RepMorphism:
    """Fiberwise block-diagonal ``⊕_{Fa=i} u_a``."""
    src = source or push_down(cert, u.source)
    tgt = target or push_down(cert, u.target)
    maps = {}
    for i, fib in cert.fibers.items():
        maps[i] = ef.block_diag([u.maps[a] for a in fib])
    v = RepMorphism(src.rep, tgt.rep, maps)
    if not v.is_morphism():
        raise AssertionError("pushed-down morphism does not intertwine")
    return v


def pull_up_morphism(F: LinearFunctor, v: RepMorphism,
                     source: Representation | None = None,
                     target: Representation | None = None) -> RepMorphism:
    src = source or pull_up(F, v.source)
    tgt = target or pull_up(F, v.target)
    return RepMorphism(src, tgt, {a: v.maps[F(a)].copy() for a in F.source.objects})


def same_matrices(X: Representation, Y: Representation) -> bool:
    return X.same_as(Y)
