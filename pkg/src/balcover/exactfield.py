"""Exact dense linear algebra over a prime field F_p.

Matrices are ``numpy.int64`` arrays whose entries are residues in ``[0, p)``.
Vectors are columns: a matrix ``A`` of shape ``(m, n)`` maps ``F_p^n -> F_p^m``.
Zero-sized shapes are valid and behave as the unique maps to or from the zero
space.

The row reduction and matrix product run in a compiled kernel when the
extension ``balcover._kernels`` is importable, and in numpy otherwise.  Set
``BALCOVER_PURE=1`` to force the numpy path.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _fallback

DEFAULT_PRIME = 32003
MAX_PRIME = 2**31

if os.environ.get("BALCOVER_PURE"):
    _kernels = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _kernels = _fallback
        BACKEND = "python"


def use_backend(name: str) -> None:
    """Switch the kernel implementation (``"compiled"`` or ``"python"``)."""
    global _kernels, BACKEND
    if name == "python":
        _kernels = _fallback
    elif name == "compiled":
        from . import _kernels as compiled  # type: ignore[attr-defined]

        _kernels = compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


def compiled_available() -> bool:
    try:
        from . import _kernels  # type: ignore[attr-defined]  # noqa: F401
    except ImportError:
        return False
    return True


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class SingularMatrixError(ArithmeticError):
    """A square matrix has no inverse."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"field modulus {p} is not prime")
    if p >= MAX_PRIME:
        raise ValueError(f"field modulus {p} exceeds the supported bound 2**31")
    return p


def inv_mod(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("division by zero in F_p")
    return pow(a, -1, p)


def as_matrix(data, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce nested lists or arrays to a reduced int64 matrix."""
    arr = np.array(data, dtype=object)
    if shape is not None and arr.size == 0:
        arr = arr.reshape(shape)
    if arr.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {arr.shape}")
    arr = (arr % p).astype(np.int64)
    if shape is not None and arr.shape != tuple(shape):
        raise DimensionError(f"expected shape {tuple(shape)}, got {arr.shape}")
    return arr


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    if A.size == 0 or B.size == 0:
        return zeros(A.shape[0], B.shape[1])
    return _kernels.matmul(
        np.ascontiguousarray(A, dtype=np.int64), np.ascontiguousarray(B, dtype=np.int64), p
    )


def chain(mats, p: int) -> np.ndarray:
    """Product ``mats[0] @ mats[1] @ ...`` reduced mod p."""
    out = mats[0]
    for m in mats[1:]:
        out = matmul(out, m, p)
    return out


def rref(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with first-nonzero pivoting."""
    M = np.array(A, dtype=np.int64, order="C", copy=True) % p
    if M.size == 0:
        return M, []
    pivots = _kernels.rref_inplace(M, p)
    return M, list(pivots)


def rank(A: np.ndarray, p: int) -> int:
    return len(rref(A, p)[1])


def kernel_basis(A: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning ``{x : A x = 0}``; shape ``(cols, nullity)``."""
    rows, cols = A.shape
    R, pivots = rref(A, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    K = zeros(cols, len(free))
    for k, f in enumerate(free):
        K[f, k] = 1
        for r, c in enumerate(pivots):
            K[c, k] = (-R[r, f]) % p
    return K


def image_basis(A: np.ndarray, p: int) -> np.ndarray:
    """Linearly independent columns of ``A`` spanning its column space."""
    _, pivots = rref(A, p)
    return np.ascontiguousarray(A[:, pivots], dtype=np.int64)


def row_space(A: np.ndarray, p: int) -> np.ndarray:
    """Nonzero rows of the reduced echelon form."""
    R, pivots = rref(A, p)
    return R[: len(pivots)]


@dataclass(frozen=True)
class Solution:
    """One particular solution plus a kernel basis (columns)."""

    x: np.ndarray
    kernel: np.ndarray


def solve_linear(A: np.ndarray, b, p: int) -> Solution | None:
    """Solve ``A x = b``; ``b`` may be a vector or a matrix of right-hand sides.

    Returns ``None`` when the system is inconsistent and raises
    :class:`DimensionError` when the shapes do not fit.
    """
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vector = b.ndim == 1
    B = b.reshape(-1, 1) if vector else b
    rows, cols = A.shape
    if B.shape[0] != rows:
        raise DimensionError(f"matrix has {rows} rows but right-hand side has {B.shape[0]}")
    aug = np.concatenate([A % p, B % p], axis=1)
    R, pivots = rref(aug, p)
    if any(c >= cols for c in pivots):
        return None
    X = zeros(cols, B.shape[1])
    for r, c in enumerate(pivots):
        X[c] = R[r, cols:]
    K = kernel_basis(A, p)
    return Solution(X[:, 0] if vector else X, K)


def invert(A: np.ndarray, p: int) -> np.ndarray:
    n, m = A.shape
    if n != m:
        raise DimensionError(f"cannot invert non-square {A.shape} matrix")
    if n == 0:
        return zeros(0, 0)
    R, pivots = rref(np.concatenate([A % p, identity(n)], axis=1), p)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return np.ascontiguousarray(R[:, n:])


def is_invertible(A: np.ndarray, p: int) -> bool:
    return A.shape[0] == A.shape[1] and rank(A, p) == A.shape[0]


def complement_basis(U: np.ndarray, n: int, p: int) -> np.ndarray:
    """Standard basis vectors completing the independent columns ``U`` to ``F_p^n``."""
    if U.shape[1] == 0:
        return identity(n)
    _, pivots = rref(np.concatenate([U, identity(n)], axis=1), p)
    extra = [c - U.shape[1] for c in pivots if c >= U.shape[1]]
    C = zeros(n, len(extra))
    for k, e in enumerate(extra):
        C[e, k] = 1
    return C


def block_diag(blocks) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def contract(T: np.ndarray, v: np.ndarray, axis: int, p: int) -> np.ndarray:
    """Contract a structure-constant tensor with a coordinate vector along ``axis``."""
    if T.size == 0:
        shape = list(T.shape)
        del shape[axis]
        return np.zeros(shape, dtype=np.int64)
    Tm = np.moveaxis(T, axis, -1)
    flat = Tm.reshape(-1, Tm.shape[-1])
    out = matmul(flat, np.asarray(v, dtype=np.int64).reshape(-1, 1), p)
    return out.reshape(Tm.shape[:-1])
