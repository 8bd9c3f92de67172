"""Numpy implementations of the kernels in ``_kernels.pyx``."""
import numpy as np



def rref_inplace(M, p):
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            M[[r, k]] = M[[k, r]]
        inv = pow(int(M[r, c]), -1, p)
        if inv != 1:
            M[r] = (M[r] * inv) % p
        col = M[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            M[others] = (M[others] - np.outer(col[others], M[r]) % p) % p
        pivots.append(c)
        r += 1
    return pivots


def matmul(A, B, p):
    k = A.shape[1]
    # each product is < p**2; choose a chunk so the partial sums stay below 2**63
    step = max(1, (2**63 - 1) // max(1, (p - 1) ** 2) - 1)
    if k <= step:
        return (A @ B) % p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for s in range(0, k, step):
        out = (out + (A[:, s:s + step] @ B[s:s + step]) % p) % p
    return out
