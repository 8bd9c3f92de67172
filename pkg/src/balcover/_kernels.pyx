# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular row reduction and matrix product.

Entries are int64 residues in [0, p) with p < 2**31, so a single product
fits in 63 bits. Row reduction reduces each update; the product defers
reduction until the accumulator nears overflow.
"""
import numpy as np
cimport numpy as cnp

ctypedef long long i64
ctypedef unsigned long long u64


cdef inline i64 _inv(i64 a, i64 p):
    cdef i64 t = 0, newt = 1, r = p, newr = a, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def rref_inplace(i64[:, ::1] M, i64 p):
    cdef Py_ssize_t rows = M.shape[0], cols = M.shape[1]
    cdef Py_ssize_t r = 0, c, k, j, i
    cdef i64 inv, f, tmp
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        k = r
        while k < rows and M[k, c] == 0:
            k += 1
        if k == rows:
            continue
        if k != r:
            for j in range(c, cols):
                tmp = M[r, j]
                M[r, j] = M[k, j]
                M[k, j] = tmp
        inv = _inv(M[r, c], p)
        if inv != 1:
            for j in range(c, cols):
                M[r, j] = (M[r, j] * inv) % p
        for i in range(rows):
            if i == r:
                continue
            f = M[i, c]
            if f == 0:
                continue
            for j in range(c, cols):
                if M[r, j] != 0:
                    M[i, j] = (M[i, j] - f * M[r, j]) % p
                    if M[i, j] < 0:
                        M[i, j] += p
        pivots.append(c)
        r += 1
    return pivots


def matmul(const i64[:, ::1] A, const i64[:, ::1] B, i64 p):
    # rows accumulate unreduced in uint64 and are folded mod p only near overflow
    cdef Py_ssize_t n = A.shape[0], m = A.shape[1], q = B.shape[1]
    cdef Py_ssize_t i, j, k
    cdef u64 a, pp = <u64>p
    cdef u64 limit = 0xFFFFFFFFFFFFFFFF - (pp - 1) * (pp - 1)
    out = np.zeros((n, q), dtype=np.int64)
    cdef i64[:, ::1] C = out
    acc_arr = np.zeros(q, dtype=np.uint64)
    cdef u64[::1] acc = acc_arr
    for i in range(n):
        for j in range(q):
            acc[j] = 0
        for k in range(m):
            a = <u64>A[i, k]
            if a == 0:
                continue
            for j in range(q):
                if acc[j] > limit:
                    acc[j] %= pp
                acc[j] += a * <u64>B[k, j]
        for j in range(q):
            C[i, j] = <i64>(acc[j] % pp)
    return out
