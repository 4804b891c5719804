# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Reduced row echelon form modulo a 31-bit prime.

The caller turns the result into an exact answer by lifting the kernel
and checking it over the integers (see ``linalg``).
"""
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset
from libc.stdint cimport uint64_t, int64_t

BACKEND = "cython"
PRIME = 2147483647


cdef uint64_t _inv(uint64_t a, uint64_t P):
    cdef int64_t t = 0, newt = 1, q, tmp
    cdef int64_t r = <int64_t>P, newr = <int64_t>a
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += <int64_t>P
    return <uint64_t>t


def rref_mod_p(rows, Py_ssize_t ncols, prime=PRIME):
    """RREF of the integer rows (dicts ``col -> int``) over GF(prime), prime < 2^31.

    Returns ``(pivot_cols, reduced_rows)`` with each reduced row a dict
    ``col -> residue`` and pivot entries equal to 1.
    """
    cdef Py_ssize_t cap = 16, rank = 0, i, j, k, lead
    cdef uint64_t *basis
    cdef Py_ssize_t *pivcol
    cdef uint64_t *tmp
    cdef uint64_t c, inv, *brow
    cdef long long v
    cdef uint64_t P = prime
    if P < 2 or P >= 2147483648:
        raise ValueError("prime must be below 2^31")
    if ncols == 0:
        return [], []
    basis = <uint64_t *>malloc(cap * ncols * sizeof(uint64_t))
    pivcol = <Py_ssize_t *>malloc(cap * sizeof(Py_ssize_t))
    tmp = <uint64_t *>malloc(ncols * sizeof(uint64_t))
    if basis == NULL or pivcol == NULL or tmp == NULL:
        free(basis); free(pivcol); free(tmp)
        raise MemoryError()
    try:
        for row in rows:
            if rank == ncols:
                break
            memset(tmp, 0, ncols * sizeof(uint64_t))
            for col, val in row.items():
                v = val % prime
                tmp[<Py_ssize_t>col] = <uint64_t>v
            for k in range(rank):
                c = tmp[pivcol[k]]
                if c == 0:
                    continue
                c = P - c
                brow = basis + k * ncols
                for j in range(ncols):
                    if brow[j]:
                        tmp[j] = (tmp[j] + c * brow[j]) % P
            lead = -1
            for j in range(ncols):
                if tmp[j]:
                    lead = j
                    break
            if lead < 0:
                continue
            inv = _inv(tmp[lead], P)
            for j in range(lead, ncols):
                if tmp[j]:
                    tmp[j] = (tmp[j] * inv) % P
            for k in range(rank):
                brow = basis + k * ncols
                c = brow[lead]
                if c == 0:
                    continue
                c = P - c
                for j in range(lead, ncols):
                    if tmp[j]:
                        brow[j] = (brow[j] + c * tmp[j]) % P
            if rank == cap:
                cap *= 2
                brow = <uint64_t *>realloc(basis, cap * ncols * sizeof(uint64_t))
                if brow == NULL:
                    raise MemoryError()
                basis = brow
                pivcol = <Py_ssize_t *>realloc(pivcol, cap * sizeof(Py_ssize_t))
                if pivcol == NULL:
                    raise MemoryError()
            brow = basis + rank * ncols
            for j in range(ncols):
                brow[j] = tmp[j]
            pivcol[rank] = lead
            rank += 1
        pivots = [pivcol[k] for k in range(rank)]
        out = []
        for k in range(rank):
            brow = basis + k * ncols
            out.append({j: brow[j] for j in range(ncols) if brow[j]})
        return pivots, out
    finally:
        free(basis)
        free(pivcol)
        free(tmp)
