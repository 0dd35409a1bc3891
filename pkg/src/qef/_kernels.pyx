# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: packed GF(2) elimination, Pauli-frame propagation and
weight-ordered logical-operator search.

Every function here has a drop-in twin in ``_pykernels``; the two must agree
bit-for-bit.
"""

from libc.stdint cimport uint64_t, uint8_t, int32_t, int8_t, int64_t
from libc.stdlib cimport malloc, free, calloc
from libc.string cimport memset


def rref_words(uint64_t[:, ::1] w, Py_ssize_t ncols, Py_ssize_t pivot_limit):
    """Reduce packed rows in place; return pivot columns (< pivot_limit)."""
    cdef Py_ssize_t rows = w.shape[0], nw = w.shape[1]
    cdef Py_ssize_t r = 0, c, p, i, k, word
    cdef uint64_t bit, tmp
    pivots = []
    if pivot_limit > ncols:
        pivot_limit = ncols
    for c in range(pivot_limit):
        if r == rows:
            break
        word = c >> 6
        bit = (<uint64_t>1) << (c & 63)
        p = r
        while p < rows and not (w[p, word] & bit):
            p += 1
        if p == rows:
            continue
        if p != r:
            for k in range(nw):
                tmp = w[p, k]
                w[p, k] = w[r, k]
                w[r, k] = tmp
        with nogil:
            for i in range(rows):
                if i != r and (w[i, word] & bit):
                    for k in range(word, nw):
                        w[i, k] ^= w[r, k]
        pivots.append(c)
        r += 1
    return pivots


def propagate_frames(
    int8_t[::1] kind,
    int32_t[::1] qa,
    int32_t[::1] qb,
    Py_ssize_t nqubits,
    uint8_t[:, ::1] faults,
    int32_t[::1] loc_gate,
    int32_t[::1] loc_qubit,
):
    """Count trials in which a never-faulted qubit ends with a nontrivial frame.

    ``kind`` is 0 for CX(qa, qb) and 1 for H(qa).  Fault codes use bit 0 for X
    and bit 1 for Z; location ``l`` fires just before gate ``loc_gate[l]``.
    """
    cdef Py_ssize_t trials = faults.shape[0], nloc = faults.shape[1]
    cdef Py_ssize_t ngates = kind.shape[0]
    cdef Py_ssize_t t, g, l, q
    cdef uint8_t code, tmp
    cdef int64_t events = 0
    cdef uint8_t *x = <uint8_t *> calloc(nqubits, 1)
    cdef uint8_t *z = <uint8_t *> calloc(nqubits, 1)
    cdef uint8_t *hit = <uint8_t *> calloc(nqubits, 1)
    if x == NULL or z == NULL or hit == NULL:
        free(x); free(z); free(hit)
        raise MemoryError()
    with nogil:
        for t in range(trials):
            memset(x, 0, nqubits)
            memset(z, 0, nqubits)
            memset(hit, 0, nqubits)
            l = 0
            for g in range(ngates):
                while l < nloc and loc_gate[l] == g:
                    code = faults[t, l]
                    if code:
                        q = loc_qubit[l]
                        x[q] ^= code & 1
                        z[q] ^= code >> 1
                        hit[q] = 1
                    l += 1
                if kind[g] == 0:
                    x[qb[g]] ^= x[qa[g]]
                    z[qa[g]] ^= z[qb[g]]
                else:
                    tmp = x[qa[g]]
                    x[qa[g]] = z[qa[g]]
                    z[qa[g]] = tmp
            for q in range(nqubits):
                if (x[q] | z[q]) and not hit[q]:
                    events += 1
                    break
    free(x); free(z); free(hit)
    return events


cdef inline uint64_t _reduce(uint64_t v, uint64_t[::1] basis, uint64_t[::1] pivbit) nogil:
    cdef Py_ssize_t r
    for r in range(basis.shape[0]):
        if v & pivbit[r]:
            v ^= basis[r]
    return v


def min_weight_logical(
    uint64_t[::1] syn,
    uint64_t[::1] vec,
    uint64_t[::1] basis,
    uint64_t[::1] pivbit,
    Py_ssize_t max_weight,
):
    """Smallest w such that some w columns have zero total syndrome and their
    combined vector is outside the span of ``basis``; -1 if none up to max_weight.
    """
    cdef Py_ssize_t ns = syn.shape[0]
    cdef Py_ssize_t w, i, j
    cdef Py_ssize_t found = -1
    cdef uint64_t s, v
    cdef Py_ssize_t *idx
    if max_weight > ns:
        max_weight = ns
    idx = <Py_ssize_t *> malloc((ns + 1) * sizeof(Py_ssize_t))
    if idx == NULL:
        raise MemoryError()
    with nogil:
        w = 1
        while w <= max_weight and found < 0:
            for i in range(w):
                idx[i] = i
            while True:
                s = 0
                v = 0
                for i in range(w):
                    s ^= syn[idx[i]]
                    v ^= vec[idx[i]]
                if s == 0 and _reduce(v, basis, pivbit) != 0:
                    found = w
                    break
                # next combination in lexicographic order
                i = w - 1
                while i >= 0 and idx[i] == ns - w + i:
                    i -= 1
                if i < 0:
                    break
                idx[i] += 1
                for j in range(i + 1, w):
                    idx[j] = idx[j - 1] + 1
            w += 1
    free(idx)
    return found
