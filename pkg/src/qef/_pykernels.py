"""Reference implementations of the compiled kernels.

Used when the extension is unavailable or ``QEF_BACKEND=python`` is set.
Signatures and results mirror ``_kernels`` exactly.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def rref_words(w: np.ndarray, ncols: int, pivot_limit: int) -> list[int]:
    rows = w.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(min(pivot_limit, ncols)):
        if r == rows:
            break
        word, bit = c >> 6, np.uint64(1 << (c & 63))
        hits = np.nonzero(w[r:, word] & bit)[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            w[[r, p]] = w[[p, r]]
        mask = (w[:, word] & bit) != 0
        mask[r] = False
        w[mask] ^= w[r]
        pivots.append(c)
        r += 1
    return pivots


def propagate_frames(
    kind: np.ndarray,
    qa: np.ndarray,
    qb: np.ndarray,
    nqubits: int,
    faults: np.ndarray,
    loc_gate: np.ndarray,
    loc_qubit: np.ndarray,
) -> int:
    # vectorised over trials instead of looping per trial
    trials = faults.shape[0]
    x = np.zeros((trials, nqubits), dtype=np.uint8)
    z = np.zeros((trials, nqubits), dtype=np.uint8)
    hit = np.zeros((trials, nqubits), dtype=bool)
    nloc = len(loc_gate)
    l = 0
    for g in range(len(kind)):
        while l < nloc and loc_gate[l] == g:
            q = loc_qubit[l]
            code = faults[:, l]
            x[:, q] ^= code & 1
            z[:, q] ^= code >> 1
            hit[:, q] |= code != 0
            l += 1
        a, b = qa[g], qb[g]
        if kind[g] == 0:
            x[:, b] ^= x[:, a]
            z[:, a] ^= z[:, b]
        else:
            x[:, a], z[:, a] = z[:, a].copy(), x[:, a].copy()
    bad = ((x | z) != 0) & ~hit
    return int(np.count_nonzero(bad.any(axis=1)))


def _reduce(v: int, basis: list[int], pivbit: list[int]) -> int:
    for b, pb in zip(basis, pivbit):
        if v & pb:
            v ^= b
    return v


def min_weight_logical(
    syn: np.ndarray,
    vec: np.ndarray,
    basis: np.ndarray,
    pivbit: np.ndarray,
    max_weight: int,
) -> int:
    syn_l = [int(s) for s in syn]
    vec_l = [int(v) for v in vec]
    basis_l = [int(b) for b in basis]
    piv_l = [int(p) for p in pivbit]
    ns = len(syn_l)
    for w in range(1, min(max_weight, ns) + 1):
        for combo in combinations(range(ns), w):
            s = v = 0
            for i in combo:
                s ^= syn_l[i]
                v ^= vec_l[i]
            if s == 0 and _reduce(v, basis_l, piv_l):
                return w
    return -1
