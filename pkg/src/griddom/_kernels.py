"""Compiled inner loops (numba).

Everything here is a plain-array kernel with a pure-python caller in the
owning module; the callers validate inputs and fix all conventions.  The
kernels must stay deterministic: parallel loops only ever partition
output rows, and min-reductions are order-independent.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

INF = np.int64(2**61)


def sparse_min_plus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(min,+) product iterating the finite entries of each column of b."""
    n = a.shape[0]
    cols, rows = np.nonzero(b.T < INF)  # sorted by column of b
    vals = b[rows, cols]
    colptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(colptr, cols + 1, 1)
    colptr = np.cumsum(colptr)
    return _sparse_min_plus(a, colptr, rows.astype(np.int64), vals, n)


@njit(cache=True, parallel=True)
def _sparse_min_plus(a, colptr, rowidx, vals, n):
    out = np.empty((n, n), dtype=np.int64)
    for i in prange(n):
        for j in range(n):
            best = INF
            for t in range(colptr[j], colptr[j + 1]):
                v = a[i, rowidx[t]] + vals[t]
                if v < best:
                    best = v
            out[i, j] = best if best < INF else INF
    return out


@njit(cache=True)
def piece_oracle(ncells, nbrs, internal_mask, in_pos, out_pos, rank, nwords):
    """Exhaustive piece matrix by a Gray-code walk over all subsets.

    Each step toggles one cell and updates per-cell cover counts, the
    number of covered cells, and the number of uncovered internal cells,
    so every subset costs O(1).  Words are read off at feasible leaves.
    """
    nuni = internal_mask.size
    k = in_pos.size
    covcount = np.zeros(nuni, dtype=np.int32)
    member = np.zeros(nuni, dtype=np.bool_)
    out = np.full((nwords, nwords), INF, dtype=np.int64)
    pow3 = np.empty(k, dtype=np.int64)
    pow3[0] = 1
    for q in range(1, k):
        pow3[q] = pow3[q - 1] * 3
    internal_uncovered = 0
    for u in range(nuni):
        if internal_mask[u]:
            internal_uncovered += 1
    total_covered = 0
    set_size = 0
    total = np.int64(1) << ncells
    for step in range(total):
        if step > 0:
            # toggle the lowest set bit's cell (Gray-code order)
            b = 0
            t = step
            while t & 1 == 0:
                b += 1
                t >>= 1
            if member[b]:
                set_size -= 1
                for q in range(6):
                    u = nbrs[b, q]
                    if u < 0:
                        break
                    covcount[u] -= 1
                    if covcount[u] == 0:
                        total_covered -= 1
                        if internal_mask[u]:
                            internal_uncovered += 1
            else:
                set_size += 1
                for q in range(6):
                    u = nbrs[b, q]
                    if u < 0:
                        break
                    covcount[u] += 1
                    if covcount[u] == 1:
                        total_covered += 1
                        if internal_mask[u]:
                            internal_uncovered -= 1
            member[b] = not member[b]
        if internal_uncovered > 0:
            continue
        win = np.int64(0)
        for q in range(k):
            u = in_pos[q]
            if member[u]:
                pass  # letter 0
            elif covcount[u] > 0:
                win += pow3[q]
            else:
                win += 2 * pow3[q]
        wout = np.int64(0)
        for q in range(k):
            u = out_pos[q]
            if member[u]:
                pass
            elif covcount[u] > 0:
                wout += pow3[q]
            else:
                wout += 2 * pow3[q]
        i = rank[win]
        j = rank[wout]
        val = 5 * set_size - total_covered
        if val < out[i, j]:
            out[i, j] = val
    return out


_BIG32 = np.int32(2**30)


@njit(cache=True)
def rect_profile_dp(n, m):
    """Minimum dominating set size of the n x m grid, n = column height.

    Broken-profile DP over dense base-3 states: digit q is the label of
    row q+1 (0 in the set, 1 dominated, 2 undominated), reading the
    current column below the scan cell and the previous column above it.
    Unreachable (invalid) states just stay at the sentinel.
    """
    size = 3**n
    pow3 = np.empty(n + 1, dtype=np.int64)
    pow3[0] = 1
    for q in range(n):
        pow3[q + 1] = pow3[q] * 3
    cur = np.full(size, _BIG32, dtype=np.int32)
    cur[size - 1] = 0  # all digits 2: nothing decided yet
    nxt = np.empty(size, dtype=np.int32)
    for c in range(m):
        for y in range(n):
            nxt[:] = _BIG32
            p_y = pow3[y]
            p_dn = pow3[y - 1] if y > 0 else 0
            for s in range(size):
                cost = cur[s]
                if cost >= _BIG32:
                    continue
                left = s // p_y % 3
                down = s // p_dn % 3 if y > 0 else -1
                base = s - left * p_y
                # put the cell in the set: covers left (retiring) and down
                s2 = base - p_dn if down == 2 else base
                if nxt[s2] > cost + 1:
                    nxt[s2] = cost + 1
                # leave it out: the retiring left cell must be covered
                if left == 2 and c > 0:
                    continue
                if (left == 0 and c > 0) or down == 0:
                    s3 = base + p_y
                else:
                    s3 = base + 2 * p_y
                if nxt[s3] > cost:
                    nxt[s3] = cost
            cur, nxt = nxt, cur
    best = _BIG32
    for s in range(size):
        if cur[s] < best:
            t = s
            ok = True
            for _q in range(n):
                if t % 3 == 2:
                    ok = False
                    break
                t //= 3
            if ok:
                best = cur[s]
    return best
