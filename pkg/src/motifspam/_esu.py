"""Numba kernel: rooted ESU enumeration of connected subsets around each ego.

Every connected node subset of size <= ``max_size`` that contains the root
is generated exactly once (ESU with the root fixed and the usual
exclusive-neighbourhood extension rule).  Subsets are classified on the fly
through a raw-code -> motif-slot table, so per-instance work is a handful
of integer operations.
"""

import numpy as np
from numba import njit

ADJ_OFFSET = 5


@njit(cache=True)
def census(indptr, indices, colors, roots, hop_k, max_size, min_size,
           slots, extend_ok, n_slots):
    """Motif counts per root; shape ``(len(roots), n_slots)``.

    Only nodes within ``hop_k`` hops of the root take part (the induced
    k-neighbourhood).  ``extend_ok[d, code]`` gates growth of a partial
    subset of size ``d``; an all-True table gives the plain census.
    """
    n = colors.shape[0]
    out = np.zeros((roots.shape[0], n_slots), dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    cnt = np.zeros(n, dtype=np.int64)
    pos_in_sub = np.full(n, -1, dtype=np.int64)
    ext = np.empty((max_size + 1, n), dtype=np.int64)
    cursor = np.full(max_size + 1, -1, dtype=np.int64)
    code = np.zeros(max_size + 1, dtype=np.int64)
    sub = np.empty(max_size, dtype=np.int64)

    for e in range(roots.shape[0]):
        root = roots[e]
        # BFS to hop_k; queue[0:tail] are the reached nodes
        head = 0
        tail = 1
        queue[0] = root
        dist[root] = 0
        while head < tail:
            v = queue[head]
            head += 1
            if dist[v] == hop_k:
                continue
            for p in range(indptr[v], indptr[v + 1]):
                u = indices[p]
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    queue[tail] = u
                    tail += 1

        # depth 1: the root alone
        sub[0] = root
        pos_in_sub[root] = 0
        cnt[root] += 1
        nlen = 0
        for p in range(indptr[root], indptr[root + 1]):
            u = indices[p]
            cnt[u] += 1
            if dist[u] >= 0:
                ext[1, nlen] = u
                nlen += 1
        code[1] = colors[root]
        if max_size > 1 and extend_ok[1, code[1]]:
            cursor[1] = nlen - 1
        else:
            cursor[1] = -1
        d = 1

        while d >= 1:
            i = cursor[d]
            if i < 0:
                # frame exhausted: drop the node that opened it
                w = sub[d - 1]
                pos_in_sub[w] = -1
                cnt[w] -= 1
                for p in range(indptr[w], indptr[w + 1]):
                    cnt[indices[p]] -= 1
                d -= 1
                continue
            w = ext[d, i]
            cursor[d] = i - 1
            # next extension set: unprocessed siblings + exclusive neighbours of w
            for t in range(i):
                ext[d + 1, t] = ext[d, t]
            nlen = i
            for p in range(indptr[w], indptr[w + 1]):
                u = indices[p]
                if cnt[u] == 0 and dist[u] >= 0:
                    ext[d + 1, nlen] = u
                    nlen += 1
            c = code[d] | (colors[w] << d)
            base = ADJ_OFFSET + d * (d - 1) // 2
            for p in range(indptr[w], indptr[w + 1]):
                u = indices[p]
                cnt[u] += 1
                q = pos_in_sub[u]
                if q >= 0:
                    c |= 1 << (base + q)
            cnt[w] += 1
            pos_in_sub[w] = d
            sub[d] = w
            d += 1
            code[d] = c
            if d >= min_size:
                s = slots[d, c]
                if s >= 0:
                    out[e, s] += 1
            if d < max_size and extend_ok[d, c]:
                cursor[d] = nlen - 1
            else:
                cursor[d] = -1

        for t in range(tail):
            dist[queue[t]] = -1
    return out
