"""Array kernels used by the graph and clustering layers.

All graph work runs over a CSR adjacency (indptr/indices/weights arrays).
The kernels are plain loops so that numba can compile them; by default
they are @njit-compiled, and setting UWSNSIM_PURE_NUMPY=1 in the
environment runs the identical functions interpreted (same results,
useful as a reference path and for debugging). benchmarks/bench_kernels.py
compares the two.
"""

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("UWSNSIM_PURE_NUMPY", "").lower() not in (
    "1",
    "true",
    "yes",
)


def _bfs_hops(indptr, indices, src, out):
    # out: preallocated int32[n], filled with -1 for unreachable
    n = indptr.shape[0] - 1
    for i in range(n):
        out[i] = -1
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    out[src] = 0
    queue[tail] = src
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = out[u]
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if out[v] < 0:
                out[v] = du + 1
                queue[tail] = v
                tail += 1
    return out


def _dijkstra(indptr, indices, weights, src):
    """Single-source min-cost distances and predecessor array.

    Ties on distance settle the lowest node index first, and a
    predecessor is only replaced on a strict improvement, so the output
    is deterministic.
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf, dtype=np.float64)
    prev = np.full(n, -1, dtype=np.int32)
    done = np.zeros(n, dtype=np.bool_)
    dist[src] = 0.0
    for _ in range(n):
        u = -1
        best = np.inf
        for i in range(n):
            if not done[i] and dist[i] < best:
                best = dist[i]
                u = i
        if u < 0:
            break
        done[u] = True
        du = dist[u]
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            nd = du + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                prev[v] = u
    return dist, prev


def _assign_clusters(points, centroids):
    """Nearest-centroid labels and squared distances (first-min tie rule)."""
    n = points.shape[0]
    k = centroids.shape[0]
    labels = np.empty(n, dtype=np.int64)
    sq = np.empty(n, dtype=np.float64)
    for i in range(n):
        best = np.inf
        arg = 0
        for c in range(k):
            dx = points[i, 0] - centroids[c, 0]
            dy = points[i, 1] - centroids[c, 1]
            d = dx * dx + dy * dy
            if d < best:
                best = d
                arg = c
        labels[i] = arg
        sq[i] = best
    return labels, sq


if NUMBA_ENABLED:
    from numba import njit

    _wrap = njit(cache=True)
else:

    def _wrap(fn):
        return fn


bfs_hops = _wrap(_bfs_hops)
dijkstra = _wrap(_dijkstra)
assign_clusters = _wrap(_assign_clusters)


def _all_hops(indptr, indices):
    n = indptr.shape[0] - 1
    mat = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        bfs_hops(indptr, indices, s, mat[s])
    return mat


all_hops = _wrap(_all_hops)


def hops_from(indptr, indices, src):
    """BFS hop counts from one source (-1 where unreachable)."""
    out = np.empty(indptr.shape[0] - 1, dtype=np.int32)
    return bfs_hops(indptr, indices, np.int64(src), out)
