"""Timing comparison of the jitted kernels against the interpreted path.

Run normally to compare the selected (numba) implementations with the
same functions interpreted; with UWSNSIM_PURE_NUMPY=1 both columns run
interpreted, which shows what the env flag costs.

    python benchmarks/bench_kernels.py --side 20
"""

import argparse
import time

import numpy as np

from uwsnsim import kernels, topology


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--side", type=int, default=20, help="grid side (n = side^2)")
    parser.add_argument("--sources", type=int, default=10, help="dijkstra source count")
    args = parser.parse_args()

    net = topology.generate_grid(args.side, 100.0, 120.0)
    graph = topology.NetworkGraph.from_topology(net)
    indptr, indices, weights = graph.csr()
    n = len(graph)
    points = np.array([graph.positions[i] for i in graph.node_ids])
    centroids = points[np.linspace(0, n - 1, 6, dtype=int)].copy()

    # compile outside the timed region
    kernels.hops_from(indptr, indices, 0)
    kernels.dijkstra(indptr, indices, weights, 0)
    kernels.assign_clusters(points, centroids)

    def interpreted_all_hops():
        mat = np.empty((n, n), dtype=np.int32)
        for s in range(n):
            kernels._bfs_hops(indptr, indices, s, mat[s])
        return mat

    cases = [
        (
            f"all-pairs BFS ({n} nodes)",
            lambda: kernels.all_hops(indptr, indices),
            interpreted_all_hops,
        ),
        (
            f"dijkstra x{args.sources}",
            lambda: [kernels.dijkstra(indptr, indices, weights, s) for s in range(args.sources)],
            lambda: [kernels._dijkstra(indptr, indices, weights, s) for s in range(args.sources)],
        ),
        (
            "k-means assign x100",
            lambda: [kernels.assign_clusters(points, centroids) for _ in range(100)],
            lambda: [kernels._assign_clusters(points, centroids) for _ in range(100)],
        ),
    ]

    print(f"numba enabled: {kernels.NUMBA_ENABLED} (set UWSNSIM_PURE_NUMPY=1 to disable)")
    print(f"{'kernel':<28} {'selected':>12} {'interpreted':>12} {'speedup':>9}")
    for name, selected, interpreted in cases:
        t_sel = timeit(selected)
        t_int = timeit(interpreted, repeat=1)
        print(f"{name:<28} {t_sel * 1e3:>10.2f}ms {t_int * 1e3:>10.2f}ms {t_int / t_sel:>8.1f}x")


if __name__ == "__main__":
    main()
