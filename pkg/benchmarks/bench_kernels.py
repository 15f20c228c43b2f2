#!/usr/bin/env python3
"""Benchmark the numba-jitted kernels against their numpy fallbacks.

Runs each hot kernel on the same seeded inputs through both implementations
and prints a timing table. The jitted path is warmed once before timing so
compilation cost is reported separately.

Usage: python benchmarks/bench_kernels.py [--nodes 2000] [--landmarks 100]
       [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wtopo import _kernels
from wtopo.complexes import relaxation_terms
from wtopo.graph import Graph


def seeded_graph(n: int, extra: int, seed: int = 0) -> Graph:
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    pairs = set()
    for i in range(1, n):
        u, v = int(perm[i]), int(perm[rng.integers(0, i)])
        pairs.add((min(u, v), max(u, v)))
    while len(pairs) < n - 1 + extra:
        u, v = int(rng.integers(0, n)), int(rng.integers(0, n))
        if u != v:
            pairs.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, sorted(pairs))


def timed(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=2000)
    parser.add_argument("--landmarks", type=int, default=100)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if not _kernels.USING_NUMBA:
        print("numba is unavailable or disabled (WTOPO_NO_NUMBA); "
              "only the numpy path can be timed.")
        return 1

    n, L = args.nodes, args.landmarks
    g = seeded_graph(n, extra=n)
    indptr, indices, weights = g._csr
    sources = np.arange(L, dtype=np.int64)

    rng = np.random.default_rng(1)
    witness_dists = rng.uniform(0.0, 6.0, size=(n, L))
    m_nu = relaxation_terms(witness_dists, 1)

    ne = L * (L - 1) // 2
    edge_u = np.repeat(np.arange(L - 1), np.arange(L - 1, 0, -1)).astype(np.int64)
    edge_v = np.concatenate([np.arange(i + 1, L) for i in range(L - 1)]).astype(np.int64)
    edge_scales = np.sort(rng.uniform(0.0, 5.0, size=ne))
    vert_scales = np.zeros(L)
    vert_rank = np.arange(L, dtype=np.int64)

    def bfs_jit():
        out = np.full((L, n), np.inf)
        _kernels._bfs_rows_jit(indptr, indices, sources, out)

    def bfs_np():
        out = np.full((L, n), np.inf)
        _kernels._bfs_rows_numpy(indptr, indices, sources, out)

    def dij_jit():
        out = np.full((L, n), np.inf)
        _kernels._dijkstra_rows_jit(indptr, indices, weights, sources, out)

    def dij_np():
        out = np.full((L, n), np.inf)
        _kernels._dijkstra_rows_numpy(indptr, indices, weights, sources, out)

    def wit_jit():
        out = np.full((L, L), np.inf)
        _kernels._witness_edge_scales_jit(witness_dists, m_nu, out)

    def wit_np():
        out = np.full((L, L), np.inf)
        _kernels._witness_edge_scales_numpy(witness_dists, m_nu, out)

    def h0_jit():
        parent = np.arange(L, dtype=np.int64)
        _kernels._h0_merge_jit(vert_scales, vert_rank, edge_u, edge_v,
                               edge_scales, parent, vert_scales.copy(),
                               vert_rank.copy(), np.empty(ne), np.empty(ne))

    def h0_np():
        parent = np.arange(L, dtype=np.int64)
        _kernels._h0_merge_python(vert_scales, vert_rank, edge_u, edge_v,
                                  edge_scales, parent, vert_scales.copy(),
                                  vert_rank.copy(), np.empty(ne), np.empty(ne))

    cases = [
        (f"bfs_rows ({L} sources, {n} nodes)", bfs_jit, bfs_np),
        (f"dijkstra_rows ({L} sources, {n} nodes)", dij_jit, dij_np),
        (f"witness_edge_scales ({n} x {L})", wit_jit, wit_np),
        (f"h0_merge ({ne} edges)", h0_jit, h0_np),
    ]

    print(f"{'kernel':<44} {'compile':>9} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, jit_fn, np_fn in cases:
        t0 = time.perf_counter()
        jit_fn()                                     # warm / compile
        compile_s = time.perf_counter() - t0
        t_jit = timed(jit_fn, args.repeats)
        t_np = timed(np_fn, args.repeats)
        print(f"{name:<44} {compile_s:>8.2f}s {t_jit * 1e3:>8.2f}ms "
              f"{t_np * 1e3:>8.2f}ms {t_np / t_jit:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
