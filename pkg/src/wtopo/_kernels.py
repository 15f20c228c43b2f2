"""Hot numeric kernels: numba-jitted loops with pure-numpy fallbacks.

Every public function here has two implementations with identical semantics:
a loop kernel compiled with ``numba.njit`` and a vectorized (or plain-python,
where the loop is cheap) numpy path. The numba path is used when numba imports
cleanly and the environment variable ``WTOPO_NO_NUMBA`` is unset/empty/"0";
set ``WTOPO_NO_NUMBA=1`` to force the fallback. ``benchmarks/bench_kernels.py``
times the two paths against each other.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_FALLBACK = os.environ.get("WTOPO_NO_NUMBA", "").strip() not in ("", "0")

try:
    if _FORCE_FALLBACK:
        raise ImportError("numba disabled via WTOPO_NO_NUMBA")
    from numba import njit

    USING_NUMBA = True
except ImportError:  # pragma: no cover - exercised via WTOPO_NO_NUMBA in CI
    njit = None
    USING_NUMBA = False


# ---------------------------------------------------------------------------
# loop sources (numba-compatible; also runnable as plain python)
# ---------------------------------------------------------------------------

def _bfs_rows_loops(indptr, indices, sources, out):
    n = out.shape[1]
    queue = np.empty(n, np.int64)
    for r in range(sources.shape[0]):
        row = out[r]
        src = sources[r]
        row[src] = 0.0
        queue[0] = src
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            du = row[u]
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if row[v] == np.inf:
                    row[v] = du + 1.0
                    queue[tail] = v
                    tail += 1


def _dijkstra_rows_loops(indptr, indices, weights, sources, out):
    # binary heap with lazy deletion; capacity = one push per successful relax
    cap = indices.shape[0] + 1
    hd = np.empty(cap, np.float64)
    hv = np.empty(cap, np.int64)
    for r in range(sources.shape[0]):
        dist = out[r]
        src = sources[r]
        dist[src] = 0.0
        hd[0] = 0.0
        hv[0] = src
        size = 1
        while size > 0:
            d0 = hd[0]
            v0 = hv[0]
            size -= 1
            hd[0] = hd[size]
            hv[0] = hv[size]
            i = 0
            while True:
                left = 2 * i + 1
                if left >= size:
                    break
                m = left
                right = left + 1
                if right < size and hd[right] < hd[left]:
                    m = right
                if hd[m] < hd[i]:
                    hd[i], hd[m] = hd[m], hd[i]
                    hv[i], hv[m] = hv[m], hv[i]
                    i = m
                else:
                    break
            if d0 > dist[v0]:
                continue
            for k in range(indptr[v0], indptr[v0 + 1]):
                u = indices[k]
                nd = d0 + weights[k]
                if nd < dist[u]:
                    dist[u] = nd
                    j = size
                    hd[j] = nd
                    hv[j] = u
                    size += 1
                    while j > 0:
                        p = (j - 1) // 2
                        if hd[j] < hd[p]:
                            hd[j], hd[p] = hd[p], hd[j]
                            hv[j], hv[p] = hv[p], hv[j]
                            j = p
                        else:
                            break


def _witness_edge_scales_loops(witness_dists, m_nu, out):
    n_wit, n_land = witness_dists.shape
    for i in range(n_land):
        for j in range(i + 1, n_land):
            best = np.inf
            for w in range(n_wit):
                a = witness_dists[w, i]
                b = witness_dists[w, j]
                m = a if a > b else b
                if m == np.inf or m_nu[w] == np.inf:
                    continue
                v = m - m_nu[w]
                if v < 0.0:
                    v = 0.0
                if v < best:
                    best = v
            out[i, j] = best
            out[j, i] = best


def _h0_merge_loops(vert_scales, vert_rank, edge_u, edge_v, edge_scales,
                    parent, comp_scale, comp_rank, out_birth, out_death):
    n_pairs = 0
    for e in range(edge_u.shape[0]):
        ru = edge_u[e]
        while parent[ru] != ru:
            parent[ru] = parent[parent[ru]]
            ru = parent[ru]
        rv = edge_v[e]
        while parent[rv] != rv:
            parent[rv] = parent[parent[rv]]
            rv = parent[rv]
        if ru == rv:
            continue
        # elder rule: the component with smaller (birth scale, vertex rank) survives
        if (comp_scale[ru] < comp_scale[rv]
                or (comp_scale[ru] == comp_scale[rv] and comp_rank[ru] < comp_rank[rv])):
            elder, younger = ru, rv
        else:
            elder, younger = rv, ru
        out_birth[n_pairs] = comp_scale[younger]
        out_death[n_pairs] = edge_scales[e]
        n_pairs += 1
        parent[younger] = elder
    return n_pairs


if USING_NUMBA:
    _bfs_rows_jit = njit(cache=True)(_bfs_rows_loops)
    _dijkstra_rows_jit = njit(cache=True)(_dijkstra_rows_loops)
    _witness_edge_scales_jit = njit(cache=True)(_witness_edge_scales_loops)
    _h0_merge_jit = njit(cache=True)(_h0_merge_loops)


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------

def _bfs_rows_numpy(indptr, indices, sources, out):
    for r in range(sources.shape[0]):
        dist = out[r]
        dist[sources[r]] = 0.0
        frontier = np.array([sources[r]], dtype=np.int64)
        level = 0.0
        while frontier.size:
            starts = indptr[frontier]
            counts = indptr[frontier + 1] - starts
            total = int(counts.sum())
            if total == 0:
                break
            base = np.repeat(starts, counts)
            offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
            nbrs = indices[base + offs]
            fresh = np.unique(nbrs[dist[nbrs] == np.inf])
            level += 1.0
            dist[fresh] = level
            frontier = fresh


def _dijkstra_rows_numpy(indptr, indices, weights, sources, out):
    n = out.shape[1]
    for r in range(sources.shape[0]):
        dist = out[r]
        dist[sources[r]] = 0.0
        done = np.zeros(n, dtype=bool)
        for _ in range(n):
            cand = np.where(done, np.inf, dist)
            u = int(np.argmin(cand))
            if cand[u] == np.inf:
                break
            done[u] = True
            sl = slice(indptr[u], indptr[u + 1])
            nb = indices[sl]
            nd = dist[u] + weights[sl]
            upd = nd < dist[nb]
            dist[nb[upd]] = nd[upd]


def _witness_edge_scales_numpy(witness_dists, m_nu, out):
    n_land = witness_dists.shape[1]
    active = m_nu != np.inf
    wd = witness_dists[active]
    mn = m_nu[active]
    if wd.shape[0] == 0:
        return
    for i in range(n_land):
        pairwise = np.maximum(wd[:, i : i + 1], wd)  # (W, L)
        vals = np.where(pairwise == np.inf, np.inf,
                        np.maximum(pairwise - mn[:, None], 0.0))
        out[i, :] = vals.min(axis=0)
    np.fill_diagonal(out, np.inf)


def _h0_merge_python(vert_scales, vert_rank, edge_u, edge_v, edge_scales,
                     parent, comp_scale, comp_rank, out_birth, out_death):
    return _h0_merge_loops(vert_scales, vert_rank, edge_u, edge_v, edge_scales,
                           parent, comp_scale, comp_rank, out_birth, out_death)


# ---------------------------------------------------------------------------
# public dispatchers
# ---------------------------------------------------------------------------

def bfs_rows(indptr: np.ndarray, indices: np.ndarray, sources: np.ndarray,
             num_nodes: int) -> np.ndarray:
    """Unit-weight geodesic rows from each source; unreached entries are inf."""
    out = np.full((sources.shape[0], num_nodes), np.inf)
    if USING_NUMBA:
        _bfs_rows_jit(indptr, indices, sources, out)
    else:
        _bfs_rows_numpy(indptr, indices, sources, out)
    return out


def dijkstra_rows(indptr: np.ndarray, indices: np.ndarray, weights: np.ndarray,
                  sources: np.ndarray, num_nodes: int) -> np.ndarray:
    """Nonnegative-weight shortest-path rows from each source."""
    out = np.full((sources.shape[0], num_nodes), np.inf)
    if USING_NUMBA:
        _dijkstra_rows_jit(indptr, indices, weights, sources, out)
    else:
        _dijkstra_rows_numpy(indptr, indices, weights, sources, out)
    return out


def witness_edge_scales(witness_dists: np.ndarray, m_nu: np.ndarray) -> np.ndarray:
    """Lazy-witness entry scale for every landmark pair (inf when unwitnessed).

    Entry (i, j) is min over witnesses w of max(0, max(d(w,i), d(w,j)) - m_nu[w]).
    Witness rows whose relaxation term is inf (fewer reachable landmarks than
    the relaxation order) never witness anything. The diagonal is inf.
    """
    n_land = witness_dists.shape[1]
    out = np.full((n_land, n_land), np.inf)
    if USING_NUMBA:
        _witness_edge_scales_jit(witness_dists, m_nu, out)
    else:
        _witness_edge_scales_numpy(witness_dists, m_nu, out)
    return out


def h0_merge_pairs(vert_scales: np.ndarray, vert_rank: np.ndarray,
                   edge_u: np.ndarray, edge_v: np.ndarray,
                   edge_scales: np.ndarray):
    """Kruskal-style merge events over edges given in filtration order.

    Returns (births, deaths, parent) where births/deaths list one entry per
    merge (elder rule: older component survives, ties to the lower vertex
    rank) and parent is the final union-find forest for component extraction.
    """
    nv = vert_scales.shape[0]
    parent = np.arange(nv, dtype=np.int64)
    comp_scale = vert_scales.copy()
    comp_rank = vert_rank.copy()
    ne = edge_u.shape[0]
    out_birth = np.empty(ne, np.float64)
    out_death = np.empty(ne, np.float64)
    fn = _h0_merge_jit if USING_NUMBA else _h0_merge_python
    n_pairs = fn(vert_scales, vert_rank, edge_u, edge_v, edge_scales,
                 parent, comp_scale, comp_rank, out_birth, out_death)
    return out_birth[:n_pairs], out_death[:n_pairs], parent
