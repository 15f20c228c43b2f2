"""Shared seeded generators and brute-force oracles for the test suite."""

from itertools import combinations, permutations

import numpy as np

from wtopo import Graph
from wtopo.persistence import PersistenceDiagram


def random_graph(rng, n, p=0.25, weighted=False):
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                w = float(rng.uniform(0.5, 2.0)) if weighted else 1.0
                edges.append((u, v, w))
    return Graph.from_edges(n, edges)


def random_connected_graph(rng, n, extra=0, weighted=False):
    """Random spanning tree plus ``extra`` distinct edges."""
    perm = rng.permutation(n)
    pairs = set()
    for i in range(1, n):
        u, v = int(perm[i]), int(perm[rng.integers(0, i)])
        pairs.add((min(u, v), max(u, v)))
    target = min(n * (n - 1) // 2, n - 1 + extra)
    while len(pairs) < target:
        u, v = int(rng.integers(0, n)), int(rng.integers(0, n))
        if u != v:
            pairs.add((min(u, v), max(u, v)))
    edges = [(a, b, float(rng.uniform(0.5, 2.0)) if weighted else 1.0)
             for a, b in sorted(pairs)]
    return Graph.from_edges(n, edges)


def random_filtration(rng, n_max=30, max_dim=1):
    """Seeded VR or witness filtration over a random graph's landmarks."""
    from wtopo import geodesics, select_landmarks, vr_filtration, witness_filtration

    n = int(rng.integers(2, n_max + 1))
    g = random_graph(rng, n, p=0.25, weighted=bool(rng.integers(0, 2)))
    ls = select_landmarks(g, float(rng.uniform(0.3, 1.0)))
    rows = geodesics(g, ls.landmarks).dists
    land = rows[:, list(ls.landmarks)]
    if rng.integers(0, 2):
        return vr_filtration(land, max_dim, float(rng.uniform(1.0, 5.0)))
    return witness_filtration(land, rows.T, max_dim, float(rng.uniform(1.0, 5.0)),
                              nu=int(rng.integers(0, 2)))


def random_diagram(rng, max_points=8, birth_hi=0.8, pers_hi=1.0, dim=0):
    """Finite-point diagram with births in [0, birth_hi] and persistence in
    (0, pers_hi]."""
    m = int(rng.integers(0, max_points + 1))
    births = rng.uniform(0.0, birth_hi, size=m)
    pers = rng.uniform(0.05, pers_hi, size=m)
    pts = np.column_stack([births, births + pers]) if m else np.empty((0, 2))
    return PersistenceDiagram._build({dim: pts}, {})


def diagram_of(points, essential=(), dim=0):
    return PersistenceDiagram._build(
        {dim: np.asarray(points, dtype=np.float64).reshape(-1, 2)},
        {dim: np.asarray(essential, dtype=np.float64)})


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def oracle_witness_edge_scales(witness_dists, nu):
    """Plain-python lazy-witness edge scales (independent of the kernels)."""
    wd = np.asarray(witness_dists, dtype=float)
    n_wit, n_land = wd.shape
    out = np.full((n_land, n_land), np.inf)
    for i in range(n_land):
        for j in range(i + 1, n_land):
            best = np.inf
            for w in range(n_wit):
                finite = sorted(x for x in wd[w] if np.isfinite(x))
                if nu == 0:
                    relax = 0.0
                elif nu <= len(finite):
                    relax = finite[nu - 1]
                else:
                    continue
                m = max(wd[w, i], wd[w, j])
                if not np.isfinite(m):
                    continue
                best = min(best, max(0.0, m - relax))
            out[i, j] = out[j, i] = best
    return out


def oracle_betti_counts(filtration, alpha):
    """(betti0, betti1) of the <=1-skeleton at scale alpha via Euler counts."""
    verts = [s for s in filtration.simplices if s.dim == 0 and s.scale <= alpha]
    edges = [s for s in filtration.simplices if s.dim == 1 and s.scale <= alpha]
    assert all(s.dim <= 1 for s in filtration.simplices if s.scale <= alpha), \
        "euler oracle only valid for max_dim <= 1 prefixes"
    parent = {s.vertices[0]: s.vertices[0] for s in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        a, b = find(e.vertices[0]), find(e.vertices[1])
        if a != b:
            parent[a] = b
    comps = len({find(v) for v in parent})
    betti1 = len(edges) - len(verts) + comps
    return comps, betti1


def betti_from_diagram(diagram, dim, alpha):
    pts = diagram.points_in(dim)
    alive = int(np.sum((pts[:, 0] <= alpha) & (pts[:, 1] > alpha))) if pts.size else 0
    ess = diagram.essential_in(dim)
    alive += int(np.sum(ess <= alpha)) if ess.size else 0
    return alive


def _linf_point(a, b):
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def _diag_point(a):
    return (a[1] - a[0]) / 2.0


def oracle_matching_costs(P, Q):
    """Yield the cost multiset of every point matching (rest to the diagonal)."""
    n, m = len(P), len(Q)
    for k in range(min(n, m) + 1):
        for ps in combinations(range(n), k):
            for qs in permutations(range(m), k):
                costs = [_linf_point(P[i], Q[j]) for i, j in zip(ps, qs)]
                costs += [_diag_point(P[i]) for i in range(n) if i not in ps]
                costs += [_diag_point(Q[j]) for j in range(m) if j not in qs]
                yield costs


def oracle_bottleneck(P, Q):
    return min((max(c) if c else 0.0) for c in oracle_matching_costs(P, Q))


def oracle_wasserstein(P, Q, p):
    return min(sum(x ** p for x in c) for c in oracle_matching_costs(P, Q)) ** (1 / p)
