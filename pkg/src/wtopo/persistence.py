"""Persistence diagrams (union-find and matrix-reduction algorithms) and
matching-based diagram distances (bottleneck, p-Wasserstein)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .complexes import Filtration

UNION_FIND = "union-find"
REDUCTION = "reduction"

_EMPTY_POINTS = np.empty((0, 2), dtype=np.float64)
_EMPTY_BIRTHS = np.empty(0, dtype=np.float64)


@dataclass(frozen=True)
class PersistenceDiagram:
    """Birth/death pairs per homology dimension.

    ``points[d]`` is an (m, 2) array of finite (birth, death) pairs sorted by
    (birth, death); ``essential[d]`` holds births of never-dying classes.
    Zero-persistence pairs (death == birth) are dropped at construction.
    """

    points: dict[int, np.ndarray] = field(default_factory=dict)
    essential: dict[int, np.ndarray] = field(default_factory=dict)

    def dims(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.points) | set(self.essential)))

    def points_in(self, dim: int) -> np.ndarray:
        return self.points.get(dim, _EMPTY_POINTS)

    def essential_in(self, dim: int) -> np.ndarray:
        return self.essential.get(dim, _EMPTY_BIRTHS)

    def num_points(self, dim: int, include_essential: bool = False) -> int:
        n = self.points_in(dim).shape[0]
        if include_essential:
            n += self.essential_in(dim).shape[0]
        return n

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        if self.dims() != other.dims():
            return False
        return all(
            np.array_equal(self.points_in(d), other.points_in(d))
            and np.array_equal(self.essential_in(d), other.essential_in(d))
            for d in self.dims())

    def to_json_obj(self) -> list[dict]:
        return [{"dim": d,
                 "points": [[float(b), float(dd)] for b, dd in self.points_in(d)],
                 "essential": [float(b) for b in self.essential_in(d)]}
                for d in self.dims()]

    @classmethod
    def from_json_obj(cls, obj: list[dict]) -> "PersistenceDiagram":
        points, essential = {}, {}
        for entry in obj:
            d = int(entry["dim"])
            pts = np.asarray(entry.get("points", []), dtype=np.float64).reshape(-1, 2)
            ess = np.asarray(entry.get("essential", []), dtype=np.float64)
            if pts.size:
                points[d] = pts
            if ess.size:
                essential[d] = ess
        return cls._build(points, essential)

    @classmethod
    def _build(cls, points: dict[int, np.ndarray],
               essential: dict[int, np.ndarray]) -> "PersistenceDiagram":
        pts = {}
        for d, arr in points.items():
            arr = np.asarray(arr, dtype=np.float64).reshape(-1, 2)
            arr = arr[arr[:, 1] > arr[:, 0]]
            if arr.size:
                order = np.lexsort((arr[:, 1], arr[:, 0]))
                pts[d] = arr[order]
        ess = {d: np.sort(np.asarray(a, dtype=np.float64))
               for d, a in essential.items() if np.asarray(a).size}
        return cls(pts, ess)


def _filtration_arrays(f: Filtration):
    verts, edges, higher = [], [], []
    for idx, s in enumerate(f.simplices):
        if s.dim == 0:
            verts.append((s.vertices[0], s.scale, idx))
        elif s.dim == 1:
            edges.append((s.vertices, s.scale))
        else:
            higher.append(s)
    return verts, edges, higher


def _union_find_h0(f: Filtration) -> PersistenceDiagram:
    from . import _kernels

    verts, edges, _ = _filtration_arrays(f)
    if not verts:
        return PersistenceDiagram()
    vid_to_pos = {vid: pos for pos, (vid, _, _) in enumerate(verts)}
    vert_scales = np.array([s for _, s, _ in verts], dtype=np.float64)
    vert_rank = np.array([idx for _, _, idx in verts], dtype=np.int64)
    edge_u = np.array([vid_to_pos[e[0][0]] for e in edges], dtype=np.int64)
    edge_v = np.array([vid_to_pos[e[0][1]] for e in edges], dtype=np.int64)
    edge_scales = np.array([e[1] for e in edges], dtype=np.float64)
    births, deaths, parent = _kernels.h0_merge_pairs(
        vert_scales, vert_rank, edge_u, edge_v, edge_scales)

    roots = set()
    for v in range(len(verts)):
        r = v
        while parent[r] != r:
            r = parent[r]
        roots.add(int(r))
    # the kernel re-parents younger onto elder, so each root keeps its own birth
    essential = np.array(sorted(vert_scales[r] for r in roots), dtype=np.float64)
    pts = np.column_stack([births, deaths]) if births.size else _EMPTY_POINTS
    return PersistenceDiagram._build({0: pts}, {0: essential})


def _reduction(f: Filtration) -> PersistenceDiagram:
    index_of = {s.vertices: i for i, s in enumerate(f.simplices)}
    columns: list[set[int]] = []
    for s in f.simplices:
        if s.dim == 0:
            columns.append(set())
        else:
            columns.append({index_of[s.vertices[:k] + s.vertices[k + 1:]]
                            for k in range(len(s.vertices))})
    low_to_col: dict[int, int] = {}
    pair_of: dict[int, int] = {}
    for j, col in enumerate(columns):
        while col:
            low = max(col)
            k = low_to_col.get(low)
            if k is None:
                break
            col ^= columns[k]
        if col:
            low = max(col)
            low_to_col[low] = j
            pair_of[low] = j

    points: dict[int, list[tuple[float, float]]] = {}
    essential: dict[int, list[float]] = {}
    for i, s in enumerate(f.simplices):
        if columns[i]:
            continue                       # i is a death column, not a birth
        j = pair_of.get(i)
        if j is None:
            essential.setdefault(s.dim, []).append(s.scale)
        else:
            points.setdefault(s.dim, []).append((s.scale, f.simplices[j].scale))
    return PersistenceDiagram._build(
        {d: np.array(p, dtype=np.float64) for d, p in points.items()},
        {d: np.array(b, dtype=np.float64) for d, b in essential.items()})


def compute_persistence(f: Filtration, algorithm: str = REDUCTION,
                        homology_dims: tuple[int, ...] | None = None) -> PersistenceDiagram:
    """Persistence diagram of a filtration.

    ``union-find`` runs Kruskal-style component merging and is valid for
    dimension-0 output only; ``reduction`` runs the standard boundary-matrix
    column reduction in filtration order (O(len(f)^3) worst case) and yields
    every dimension present. Both use the elder rule with ties broken toward
    the lower vertex index and emit one essential dimension-0 point per
    connected component of the final complex.
    """
    if algorithm == UNION_FIND:
        if homology_dims is not None and any(d > 0 for d in homology_dims):
            raise ValueError("union-find computes dimension-0 persistence only")
        diagram = _union_find_h0(f)
    elif algorithm == REDUCTION:
        diagram = _reduction(f)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if homology_dims is not None:
        diagram = PersistenceDiagram(
            {d: p for d, p in diagram.points.items() if d in homology_dims},
            {d: e for d, e in diagram.essential.items() if d in homology_dims})
    return diagram


# ---------------------------------------------------------------------------
# diagram distances
# ---------------------------------------------------------------------------

def _linf(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    # pairwise L-inf costs between (n,2) and (m,2) point arrays
    return np.max(np.abs(p[:, None, :] - q[None, :, :]), axis=2) \
        if p.size and q.size else np.zeros((p.shape[0], q.shape[0]))


def _diag_cost(p: np.ndarray) -> np.ndarray:
    return (p[:, 1] - p[:, 0]) / 2.0 if p.size else np.zeros(0)


def _essential_costs(e1: np.ndarray, e2: np.ndarray) -> np.ndarray | None:
    """Sorted pairing of essential births; None when counts differ."""
    if e1.shape[0] != e2.shape[0]:
        return None
    if e1.shape[0] == 0:
        return np.zeros(0)
    return np.abs(np.sort(e1) - np.sort(e2))


def _matching_feasible(cross: np.ndarray, diag1: np.ndarray, diag2: np.ndarray,
                       t: float) -> bool:
    """Perfect matching test for bottleneck threshold t.

    Standard construction: left side = diagram-1 points plus diagonal copies of
    diagram-2 points, right side = diagram-2 points plus diagonal copies of
    diagram-1 points. A point may pair with its own diagonal copy when its
    diagonal cost is <= t; copy-copy pairs are free. Feasible iff a perfect
    matching exists (Kuhn's augmenting paths).
    """
    n, m = cross.shape

    def neighbors(i: int):
        if i < n:
            for j in range(m):
                if cross[i, j] <= t:
                    yield j
            if diag1[i] <= t:
                yield m + i
        else:
            k = i - n
            if diag2[k] <= t:
                yield k
            yield from range(m, m + n)

    owner = [-1] * (n + m)     # right index -> left index

    def augment(i: int, seen: set[int]) -> bool:
        for j in neighbors(i):
            if j in seen:
                continue
            seen.add(j)
            if owner[j] == -1 or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    return all(augment(i, set()) for i in range(n + m))


def _bottleneck_finite(p1: np.ndarray, p2: np.ndarray) -> float:
    if p1.shape[0] == 0 and p2.shape[0] == 0:
        return 0.0
    cross = _linf(p1, p2)
    d1, d2 = _diag_cost(p1), _diag_cost(p2)
    candidates = np.unique(np.concatenate([[0.0], cross.ravel(), d1, d2]))
    lo, hi = 0, len(candidates) - 1
    # the all-to-diagonal matching is feasible at max(d1, d2), always a candidate
    while lo < hi:
        mid = (lo + hi) // 2
        if _matching_feasible(cross, d1, d2, float(candidates[mid])):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def _wasserstein_finite(p1: np.ndarray, p2: np.ndarray, p: float) -> float:
    n, m = p1.shape[0], p2.shape[0]
    if n == 0 and m == 0:
        return 0.0
    size = n + m
    cost = np.zeros((size, size))
    if n and m:
        cost[:n, :m] = _linf(p1, p2) ** p
    if n:
        cost[:n, m:] = _diag_cost(p1)[:, None] ** p
    if m:
        cost[n:, :m] = _diag_cost(p2)[None, :] ** p
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def diagram_distance(d1: PersistenceDiagram, d2: PersistenceDiagram,
                     mode: str = "bottleneck", p: float = 1.0,
                     dimension: int = 0, essential: str = "match") -> float:
    """Matching distance between two diagrams restricted to one dimension.

    Ground metric is L-inf on the plane; unmatched points pay (death-birth)/2
    to the diagonal. Essential points are matched essential-to-essential by
    sorted births (``essential="match"``, inf when the counts differ) or
    ignored (``essential="drop"``). Wasserstein uses an exact assignment and
    requires p >= 1.
    """
    if essential not in ("match", "drop"):
        raise ValueError("essential must be 'match' or 'drop'")
    p1, p2 = d1.points_in(dimension), d2.points_in(dimension)
    if essential == "match":
        ecosts = _essential_costs(d1.essential_in(dimension), d2.essential_in(dimension))
        if ecosts is None:
            return float(np.inf)
    else:
        ecosts = np.zeros(0)
    if mode == "bottleneck":
        base = _bottleneck_finite(p1, p2)
        return float(max(base, ecosts.max() if ecosts.size else 0.0))
    if mode == "wasserstein":
        if p < 1.0:
            raise ValueError("wasserstein requires p >= 1")
        total = _wasserstein_finite(p1, p2, p)
        total += float((ecosts ** p).sum())
        return float(total ** (1.0 / p))
    raise ValueError(f"unknown mode {mode!r}")
