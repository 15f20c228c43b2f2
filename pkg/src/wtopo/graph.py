"""Graph representation, geodesic metric, and graph-difference accounting.

Graphs are simple, undirected, positively weighted, and immutable. Distances
between nodes in different connected components are marked with the
``UNREACHABLE`` sentinel (``inf``) rather than a large finite number, so
downstream filtrations never create simplices across components.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import IO, Iterable, Sequence

import numpy as np

from . import _kernels

UNREACHABLE = np.inf


class GraphParseError(ValueError):
    """Malformed edge-list input (message carries the line number)."""


class ValidationError(ValueError):
    """Data violates a structural invariant (self-loop, bad weight, ...)."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with optional positive edge weights and node features.

    ``edge_array`` holds one row (u, v) per undirected edge with u < v, sorted
    lexicographically; ``weights`` aligns with it. Instances are immutable and
    safe to share across threads.
    """

    num_nodes: int
    edge_array: np.ndarray          # (E, 2) int64, u < v, lexicographically sorted
    weights: np.ndarray             # (E,) float64, strictly positive and finite
    node_features: np.ndarray | None = None

    @classmethod
    def from_edges(cls, num_nodes: int,
                   edges: Iterable[tuple] = (),
                   node_features: np.ndarray | None = None) -> "Graph":
        """Build a validated Graph from (u, v) or (u, v, w) tuples."""
        if num_nodes < 1:
            raise ValidationError("graph needs at least one node")
        pairs: dict[tuple[int, int], float] = {}
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValidationError(f"self-loop at node {u}")
            if u > v:
                u, v = v, u
            if not (0 <= u and v < num_nodes):
                raise ValidationError(f"edge ({u}, {v}) outside [0, {num_nodes})")
            if not (w > 0.0 and np.isfinite(w)):
                raise ValidationError(f"edge ({u}, {v}) has non-positive weight {w}")
            if (u, v) in pairs:
                raise ValidationError(f"duplicate edge ({u}, {v})")
            pairs[(u, v)] = w
        keys = sorted(pairs)
        edge_array = np.array(keys, dtype=np.int64).reshape(len(keys), 2)
        weights = np.array([pairs[k] for k in keys], dtype=np.float64)
        if node_features is not None:
            node_features = np.asarray(node_features, dtype=np.float64)
            if node_features.ndim != 2 or node_features.shape[0] != num_nodes:
                raise ValidationError("node_features must be an N x F matrix")
        return cls(num_nodes, edge_array, weights, node_features)

    @property
    def num_edges(self) -> int:
        return int(self.edge_array.shape[0])

    @cached_property
    def unit_weights(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        if self.num_edges:
            np.add.at(deg, self.edge_array[:, 0], 1)
            np.add.at(deg, self.edge_array[:, 1], 1)
        return deg

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # symmetric CSR: every edge appears in both directions
        n = self.num_nodes
        if self.num_edges == 0:
            return (np.zeros(n + 1, np.int64), np.empty(0, np.int64),
                    np.empty(0, np.float64))
        heads = np.concatenate([self.edge_array[:, 0], self.edge_array[:, 1]])
        tails = np.concatenate([self.edge_array[:, 1], self.edge_array[:, 0]])
        wts = np.concatenate([self.weights, self.weights])
        order = np.lexsort((tails, heads))
        heads, tails, wts = heads[order], tails[order], wts[order]
        indptr = np.zeros(n + 1, np.int64)
        np.add.at(indptr, heads + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, tails, wts

    def edge_weight_map(self) -> dict[tuple[int, int], float]:
        return {(int(u), int(v)): float(w)
                for (u, v), w in zip(self.edge_array, self.weights)}

    def to_edge_list(self, fp: IO[str]) -> None:
        """Write the edge-list text format ("u v" or "u v w" per line)."""
        for (u, v), w in zip(self.edge_array, self.weights):
            if w == 1.0:
                fp.write(f"{u} {v}\n")
            else:
                fp.write(f"{u} {v} {float(w)!r}\n")


@dataclass(frozen=True)
class DistanceMatrix:
    """Geodesic distances from ``sources`` to every node; inf marks UNREACHABLE."""

    sources: tuple[int, ...]
    dists: np.ndarray               # (len(sources), N) float64

    @property
    def num_nodes(self) -> int:
        return int(self.dists.shape[1])

    @property
    def diameter(self) -> float:
        """Max finite entry; the graph diameter when sources cover all nodes."""
        finite = self.dists[np.isfinite(self.dists)]
        return float(finite.max()) if finite.size else 0.0

    def to_csv(self, fp: IO[str]) -> None:
        for row in self.dists:
            fp.write(",".join("inf" if not np.isfinite(x) else repr(float(x))
                              for x in row))
            fp.write("\n")


def load_edge_list(stream: IO[str] | Iterable[str]) -> Graph:
    """Parse the edge-list text format.

    Each non-comment line is "u v" or "u v w" with integer u != v and optional
    real w > 0; '#'-prefixed lines and blank lines are ignored. The node count
    is 1 + the largest node id seen.
    """
    edges: list[tuple[int, int, float]] = []
    max_id = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphParseError(f"line {lineno}: expected 'u v' or 'u v w'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"line {lineno}: node ids must be integers") from None
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphParseError(f"line {lineno}: weight must be a real number") from None
        if u < 0 or v < 0:
            raise ValidationError(f"line {lineno}: negative node id")
        if u == v:
            raise ValidationError(f"line {lineno}: self-loop at node {u}")
        if not (w > 0.0 and np.isfinite(w)):
            raise ValidationError(f"line {lineno}: non-positive weight {w}")
        key = (min(u, v), max(u, v))
        edges.append((key[0], key[1], w))
        max_id = max(max_id, v, u)
    return Graph.from_edges(max_id + 1, edges)


def build_knn_graph(features: np.ndarray, k: int, zero_floor: float = 1e-9) -> Graph:
    """k-nearest-neighbour graph under cosine distance between feature rows.

    The directed kNN relations are symmetrized by union; ties in distance go to
    the lower node index. Edge weight is the cosine distance, with exact-zero
    distances replaced by ``zero_floor`` to keep weights positive.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValidationError("features must be an N x F matrix")
    n = x.shape[0]
    if not (1 <= k < n):
        raise ValueError(f"k must satisfy 1 <= k < N, got k={k}, N={n}")
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0.0):
        raise ValidationError("zero-norm feature row")
    cosine = 1.0 - (x @ x.T) / np.outer(norms, norms)
    pairs: dict[tuple[int, int], float] = {}
    ids = np.arange(n)
    for u in range(n):
        row = cosine[u].copy()
        row[u] = np.inf                      # never its own neighbour
        order = np.lexsort((ids, row))       # distance asc, then index asc
        for v in order[:k]:
            v = int(v)
            key = (min(u, v), max(u, v))
            if key not in pairs:
                d = float(cosine[u, v])
                pairs[key] = d if d > 0.0 else zero_floor
    return Graph.from_edges(n, [(u, v, w) for (u, v), w in pairs.items()],
                            node_features=x)


def geodesics(g: Graph, sources: Sequence[int], method: str = "auto") -> DistanceMatrix:
    """Shortest-path rows from each source node.

    Uses breadth-first traversal when all weights are 1 and Dijkstra otherwise;
    ``method`` can force "bfs" (unit weights only) or "dijkstra".
    """
    src = np.asarray(list(sources), dtype=np.int64)
    if src.size == 0:
        raise ValueError("sources must be non-empty")
    if src.min() < 0 or src.max() >= g.num_nodes:
        raise ValueError("source ids outside [0, N)")
    indptr, indices, wts = g._csr
    if method == "auto":
        method = "bfs" if g.unit_weights else "dijkstra"
    if method == "bfs":
        if not g.unit_weights:
            raise ValueError("bfs requires unit weights")
        dists = _kernels.bfs_rows(indptr, indices, src, g.num_nodes)
    elif method == "dijkstra":
        dists = _kernels.dijkstra_rows(indptr, indices, wts, src, g.num_nodes)
    else:
        raise ValueError(f"unknown method {method!r}")
    return DistanceMatrix(tuple(int(s) for s in src), dists)


def all_pairs(g: Graph, method: str = "auto") -> DistanceMatrix:
    return geodesics(g, range(g.num_nodes), method=method)


def diameter(g: Graph) -> float:
    """Max finite geodesic distance over all node pairs."""
    return all_pairs(g).diameter


def connected_components(g: Graph) -> list[list[int]]:
    """Components as node lists, ordered by smallest contained node id."""
    indptr, indices, _ = g._csr
    seen = np.zeros(g.num_nodes, dtype=bool)
    comps: list[list[int]] = []
    for start in range(g.num_nodes):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in indices[indptr[u]:indptr[u + 1]]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        comps.append(sorted(comp))
    return comps


def largest_connected_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest component, nodes relabeled contiguously.

    Ties between equal-size components go to the one containing the smallest
    original index. Returns (subgraph, old_to_new) where old_to_new[i] is the
    new index of node i or -1 if i was dropped.
    """
    comps = connected_components(g)
    best = max(comps, key=len)           # first max: smallest contained index
    old_to_new = np.full(g.num_nodes, -1, dtype=np.int64)
    for new, old in enumerate(best):
        old_to_new[old] = new
    keep = old_to_new[g.edge_array[:, 0]] >= 0
    edges = [(int(old_to_new[u]), int(old_to_new[v]), float(w))
             for (u, v), w in zip(g.edge_array[keep], g.weights[keep])]
    feats = g.node_features[best] if g.node_features is not None else None
    return Graph.from_edges(len(best), edges, node_features=feats), old_to_new


def adjacency_l1_distance(g1: Graph, g2: Graph, weighted: bool = False) -> float:
    """Number of undirected pairs whose adjacency differs (one flip counts 1).

    With ``weighted=True``, returns the sum of |w1 - w2| over the union of edge
    pairs, treating an absent edge as weight 0.
    """
    if g1.num_nodes != g2.num_nodes:
        raise ValueError("graphs must have the same number of nodes")
    m1 = g1.edge_weight_map()
    m2 = g2.edge_weight_map()
    if not weighted:
        return float(len(set(m1) ^ set(m2)))
    total = 0.0
    for key in set(m1) | set(m2):
        total += abs(m1.get(key, 0.0) - m2.get(key, 0.0))
    return total
