"""Degree-centrality landmark selection and Voronoi cover construction."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .graph import Graph, geodesics


@dataclass(frozen=True)
class LandmarkSet:
    """Landmarks ordered by (degree desc, node id asc)."""

    landmarks: tuple[int, ...]
    fraction: float

    def __len__(self) -> int:
        return len(self.landmarks)


@dataclass(frozen=True)
class Cover:
    """Voronoi cells around landmarks, partitioning the node set.

    Nodes unreachable from every landmark become self-covered singleton cells
    (listed in ``self_covered``). ``epsilon_pairwise`` is half the largest
    finite landmark-to-landmark distance; ``cover_radius`` is the largest
    node-to-assigned-landmark distance; ``c_epsilon`` the largest cell size.
    ``local_landmarks`` re-runs the degree selection inside each induced cell
    subgraph.
    """

    cells: dict[int, tuple[int, ...]]
    epsilon_pairwise: float
    cover_radius: float
    c_epsilon: int
    local_landmarks: dict[int, tuple[int, ...]]
    self_covered: tuple[int, ...]

    def to_json(self) -> str:
        obj = {
            "landmarks": list(self.cells.keys()),
            "cells": {str(l): list(cell) for l, cell in self.cells.items()},
            "epsilon_pairwise": self.epsilon_pairwise,
            "cover_radius": self.cover_radius,
            "c_epsilon": self.c_epsilon,
        }
        return json.dumps(obj, separators=(",", ":"))

    def write_json(self, fp: IO[str]) -> None:
        fp.write(self.to_json())
        fp.write("\n")


def landmark_count(num_nodes: int, fraction: float) -> int:
    # tiny epsilon guards float representation of exact products (e.g. N*0.05)
    return max(1, int(math.floor(num_nodes * fraction + 1e-9)))


def select_landmarks(g: Graph, fraction: float) -> LandmarkSet:
    """Top floor(N * fraction) nodes by degree, ties by ascending node id."""
    if not (0.0 < fraction <= 1.0):
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    count = landmark_count(g.num_nodes, fraction)
    order = np.argsort(-g.degrees, kind="stable")   # stable keeps id order on ties
    return LandmarkSet(tuple(int(i) for i in order[:count]), fraction)


def _local_selection(members: list[int], local_deg: np.ndarray, fraction: float) -> tuple[int, ...]:
    count = landmark_count(len(members), fraction)
    ranked = sorted(members, key=lambda v: (-int(local_deg[v]), v))
    return tuple(ranked[:count])


def build_cover(g: Graph, ls: LandmarkSet) -> Cover:
    """Assign every node to its geodesically nearest landmark.

    Ties go to the landmark earlier in the LandmarkSet order. Nodes unreachable
    from every landmark are flagged and become their own singleton cells.
    """
    if len(ls.landmarks) == 0:
        raise ValueError("landmark set is empty")
    land = np.asarray(ls.landmarks, dtype=np.int64)
    if land.min() < 0 or land.max() >= g.num_nodes:
        raise ValueError("landmark ids outside [0, N)")
    rows = geodesics(g, ls.landmarks).dists          # (L, N)

    nearest_rank = np.argmin(rows, axis=0)           # first occurrence wins ties
    nearest_dist = rows[nearest_rank, np.arange(g.num_nodes)]
    reachable = np.isfinite(nearest_dist)

    cell_of = np.empty(g.num_nodes, dtype=np.int64)  # owning landmark node id
    cell_of[reachable] = land[nearest_rank[reachable]]
    unreachable_nodes = np.flatnonzero(~reachable)
    cell_of[unreachable_nodes] = unreachable_nodes

    cells: dict[int, list[int]] = {int(l): [] for l in ls.landmarks}
    for v in unreachable_nodes:
        cells[int(v)] = []
    for v in range(g.num_nodes):
        cells[int(cell_of[v])].append(v)

    land_dists = rows[:, land]
    finite = land_dists[np.isfinite(land_dists)]
    epsilon_pairwise = 0.5 * float(finite.max()) if finite.size else 0.0
    cover_radius = float(nearest_dist[reachable].max()) if reachable.any() else 0.0

    # degree within each induced cell subgraph: count edges staying in a cell
    local_deg = np.zeros(g.num_nodes, dtype=np.int64)
    if g.num_edges:
        same = cell_of[g.edge_array[:, 0]] == cell_of[g.edge_array[:, 1]]
        np.add.at(local_deg, g.edge_array[same, 0], 1)
        np.add.at(local_deg, g.edge_array[same, 1], 1)

    local_landmarks = {l: _local_selection(members, local_deg, ls.fraction)
                       for l, members in cells.items()}

    return Cover(
        cells={l: tuple(m) for l, m in cells.items()},
        epsilon_pairwise=epsilon_pairwise,
        cover_radius=cover_radius,
        c_epsilon=max(len(m) for m in cells.values()),
        local_landmarks=local_landmarks,
        self_covered=tuple(int(v) for v in unreachable_nodes),
    )
