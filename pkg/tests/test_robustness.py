import io

import numpy as np
import pytest

from conftest import random_connected_graph
from wtopo import (Graph, PerturbSpec, TopoLossConfig, adjacency_l1_distance,
                   default_config, perturb, select_landmarks, stability_sweep)
from wtopo.robustness import LANDMARK_TARGETED, REPORT_COLUMNS


def test_decode_pairs_enumerates_upper_triangle():
    from itertools import combinations

    from wtopo.robustness import _decode_pairs

    for n in (2, 3, 7, 12):
        total = n * (n - 1) // 2
        got = _decode_pairs(np.arange(total), n).tolist()
        assert got == [list(p) for p in combinations(range(n), 2)]


def test_zero_budget_identity():
    rng = np.random.default_rng(71)
    g = random_connected_graph(rng, 12, extra=6)
    g2 = perturb(g, PerturbSpec(budget=0, seed=3))
    assert np.array_equal(g.edge_array, g2.edge_array)
    assert np.array_equal(g.weights, g2.weights)


def test_perturb_l1_equals_budget():
    rng = np.random.default_rng(72)
    g = random_connected_graph(rng, 15, extra=10)
    for budget in (1, 4, 9):
        g2 = perturb(g, PerturbSpec(budget=budget, seed=11))
        assert adjacency_l1_distance(g, g2) == budget


def test_perturb_deterministic():
    rng = np.random.default_rng(73)
    g = random_connected_graph(rng, 10, extra=5)
    spec = PerturbSpec(budget=5, seed=42)
    a = perturb(g, spec)
    b = perturb(g, spec)
    assert np.array_equal(a.edge_array, b.edge_array)
    c = perturb(g, PerturbSpec(budget=5, seed=43))
    assert not np.array_equal(a.edge_array, c.edge_array)


def test_perturb_preserves_invariants():
    rng = np.random.default_rng(74)
    g = random_connected_graph(rng, 10, extra=5)
    g2 = perturb(g, PerturbSpec(budget=8, seed=1))
    # construction re-validates: no self loops, no duplicates, positive weights
    assert np.all(g2.edge_array[:, 0] < g2.edge_array[:, 1])
    assert len({tuple(e) for e in g2.edge_array.tolist()}) == g2.num_edges
    assert np.all(g2.weights > 0)


def test_perturb_budget_capacity_check():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        perturb(g, PerturbSpec(budget=4, seed=0))     # only 3 pairs exist
    g2 = perturb(g, PerturbSpec(budget=3, seed=0))    # full flip is fine
    assert adjacency_l1_distance(g, g2) == 3


def test_perturb_landmark_targeted_touches_landmarks():
    rng = np.random.default_rng(75)
    g = random_connected_graph(rng, 20, extra=10)
    marks = select_landmarks(g, 0.2).landmarks
    g2 = perturb(g, PerturbSpec(budget=6, mode=LANDMARK_TARGETED, seed=5),
                 landmarks=marks)
    before = g.edge_weight_map()
    after = g2.edge_weight_map()
    flipped = set(before) ^ set(after)
    assert len(flipped) == 6
    assert all(u in marks or v in marks for u, v in flipped)


def test_perturb_landmark_targeted_requires_landmarks():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        perturb(g, PerturbSpec(budget=1, mode=LANDMARK_TARGETED, seed=0))


def test_perturb_spec_validation():
    with pytest.raises(ValueError):
        PerturbSpec(budget=-1)
    with pytest.raises(ValueError):
        PerturbSpec(budget=1, mode="chaotic")


def test_sweep_zero_budget_all_drifts_zero():
    rng = np.random.default_rng(76)
    g = random_connected_graph(rng, 14, extra=7)
    report = stability_sweep(g, [0], trials=3, fraction=0.25,
                             cfg=default_config(g, grid_resolution=4),
                             loss_cfg=TopoLossConfig())
    assert len(report) == 3
    for col in ("l1_distance", "local_wasserstein_p", "global_pi_linf_drift",
                "topo_loss_drift", "bound_ratio_local", "bound_ratio_global"):
        assert np.all(report.column(col) == 0.0)


def test_sweep_row_cardinality():
    rng = np.random.default_rng(77)
    g = random_connected_graph(rng, 12, extra=6)
    report = stability_sweep(g, [1, 2, 4], trials=3, fraction=0.25,
                             cfg=default_config(g, grid_resolution=4),
                             loss_cfg=TopoLossConfig())
    assert len(report) == 9
    assert report.column("budget").tolist() == [1, 1, 1, 2, 2, 2, 4, 4, 4]
    assert report.column("trial").tolist() == [0, 1, 2] * 3


def test_sweep_l1_column_equals_budget():
    rng = np.random.default_rng(78)
    g = random_connected_graph(rng, 12, extra=10)
    report = stability_sweep(g, [0, 2, 5], trials=2, fraction=0.25,
                             cfg=default_config(g, grid_resolution=4),
                             loss_cfg=TopoLossConfig())
    assert np.array_equal(report.column("l1_distance"), report.column("budget"))


def test_sweep_bound_ratios_finite_on_random_graph():
    rng = np.random.default_rng(79)
    g = random_connected_graph(rng, 30, extra=20)
    budgets = [0, 2, 5]                         # up to 10% of the edges
    report = stability_sweep(g, budgets, trials=3, fraction=0.2,
                             cfg=default_config(g, grid_resolution=5),
                             loss_cfg=TopoLossConfig(), base_seed=9)
    for col in ("bound_ratio_local", "bound_ratio_global"):
        assert np.all(np.isfinite(report.column(col)))
    assert np.all(report.column("local_wasserstein_p") >= 0.0)
    assert np.all(report.column("global_pi_linf_drift") >= 0.0)


def test_sweep_freeze_landmarks_flag():
    rng = np.random.default_rng(80)
    g = random_connected_graph(rng, 15, extra=8)
    frozen = stability_sweep(g, [3], trials=2, fraction=0.25,
                             cfg=default_config(g, grid_resolution=4),
                             loss_cfg=TopoLossConfig(), freeze_landmarks=True,
                             base_seed=4)
    assert len(frozen) == 2                     # runs end to end

def test_sweep_rejects_unsorted_budgets():
    rng = np.random.default_rng(81)
    g = random_connected_graph(rng, 8, extra=2)
    with pytest.raises(ValueError):
        stability_sweep(g, [4, 1], trials=1, fraction=0.3,
                        cfg=default_config(g, grid_resolution=3),
                        loss_cfg=TopoLossConfig())
    with pytest.raises(ValueError):
        stability_sweep(g, [1], trials=0, fraction=0.3,
                        cfg=default_config(g, grid_resolution=3),
                        loss_cfg=TopoLossConfig())


def test_report_csv_header_and_shape():
    rng = np.random.default_rng(82)
    g = random_connected_graph(rng, 10, extra=4)
    report = stability_sweep(g, [0, 1], trials=2, fraction=0.3,
                             cfg=default_config(g, grid_resolution=3),
                             loss_cfg=TopoLossConfig())
    buf = io.StringIO()
    report.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS)
    assert lines[0] == ("budget,trial,l1_distance,local_wasserstein_p,"
                        "global_pi_linf_drift,topo_loss_drift,cover_radius,"
                        "c_epsilon,bound_ratio_local,bound_ratio_global")
    assert len(lines) == 1 + 4
    assert all(len(line.split(",")) == len(REPORT_COLUMNS) for line in lines[1:])
