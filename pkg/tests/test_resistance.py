import numpy as np
import pytest
from hypothesis import given, settings

from specgraph import errors, resistance
from specgraph.graph import binary_tree, build_graph, complete, cycle, dumbbell, gnp, grid2d, path, star

from test_graph import graphs


def test_series_and_parallel():
    # two parallel 2-edge paths between 0 and 2: each path 2 ohms, parallel 1 ohm
    g = build_graph(4, [(0, 1), (1, 2), (0, 3), (3, 2)])
    assert resistance.effective_resistance(g, 0, 2) == pytest.approx(1.0)
    # conductances add: weight 2 and weight 3 in parallel gives 1/5
    h = build_graph(3, [(0, 1, 2.0), (0, 2, 1.0), (2, 1, 1.0)])
    assert resistance.effective_resistance(h, 0, 1) == pytest.approx(1.0 / (2.0 + 0.5))


def test_cycle_resistance_closed_form():
    n = 10
    g = cycle(n)
    for k in range(1, n):
        assert resistance.effective_resistance(g, 0, k) == pytest.approx(k * (n - k) / n)


@pytest.mark.parametrize(
    "g, want",
    [
        (complete(8), 7.0),
        (complete(16), 15.0),
        (path(8), 7 * 8 * 9 / 6),
        (path(16), 15 * 16 * 17 / 6),
        (star(8), 49.0),
        (star(16), 225.0),
    ],
)
def test_total_resistance_closed_forms(g, want):
    assert resistance.total_resistance(g) == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("g", [path(9), star(7), binary_tree(12)])
def test_tree_resistance_is_geodesic(g):
    assert np.allclose(resistance.resistance_matrix(g), resistance.geodesic_distances(g), atol=1e-10)


@given(graphs(min_n=2, max_n=10, connected=True))
@settings(max_examples=40, deadline=None)
def test_leverage_sum_and_range(g):
    lev = resistance.leverage_scores(g)
    assert lev.leverage.sum() == pytest.approx(g.n - 1)
    assert np.all(lev.leverage > 0) and np.all(lev.leverage <= 1 + 1e-9)
    assert lev.probability.sum() == pytest.approx(1.0)


@given(graphs(min_n=3, max_n=10, connected=True))
@settings(max_examples=30, deadline=None)
def test_resistance_is_metric_below_geodesic(g):
    rep = resistance.resistance_metric_check(g, trials=100, seed=0)
    assert rep.triangle_violation <= 1e-10
    assert rep.geodesic_excess <= 1e-10


def test_bridge_leverage_is_one():
    g = dumbbell(5)
    lev = resistance.leverage_scores(g)
    bridge = int(np.flatnonzero((g.u == 4) & (g.v == 5))[0])
    assert lev.leverage[bridge] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.delete(lev.leverage, bridge) < 1)


def test_complete_graph_leverage_uniform():
    lev = resistance.leverage_scores(complete(6))
    assert np.allclose(lev.leverage, 2 / 6)


def test_pinv_annihilates_ones():
    p = resistance.lap_pinv(grid2d(3, 3)).matrix
    assert np.allclose(p @ np.ones(9), 0.0, atol=1e-12)


def test_disconnected_rejected():
    with pytest.raises(errors.DisconnectedGraphError):
        resistance.lap_pinv(build_graph(4, [(0, 1), (2, 3)]))


def test_vertex_range_checked():
    with pytest.raises(errors.ValidationError):
        resistance.effective_resistance(gnp(10, 0.5, 0), 0, 10)
