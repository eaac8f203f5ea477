import math
from collections import defaultdict

import numpy as np
import pytest
from scipy.linalg import expm

from majoq.gluedtrees import (
    PALETTE,
    NodeView,
    build_graph,
    column_hamiltonian,
    column_projection,
    column_sizes,
    evolve_walk,
    first_peak,
    full_graph_deviation,
    full_graph_step_unitary,
    name_width,
    node_view,
    oracle_query,
    trace_to_first_peak,
    walk_amplitudes,
)


def check_invariants(g):
    n = g.n
    V = 2 * (2 ** (n + 1) - 1)
    assert g.num_vertices == V
    assert len(g.edges) == 2 * (2 ** (n + 1) - 2) + 2 ** (n + 1)
    deg = g.degrees()
    assert deg[g.in_id] == 2 and deg[g.out_id] == 2
    assert np.sum(deg == 3) == V - 2
    # proper coloring: no vertex sees a color twice
    seen = defaultdict(set)
    for u, v, c in g.edges:
        assert c in PALETTE
        for x in (u, v):
            assert c not in seen[x]
            seen[x].add(c)
    # names unique, fixed width, never the sentinel
    assert len(set(g.names)) == V
    assert all(len(s) == g.width for s in g.names)
    assert g.sentinel not in g.names
    # cycle alternates between the two trees and covers every leaf once
    per_tree = 2 ** (n + 1) - 1
    sides = [v >= per_tree for v in g.cycle]
    assert all(a != b for a, b in zip(sides, sides[1:] + sides[:1]))
    assert len(set(g.cycle)) == 2 ** (n + 1)
    assert all(g.columns[v] in (n, n + 1) for v in g.cycle)
    np.testing.assert_array_equal(np.bincount(g.columns), column_sizes(n))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_invariants_many_seeds(n):
    for seed in range(50):
        check_invariants(build_graph(n, seed))


def test_name_width():
    assert name_width(1) == 3  # 6 vertices need more than 2 bits
    assert name_width(4) == 8
    assert name_width(10) == 20


def test_oracle_round_trip_and_sentinel():
    g = build_graph(3, seed=7)
    for name in g.names:
        for c in PALETTE:
            other = oracle_query(g, name, c)
            if other != g.sentinel:
                assert oracle_query(g, other, c) == name
    assert oracle_query(g, g.sentinel, 0) == g.sentinel
    assert oracle_query(g, "0" * (g.width + 1), 0) == g.sentinel
    # the IN root has exactly two colored edges
    assert sum(oracle_query(g, g.in_vertex, c) != g.sentinel for c in PALETTE) == 2


def test_determinism_per_seed():
    a, b = build_graph(3, 5), build_graph(3, 5)
    assert a.names == b.names and a.edges == b.edges


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_column_projection(n):
    g = build_graph(n, 0)
    np.testing.assert_allclose(column_projection(g) / math.sqrt(2), column_hamiltonian(n), atol=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_full_graph_matches_columns(n):
    g = build_graph(n, 11)
    assert full_graph_deviation(g, np.linspace(0, 10, 25)) < 1e-10
    U = full_graph_step_unitary(g, 0.3)
    psi = np.zeros(g.num_vertices, complex)
    psi[g.in_id] = 1
    lifted = walk_amplitudes(n, [0.3])[0] @ g.column_basis().T
    np.testing.assert_allclose(U @ psi, lifted, atol=1e-12)


def expm_peak(n):
    """Baseline: first p_out maximum from dense expm on a fine grid."""
    H = column_hamiltonian(n)
    e0 = np.zeros(2 * n + 2); e0[0] = 1
    U = expm(-1j * H * 1e-3)
    psi, best, t = e0.astype(complex), (0, 0.0), 0.0
    prev = 0.0
    rising = False
    while t < 40:
        psi = U @ psi
        t += 1e-3
        p = abs(psi[-1]) ** 2
        if p > 1e-3 and p < prev and rising:
            return t - 1e-3, prev
        rising = p > prev
        prev = p
    raise AssertionError


@pytest.mark.parametrize("n", [2, 4])
def test_first_peak_matches_expm(n):
    t_ref, p_ref = expm_peak(n)
    t, p = first_peak(n)
    assert t == pytest.approx(t_ref, abs=2e-3)
    assert p == pytest.approx(p_ref, abs=1e-5)


def test_first_peak_regression():
    t, p = first_peak(4)
    assert t == pytest.approx(5.895732, abs=1e-5)
    assert p == pytest.approx(0.7220840, abs=1e-6)


def test_evolve_walk_grid():
    tr = evolve_walk(3, 1.0, 0.1, stride=2)
    np.testing.assert_allclose(tr.times, np.arange(0, 11, 2) * 0.1)
    np.testing.assert_allclose(np.sum(np.abs(tr.column_amps) ** 2, axis=1), 1.0, atol=1e-12)


def test_node_views():
    tr = trace_to_first_peak(3, 50)
    full = node_view(tr, 3, NodeView.FULL_NODES)
    cols = node_view(tr, 3, NodeView.COLUMNS)
    one = node_view(tr, 3, NodeView.ONE_PER_COLUMN)
    assert full[0].dim == 30 and cols[0].dim == 8 and one[0].dim == 8
    assert not one[0].normalized
    np.testing.assert_allclose(one[-1].values * column_sizes(3), cols[-1].values, atol=1e-12)
    with pytest.raises(ValueError):
        node_view(tr, 4, NodeView.COLUMNS)
