"""Gauge trivialization: constructive reduction and witness cycles."""

import numpy as np
import pytest
import scipy.linalg

from ctwalks.errors import DomainError
from ctwalks.gauge import apply_gauge, cycle_phase, gauge_trivialize
from ctwalks.generators import chiral_adjacency
from ctwalks.graphs import cycle_graph, random_connected_graph, random_tree


def random_phases(g, rng):
    return {e: float(rng.uniform(-np.pi, np.pi)) for e in g.undirected_edges}


@pytest.mark.parametrize("seed", range(5))
def test_trees_always_trivialize(seed):
    rng = np.random.default_rng(seed)
    g = random_tree(int(rng.integers(3, 9)), rng)
    h = chiral_adjacency(g, random_phases(g, rng))
    result = gauge_trivialize(h)
    assert result.trivializable
    gauged = apply_gauge(h, result.lam)
    assert np.max(np.abs(gauged.imag)) < 1e-12
    assert np.min(gauged.real[np.abs(h) > 0]) > 0


def test_zero_phases_give_identity_gauge():
    g = cycle_graph(5)
    result = gauge_trivialize(chiral_adjacency(g, {}))
    assert result.trivializable
    assert np.allclose(result.lam, 1.0)


def test_triangle_with_pi_total_phase_is_obstructed():
    g = cycle_graph(3)
    # same angle on each edge oriented around the cycle; total phase pi
    theta = np.pi / 3
    h = np.zeros((3, 3), dtype=complex)
    for u in range(3):
        v = (u + 1) % 3
        h[v, u] = np.exp(1j * theta)
        h[u, v] = np.exp(-1j * theta)
    result = gauge_trivialize(h)
    assert not result.trivializable
    assert result.witness_cycle[0] == result.witness_cycle[-1]
    phase = cycle_phase(h, result.witness_cycle)
    assert phase == pytest.approx(result.witness_phase)
    assert abs(phase - 1.0) > 1e-9
    assert phase == pytest.approx(-1.0)


@pytest.mark.parametrize("seed", range(5))
def test_trivializable_walks_have_identical_probabilities(seed):
    rng = np.random.default_rng(100 + seed)
    g = random_tree(7, rng)
    h = chiral_adjacency(g, random_phases(g, rng))
    result = gauge_trivialize(h)
    r = np.abs(h)
    for t in (0.3, 1.1, 2.7):
        u_chiral = scipy.linalg.expm(-1j * h * t)
        u_plain = scipy.linalg.expm(-1j * r * t)
        assert np.max(np.abs(np.abs(u_chiral) ** 2 - np.abs(u_plain) ** 2)) < 1e-10


def test_idempotence_up_to_global_phase():
    rng = np.random.default_rng(7)
    g = random_tree(6, rng)
    h = chiral_adjacency(g, random_phases(g, rng))
    first = gauge_trivialize(h)
    again = gauge_trivialize(apply_gauge(h, first.lam))
    assert again.trivializable
    assert np.allclose(again.lam, again.lam[0])


@pytest.mark.parametrize("seed", range(4))
def test_decision_independent_of_root_choice(seed):
    rng = np.random.default_rng(200 + seed)
    g = random_connected_graph(7, rng, extra_edge_prob=0.4)
    h = chiral_adjacency(g, random_phases(g, rng))
    decisions = {gauge_trivialize(h, root=r).trivializable for r in (0, g.n - 1)}
    assert len(decisions) == 1


def test_non_hermitian_rejected():
    with pytest.raises(DomainError):
        gauge_trivialize(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_disconnected_components_each_get_a_root():
    h = np.zeros((4, 4), dtype=complex)
    h[1, 0] = h[0, 1] = 1.0
    h[3, 2] = np.exp(0.5j)
    h[2, 3] = np.exp(-0.5j)
    result = gauge_trivialize(h)
    assert result.trivializable
    gauged = apply_gauge(h, result.lam)
    assert np.max(np.abs(gauged.imag)) < 1e-12
