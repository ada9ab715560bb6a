"""Generator construction for every walk family."""

import numpy as np
import pytest
import scipy.linalg

from ctwalks.errors import DomainError
from ctwalks.generators import (
    chiral_adjacency,
    chiral_hamiltonian,
    ctqw_generator,
    ctrw_generator,
    gaussian_potential,
    interaction_picture,
    rotating_frame_generator,
)
from ctwalks.graphs import (
    Graph,
    cycle_graph,
    diamond_with_chord,
    path_graph,
    random_connected_graph,
)
from ctwalks.linalg import spectral_norm


def test_ctrw_single_edge():
    gen = ctrw_generator(path_graph(2))
    assert np.array_equal(gen.matrix.real, [[-1, 1], [1, -1]])


def test_ctrw_columns_sum_to_zero():
    g = random_connected_graph(7, np.random.default_rng(1))
    gen = ctrw_generator(g)
    assert np.allclose(gen.matrix.sum(axis=0), 0.0)


def test_ctrw_path_diagonal():
    gen = ctrw_generator(path_graph(3))
    assert np.array_equal(np.diag(gen.matrix).real, [-1, -2, -1])


def test_ctrw_rejects_directed_and_weighted():
    with pytest.raises(DomainError):
        ctrw_generator(Graph(2, ((0, 1),), directed=True))
    with pytest.raises(DomainError):
        ctrw_generator(Graph(2, ((0, 1, 0.5),)))


def test_ctqw_single_edge():
    gen = ctqw_generator(path_graph(2))
    assert np.array_equal(gen.matrix, -1j * np.array([[0, 1], [1, 0]]))
    gen_v = ctqw_generator(path_graph(2), [1.0, 2.0])
    assert np.array_equal(gen_v.matrix, -1j * np.array([[1, 1], [1, 2]]))


def test_ctqw_is_anti_hermitian():
    rng = np.random.default_rng(2)
    g = random_connected_graph(6, rng)
    m = ctqw_generator(g, rng.standard_normal(6)).matrix
    assert np.allclose(m.conj().T, -m)


def test_ctqw_potential_length_mismatch():
    with pytest.raises(DomainError):
        ctqw_generator(path_graph(3), [1.0, 2.0])


def test_chiral_phase_convention():
    g = path_graph(2)
    h = chiral_adjacency(g, {(0, 1): np.pi / 2})
    assert h[1, 0] == pytest.approx(1j)
    assert h[0, 1] == pytest.approx(-1j)
    assert np.allclose(h.conj().T, h)


def test_chiral_zero_phases_equal_adjacency():
    g = diamond_with_chord()
    assert np.array_equal(chiral_adjacency(g, {}), np.abs(chiral_adjacency(g, {})))


def test_chiral_two_pi_equals_plain_coherent():
    g = cycle_graph(5)
    thetas = {e: 2 * np.pi for e in g.undirected_edges}
    h = chiral_adjacency(g, thetas)
    assert np.allclose(-1j * h, ctqw_generator(g).matrix, atol=1e-14)


def test_chiral_cancelling_phases_on_diamond():
    # the two length-2 amplitudes into vertex 1 interfere to zero
    g = diamond_with_chord()
    gen = chiral_hamiltonian(g, {(0, 2): np.pi, (1, 2): 0.0})
    m = gen.matrix
    total = m[1, 2] * m[2, 0] + m[1, 3] * m[3, 0]
    by_hand = (-1j) ** 2 * (np.exp(1j * np.pi) + 1.0)
    assert total == pytest.approx(by_hand)
    assert abs(total) < 1e-14


def test_chiral_angle_on_non_edge():
    with pytest.raises(DomainError):
        chiral_hamiltonian(path_graph(3), {(0, 2): 1.0})


def test_rotating_zero_frequency_is_static_coherent():
    g = path_graph(3)
    gen = rotating_frame_generator(g, np.zeros(3))
    assert np.allclose(gen.evaluate(1.7), ctqw_generator(g).matrix)


def test_rotating_chain_entry():
    # chain with frame frequency on vertex 0: entry (1 <- 0) of iM(t) is e^{-i Om t}
    om = 1.3
    gen = rotating_frame_generator(path_graph(4), [om, 0, 0, 0])
    for t in (0.0, 0.4, 2.0):
        assert 1j * gen.entry(1, 0, t) == pytest.approx(np.exp(-1j * om * t))
    lam = np.diag(np.exp(-1j * np.array([om, 0, 0, 0]) * 0.4))
    direct = lam.conj().T @ gen.adjacency @ lam
    assert np.allclose(gen.evaluate(0.4), -1j * direct)


def test_rotating_norm_constant_in_time():
    rng = np.random.default_rng(3)
    g = random_connected_graph(6, rng)
    gen = rotating_frame_generator(g, rng.standard_normal(6))
    base = spectral_norm(gen.adjacency)
    for t in rng.uniform(0, 5, size=5):
        assert spectral_norm(gen.evaluate(t)) == pytest.approx(base, abs=1e-11)


def test_interaction_entrywise_matches_matrix_products():
    rng = np.random.default_rng(4)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    gen = interaction_picture(m)
    v = np.diag(np.diag(m))
    mhat = m - v
    for t in (0.3, 1.2):
        oracle = scipy.linalg.expm(-v * t) @ mhat @ scipy.linalg.expm(v * t)
        assert np.allclose(gen.evaluate(t), oracle, atol=1e-12)
        assert gen.entry(2, 0, t) == pytest.approx(oracle[2, 0])


def test_interaction_rejects_offdiagonal_v():
    with pytest.raises(DomainError):
        from ctwalks.generators import InteractionGenerator

        InteractionGenerator([0.0, 0.0], np.array([[1.0, 1.0], [1.0, 0.0]]))


def test_gaussian_potential_stream_is_counter_keyed():
    a = gaussian_potential(6, seed=9, realization=3)
    b = gaussian_potential(6, seed=9, realization=3)
    c = gaussian_potential(6, seed=9, realization=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert abs(np.mean(gaussian_potential(4000, seed=1))) < 0.05
