import numpy as np
import pytest

from graph.graph_model import flower, interval, lasso, mandarin, star
from spectral.scattering import (build_bond_scattering, evaluate_U,
                                 loop_vector, reversal_matrix, trace_layout)

GRAPHS = [
    interval(),
    star([1.0, 2.0, 3.0]),
    mandarin([1.0, 2.0, 3.0]),
    flower([1.0, 2.0, 3.0]),
    lasso(1.0, 2.0),
]


@pytest.mark.parametrize("g", GRAPHS, ids=lambda g: g.name)
def test_s_is_real_orthogonal(g):
    bs = build_bond_scattering(g)
    n = g.n_edges
    assert bs.S.shape == (2 * n, 2 * n)
    assert np.isrealobj(bs.S)
    assert np.allclose(bs.S @ bs.S.T, np.eye(2 * n), atol=1e-12)
    assert not bs.reversed_convention


@pytest.mark.parametrize("g", GRAPHS, ids=lambda g: g.name)
def test_vertex_projector_has_full_rank(g):
    bs = build_bond_scattering(g)
    n = g.n_edges
    assert bs.vertex_projector.shape == (2 * n, 4 * n)
    assert np.linalg.matrix_rank(bs.vertex_projector) == 2 * n
    assert np.linalg.matrix_rank(bs.M_edge) == 2 * n


def test_interval_is_neumann_reflection(interval_bs):
    assert np.allclose(interval_bs.S, [[0.0, 1.0], [1.0, 0.0]])
    for k in (1.0, 2.0, 3.0):
        u = evaluate_U(interval_bs, np.exp(1j * k * np.pi))
        assert abs(np.linalg.det(np.eye(2) - u)) < 1e-12


def test_star_vertex_scattering_entries():
    bs = build_bond_scattering(star([1.0, 2.0, 3.0]))
    # bond 3 runs leaf -> center, bond 1 leaves the center along edge 1
    assert bs.S[1, 3] == pytest.approx(2.0 / 3.0)
    assert bs.S[0, 3] == pytest.approx(2.0 / 3.0 - 1.0)
    # reflection at a leaf
    assert bs.S[3, 0] == pytest.approx(1.0)


def test_loop_vectors_are_eigenvectors():
    bs = build_bond_scattering(flower([1.0, 1.7, 2.3]))
    z = np.exp(2j * np.pi * np.array([0.1, 0.35, 0.8]))
    u = evaluate_U(bs, z)
    for j in range(3):
        a = loop_vector(bs, j)
        assert np.allclose(u @ a, z[j] * a, atol=1e-12)


def test_bond_index_pairs_forward_and_reverse_bonds():
    bs = build_bond_scattering(star([1.0, 2.0, 3.0]))
    assert bs.bond_index == {0: (0, 3), 1: (1, 4), 2: (2, 5)}
    for forward, reverse in bs.bond_index.values():
        assert bs.J[forward, reverse] == 1.0


def test_trace_layout_permutation():
    assert trace_layout(2).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


def test_m_stacks_sum_and_difference():
    bs = build_bond_scattering(lasso(1.0, 2.0))
    j_mat = reversal_matrix(2)
    assert np.allclose(bs.J, j_mat)
    assert np.allclose(bs.M[:4], bs.S + j_mat)
    assert np.allclose(bs.M[4:], 1j * (bs.S - j_mat))


def test_u_is_unitary_on_torus():
    bs = build_bond_scattering(mandarin([1.0, 2.0, 3.0]))
    z = np.exp(1j * np.array([0.3, 1.1, 2.9]))
    u = evaluate_U(bs, z)
    assert np.allclose(u @ u.conj().T, np.eye(6), atol=1e-12)
