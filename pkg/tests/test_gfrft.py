import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import operator_for
from gfrsamp import gfrft, graph
from gfrsamp.errors import BranchPole, DimensionMismatch
from gfrsamp.gfrft import Ideal, IndexSet, PolyLowpass


def basis_of(g):
    return gfrft.gft_basis(graph.laplacian(g))


def test_index_set():
    s = IndexSet.of([3, 0, 2], 5)
    assert s.indices == (0, 2, 3)
    assert s.complement().indices == (1, 4)
    assert 2 in s and 1 not in s and len(s) == 3
    with pytest.raises(ValueError):
        IndexSet((2, 1), 5)
    with pytest.raises(ValueError):
        IndexSet.of([5], 5)
    with pytest.raises(ValueError):
        IndexSet.of([1, 1], 5)


def test_gft_basis_examples():
    b = basis_of(graph.path_graph(2))
    assert np.allclose(b.eigenvalues, [0, 2])
    r = 1 / np.sqrt(2)
    assert np.allclose(b.eigenvectors, [[r, r], [r, -r]])
    assert np.allclose(basis_of(graph.path_graph(3)).eigenvalues, [0, 1, 3])
    d = gfrft.gft_basis(graph.ShiftOperator("adjacency", np.diag([2.0, -1.0, 0.5])))
    assert np.array_equal(np.abs(d.eigenvectors), np.eye(3)[:, [1, 2, 0]])


def test_gft_basis_invariants(sensor32):
    b = basis_of(sensor32)
    u = b.eigenvectors
    s = b.shift.matrix
    assert np.linalg.norm((u * b.eigenvalues) @ u.conj().T - s) <= 1e-9 * np.linalg.norm(s)
    assert np.linalg.norm(u.conj().T @ u - np.eye(32)) <= 1e-10 * 32
    assert b.eigenvalues[0] == 0.0


def test_order_zero_and_one(sensor32):
    b = basis_of(sensor32)
    assert np.linalg.norm(gfrft.gfrft_operator(b, 0).forward_matrix - np.eye(32)) <= 1e-9
    assert np.linalg.norm(gfrft.gfrft_operator(b, 1).forward_matrix - b.gft_matrix) <= 1e-8


def test_index_additivity_matches_direct(sensor32):
    b = basis_of(sensor32)
    f3, f4, f7 = (gfrft.gfrft_operator(b, a).forward_matrix for a in (0.3, 0.4, 0.7))
    assert np.linalg.norm(f3 @ f4 - f7) <= 1e-7
    # independent construction of F^0.7 from a Schur form
    assert np.linalg.norm(oracles.frft(b.eigenvectors, 0.7) - f7) <= 1e-10 * 32


def test_inverse_is_adjoint(sensor32):
    op = operator_for(sensor32, -1.4)
    assert np.linalg.norm(op.inverse_matrix - op.forward_matrix.conj().T) <= 1e-10
    assert np.linalg.norm(op.forward_matrix @ op.inverse_matrix - np.eye(32)) <= 1e-8 * 32


@given(st.floats(-2, 2), st.integers(0, 1000))
def test_unitarity_and_parseval(alpha, seed):
    g = graph.random_sensor(16, 4, seed=seed)
    op = operator_for(g, alpha)
    f = op.forward_matrix
    assert np.linalg.norm(f.conj().T @ f - np.eye(16)) <= 1e-8 * 16
    x = np.random.default_rng(seed).normal(size=16) + 0j
    assert np.linalg.norm(gfrft.forward(op, x)) == pytest.approx(np.linalg.norm(x), rel=1e-9)
    assert np.allclose(gfrft.inverse(op, gfrft.forward(op, x)), x, atol=1e-12)


@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 1000))
def test_group_law(a, b, seed):
    if a + b > 1:
        a, b = 1 - a, 1 - b
    basis = basis_of(graph.erdos_renyi(20, 0.3, seed=seed))
    fa, fb, fab = (gfrft.gfrft_operator(basis, x).forward_matrix for x in (a, b, a + b))
    assert np.linalg.norm(fa @ fb - fab) <= 1e-7 * 20


def test_forward_examples(sensor32):
    op = operator_for(sensor32, 1.0)
    assert np.array_equal(gfrft.forward(op, np.zeros(32)), np.zeros(32))
    u = op.basis.eigenvectors
    assert np.allclose(gfrft.forward(op, u[:, 5]), np.eye(32)[5], atol=1e-8)
    assert np.allclose(gfrft.inverse(op, np.eye(32)[5]), u[:, 5], atol=1e-8)
    with pytest.raises(DimensionMismatch):
        gfrft.forward(op, np.zeros(31))
    with pytest.raises(DimensionMismatch):
        gfrft.inverse(op, np.zeros((32, 1)))


def test_vertex_projector():
    d = gfrft.vertex_projector(IndexSet.of([0, 2], 3))
    assert np.array_equal(d, np.diag([1.0, 0, 1]))
    assert np.array_equal(gfrft.vertex_projector(IndexSet.first(3, 3)), np.eye(3))
    s = IndexSet.of([1, 4], 6)
    assert np.array_equal(gfrft.vertex_projector(s) + gfrft.vertex_projector(s.complement()), np.eye(6))
    assert np.array_equal(d @ d, d)


def test_band_projector(sensor32):
    op = operator_for(sensor32, 0.6)
    assert np.linalg.norm(gfrft.band_projector(op, range(32)) - np.eye(32)) <= 1e-9
    assert np.array_equal(gfrft.band_projector(op, []), np.zeros((32, 32)))
    b = gfrft.band_projector(op, range(7))
    assert np.count_nonzero(np.linalg.svd(b, compute_uv=False) > 0.5) == 7
    assert np.linalg.norm(b @ b - b) <= 1e-8 * 32
    assert np.linalg.norm(b - b.conj().T) <= 1e-9


def test_fractional_shift(sensor32):
    b = basis_of(sensor32)
    l1 = gfrft.fractional_shift(b, 1.0)
    assert np.allclose(l1, b.shift.matrix, atol=1e-9)
    la = gfrft.fractional_shift(b, 0.45)
    assert np.linalg.norm(la - la.conj().T) <= 1e-8
    assert np.allclose(np.linalg.eigvalsh((la + la.conj().T) / 2), np.sort(b.eigenvalues**0.45), atol=1e-8)
    with pytest.raises(BranchPole):
        gfrft.fractional_shift(b, 0.0)
    pos = gfrft.gft_basis(graph.ShiftOperator("adjacency", np.diag([1.0, 2.0, 3.0])))
    assert np.allclose(gfrft.fractional_shift(pos, 0.0), np.eye(3), atol=1e-8)


def test_localization_operator(sensor32):
    op = operator_for(sensor32, 0.8)
    t = gfrft.localization_operator(op, Ideal(IndexSet.first(32, 32)))
    assert np.linalg.norm(t.matrix - np.eye(32)) <= 1e-9
    band = IndexSet.first(5, 32)
    t = gfrft.localization_operator(op, Ideal(band))
    assert np.linalg.norm(t.matrix - gfrft.band_projector(op, band)) <= 1e-10
    p = gfrft.localization_operator(op, PolyLowpass(5))
    assert np.linalg.norm(p.matrix - p.matrix.conj().T) <= 1e-9
    assert np.all(np.isfinite(p.kernel_values)) and np.isrealobj(p.kernel_values)


def test_polylowpass_p3_trace():
    t = gfrft.localization_operator(operator_for(graph.path_graph(3), 1.0), PolyLowpass(5))
    assert np.real(np.trace(t.matrix)) == pytest.approx(1 + (2 / 3) ** 5, abs=1e-12)


def test_polylowpass_rejects_complex_spectrum():
    shift = graph.adjacency(graph.cycle_graph(5))
    op = gfrft.gfrft_operator(gfrft.gft_basis(shift), 0.5)
    with pytest.raises(ValueError):
        gfrft.localization_operator(op, PolyLowpass(3))


def test_gap_and_margin_trivial(sensor32):
    op = operator_for(sensor32, 0.7)
    b = gfrft.band_projector(op, range(4))
    eye = np.eye(32)
    assert gfrft.perfect_localization_gap(eye, b) == pytest.approx(1.0)
    d = gfrft.vertex_projector(IndexSet.of([3, 9], 32))
    assert gfrft.perfect_localization_gap(d, eye) == pytest.approx(1.0)
    assert gfrft.recoverability_margin(np.zeros((32, 32)), b) == 1.0
    assert gfrft.recoverability_margin(eye, b) <= 1e-8
    with pytest.raises(DimensionMismatch):
        gfrft.perfect_localization_gap(np.eye(3), b)


def test_margin_matches_rank_on_cycle():
    op = operator_for(graph.cycle_graph(8), 0.7)
    band = IndexSet.first(3, 8)
    b = gfrft.band_projector(op, band)
    rng = np.random.default_rng(0)
    seen = set()
    for _ in range(40):
        s = IndexSet.of(rng.choice(8, 3, replace=False), 8)
        rank = np.linalg.matrix_rank(op.forward_matrix[np.ix_(band.array, s.array)], tol=1e-8)
        margin = gfrft.recoverability_margin(gfrft.vertex_projector(s.complement()), b)
        assert (margin > 1e-8) == (rank == 3)
        seen.add(rank)
    assert 3 in seen
