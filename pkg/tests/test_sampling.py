import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import operator_for
from gfrsamp import gfrft, graph, sampling
from gfrsamp.errors import SingularSubproblem
from gfrsamp.gfrft import Ideal, IndexSet, PolyLowpass
from gfrsamp.sampling import KernelSpec, StrategyConfig, greedy_select, localized_objective


def cfg(kind, **kw):
    return StrategyConfig(kind, **kw)


@pytest.fixture(scope="module")
def op20():
    return operator_for(graph.random_sensor(20, 4, seed=2), 0.8)


def test_strategy_config_defaults_and_validation():
    assert cfg("MaxCov").kernel == KernelSpec("ideal")
    assert cfg("Random").seed == 0
    assert cfg("MaxCut").k == 6
    with pytest.raises(ValueError):
        cfg("MaxVol", kernel=KernelSpec())
    with pytest.raises(ValueError):
        cfg("MinTrac", seed=3)
    with pytest.raises(ValueError):
        cfg("MaxCut", k=0)
    with pytest.raises(ValueError):
        cfg("Greedy")
    c = StrategyConfig.from_dict({"kind": "MaxCov", "kernel": {"name": "polylowpass", "p": 3}})
    assert c.kernel == KernelSpec("polylowpass", 3)
    assert StrategyConfig.from_dict(c.to_dict()) == c


def test_argbest_ties_and_nan():
    assert sampling.argbest([1.0, 3.0, 3.0 - 1e-12, 2.0]) == 1
    assert sampling.argbest([3.0 - 1e-12, 3.0]) == 0
    assert sampling.argbest([np.nan, 1.0]) == 1
    assert sampling.argbest([-np.inf, -np.inf]) == 0


@pytest.mark.parametrize("kind", sampling.STRATEGIES)
def test_full_selection_covers_all_vertices(op20, kind):
    res = greedy_select(op20, IndexSet.first(4, 20), 20, cfg(kind))
    assert sorted(res.selected) == list(range(20))
    assert len(res.objective_trace) == len(res.elapsed) == 20


@pytest.mark.parametrize("kind", sampling.STRATEGIES)
def test_deterministic(op20, kind):
    f = IndexSet.first(5, 20)
    a = greedy_select(op20, f, 9, cfg(kind))
    b = greedy_select(op20, f, 9, cfg(kind))
    assert a.selected == b.selected
    assert np.array_equal(a.objective_trace, b.objective_trace, equal_nan=True)


def test_random_seed_changes_set(op20):
    f = IndexSet.first(5, 20)
    a = greedy_select(op20, f, 8, cfg("Random", seed=1)).selected
    assert a == greedy_select(op20, f, 8, cfg("Random", seed=1)).selected
    assert a != greedy_select(op20, f, 8, cfg("Random", seed=2)).selected
    assert len(set(a)) == 8


def test_greedy_select_validation(op20):
    with pytest.raises(ValueError):
        greedy_select(op20, IndexSet.first(3, 20), 0, cfg("MaxVol"))
    with pytest.raises(ValueError):
        greedy_select(op20, IndexSet.first(3, 20), 21, cfg("MaxVol"))
    with pytest.raises(ValueError):
        greedy_select(op20, [], 3, cfg("MaxVol"))


def test_cycle8_maxvol_matches_oracle(oracle_values):
    ref = oracle_values["cycle8_maxvol"]
    op = operator_for(graph.cycle_graph(8), ref["alpha"])
    res = greedy_select(op, ref["band"], 2, cfg("MaxVol"))
    assert res.selected == ref["selected"]


def test_path6_maxsigmin_values(oracle_values):
    ref = oracle_values["path6_maxsigmin"]
    op = operator_for(graph.path_graph(6), ref["alpha"])
    for y, v in ref["values"].items():
        got = sampling.marginal_objective(op, ref["band"], ref["current"], int(y), cfg("MaxSigMin"))
        assert got == pytest.approx(v, abs=1e-9)


def test_maxcov_first_step_is_column_sum(op20):
    f = IndexSet.first(4, 20)
    t = np.abs(gfrft.localization_operator(op20, Ideal(f)).matrix)
    vals = [sampling.marginal_objective(op20, f, [], y, cfg("MaxCov")) for y in range(20)]
    eps = t.sum() / 400
    assert np.allclose(vals, eps * t.sum(axis=0))
    assert np.argmax(vals) == np.argmax(t.sum(axis=0))


def test_marginal_objective_singular_cases(op20):
    f = IndexSet.first(4, 20)
    with pytest.raises(SingularSubproblem):
        sampling.marginal_objective(op20, f, [0], 1, cfg("MinTrac"))
    with pytest.raises(SingularSubproblem):
        sampling.marginal_objective(op20, f, [0, 1], 2, cfg("MinPinv"))
    with pytest.raises(SingularSubproblem):
        sampling.marginal_objective(op20, f, [0, 1, 2, 3], 4, cfg("MaxVol"))
    assert np.isfinite(sampling.marginal_objective(op20, f, [0, 1, 2], 3, cfg("MinTrac")))
    with pytest.raises(ValueError):
        sampling.marginal_objective(op20, f, [0], 0, cfg("MaxVol"))


def test_fallback_iterations_recorded(op20):
    f = IndexSet.first(4, 20)
    assert greedy_select(op20, f, 6, cfg("MinTrac")).fallback_iterations == [0, 1, 2]
    assert greedy_select(op20, f, 6, cfg("MaxVol")).fallback_iterations == [4, 5]
    assert greedy_select(op20, f, 6, cfg("MaxSigMin")).fallback_iterations == []


@pytest.mark.parametrize("kind", ["MinTrac", "MaxVol"])
@pytest.mark.parametrize("seed", range(4))
def test_incremental_matches_exact(kind, seed):
    op = operator_for(graph.erdos_renyi(40, 0.2, seed=seed), 0.4 + 0.3 * seed)
    f = IndexSet.first(6, 40)
    a = greedy_select(op, f, 15, cfg(kind))
    b = greedy_select(op, f, 15, cfg(kind, incremental=True))
    assert a.selected == b.selected
    assert np.allclose(a.objective_trace, b.objective_trace, rtol=1e-8)


def test_maxsig_trace_nondecreasing(op20):
    trace = greedy_select(op20, IndexSet.first(5, 20), 20, cfg("MaxSig")).objective_trace
    assert np.all(np.diff(trace) >= -1e-12)


def test_maxcut_needs_laplacian():
    shift = graph.adjacency(graph.cycle_graph(6))
    op = gfrft.gfrft_operator(gfrft.gft_basis(shift), 1.0)
    with pytest.raises(ValueError):
        greedy_select(op, IndexSet.first(2, 6), 2, cfg("MaxCut"))


def test_maxcov_polylowpass_runs(op20):
    res = greedy_select(op20, IndexSet.first(4, 20), 6, cfg("MaxCov", kernel=KernelSpec("polylowpass", 5)))
    assert len(set(res.selected)) == 6


@given(st.integers(0, 500), st.integers(1, 6))
def test_coverage_clamp_monotone_at_fixed_eps(seed, m):
    # with eps held fixed, adding a vertex can only lower the clamped weights
    op = operator_for(graph.random_sensor(12, 3, seed=seed), 0.9)
    t = np.abs(gfrft.localization_operator(op, Ideal(IndexSet.first(3, 12))).matrix)
    order = greedy_select(op, IndexSet.first(3, 12), m + 1, cfg("MaxCov")).selected
    eps = t[:, order[:m]].sum() / 12
    w0 = sampling.coverage_weights(t, order[:m], eps=eps)
    w1 = sampling.coverage_weights(t, order[: m + 1], eps=eps)
    assert np.all(w0 >= 0) and np.all(w1 >= 0)
    if np.any(eps - t[:, order[: m + 1]].sum(axis=1) > 0):  # no all-ones fallback
        assert np.all(w1 <= w0)


def test_coverage_weights_fallback():
    t = np.eye(3)
    assert np.array_equal(sampling.coverage_weights(t, [0, 1, 2]), np.ones(3))
    assert np.allclose(sampling.coverage_weights(t, []), np.full(3, 1 / 3))


# --- localized forms -------------------------------------------------------


def test_localized_identity_kernel():
    eye = np.eye(6)
    s = IndexSet.of([0, 2, 5], 6)
    assert localized_objective(eye, s, "MaxSig") == 3
    assert localized_objective(eye, s, "MaxVol") == 1
    assert localized_objective(eye, s, "MinTrac") == pytest.approx(3)
    assert localized_objective(eye, s, "MinPinv") == pytest.approx(3)
    with pytest.raises(ValueError):
        localized_objective(eye, [], "MaxSig")


def test_localized_strict_inverse_raises(op20):
    t = gfrft.localization_operator(op20, Ideal(IndexSet.first(3, 20)))
    with pytest.raises(SingularSubproblem):
        localized_objective(t, range(5), "MinTrac", pseudo=False)
    assert np.isfinite(localized_objective(t, range(5), "MinTrac"))


@given(st.integers(0, 300), st.sets(st.integers(0, 9), min_size=1, max_size=6))
def test_ideal_det_nonnegative(seed, s):
    op = operator_for(graph.erdos_renyi(10, 0.4, seed=seed), 0.7)
    t = gfrft.localization_operator(op, Ideal(IndexSet.first(3, 10)))
    assert localized_objective(t, s, "MaxVol") >= -1e-12


def test_weighted8_det_argmax(oracle_values):
    ref = oracle_values["weighted8_det"]
    g = graph.Graph(8, np.array(ref["weights"]))
    op = operator_for(g, ref["alpha"])
    t = gfrft.localization_operator(op, Ideal(IndexSet.of(ref["band"], 8)))
    dets = {s: localized_objective(t, s, "MaxVol") for s in itertools.combinations(range(8), 3)}
    best = max(dets, key=dets.get)
    assert list(best) == ref["argmax"]
    assert dets[best] == pytest.approx(ref["max_det"], rel=1e-9)


def test_table1_value_pairs():
    for seed in range(6):
        n = 6 + seed
        op = operator_for(graph.random_sensor(n, 3, seed=seed), 0.5 + 0.15 * seed)
        nf = 1 + seed % 3
        f = IndexSet.first(nf, n)
        t = gfrft.localization_operator(op, Ideal(f))
        rng = np.random.default_rng(seed)
        for size in range(nf, n + 1):
            s = sorted(rng.choice(n, size, replace=False))
            a = op.inverse_matrix[np.ix_(s, f.array)]
            sv = np.linalg.svd(a, compute_uv=False)
            if sv[-1] < 1e-6:
                continue
            tr = localized_objective(t, s, "MinTrac")
            assert np.real(np.trace(np.linalg.inv(a.conj().T @ a))) == pytest.approx(tr, rel=1e-7)
            assert -oracles.objective("MinPinv", op.forward_matrix, f, s) == pytest.approx(tr, rel=1e-7)
            assert sv[-1] == pytest.approx(1 / localized_objective(t, s, "MaxSigMin"), rel=1e-7)
            assert np.sum(sv**2) == pytest.approx(localized_objective(t, s, "MaxSig"), rel=1e-7)


# --- cutoff ------------------------------------------------------------------


def test_cutoff_full_set_is_infinite(op20):
    est = sampling.cutoff_frequency(op20.basis, op20.alpha, range(20), op=op20)
    assert est.omega == np.inf


def test_cutoff_star_center():
    b = gfrft.gft_basis(graph.laplacian(graph.star_graph(4)))
    est = sampling.cutoff_frequency(b, 1.0, [0], k=1)
    lap = b.shift.matrix
    oracle = np.sqrt(np.linalg.eigvalsh((lap @ lap)[1:, 1:])[0])
    assert est.omega == pytest.approx(oracle, rel=1e-9)
    assert est.omega == pytest.approx(1.0, rel=1e-9)
    assert est.phi[0] == 0 and np.allclose(np.abs(est.phi[1:]), np.abs(est.psi))


def test_cutoff_oracle_values_and_monotone(oracle_values):
    ref = oracle_values["weighted12_cutoff"]
    g = graph.Graph(12, np.array(ref["weights"]))
    b = gfrft.gft_basis(graph.laplacian(g))
    got = [sampling.cutoff_frequency(b, ref["alpha"], ref["sample_set"], k).omega for k in (2, 4, 6, 8)]
    assert np.allclose(got, [ref["omega"][str(k)] for k in (2, 4, 6, 8)], rtol=1e-8)
    assert np.all(np.diff(got) >= 0)


def test_exhaustive_recoverability_sanity():
    rng = np.random.default_rng(0)
    for i in range(12):
        n = int(rng.integers(5, 11))
        g = [graph.random_sensor(n, 3, seed=i), graph.erdos_renyi(n, 0.5, seed=i), graph.path_graph(n)][i % 3]
        op = operator_for(g, float(rng.uniform(0.3, 1.4)))
        nf = int(rng.integers(1, 4))
        f = IndexSet.first(nf, n)
        b = gfrft.band_projector(op, f)

        def margin(s):
            return gfrft.recoverability_margin(gfrft.vertex_projector(IndexSet.of(s, n).complement()), b)

        if not any(margin(s) > 1e-9 for s in itertools.combinations(range(n), nf)):
            continue
        for kind in sampling.GREEDY:
            assert margin(greedy_select(op, f, nf, cfg(kind)).selected) > 1e-9, kind
