import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from relaysched import aco
from relaysched.estimators import AntColonyClique, BranchAndBoundClique, ProposedScheduler
from relaysched.exact import solve_exact
from relaysched.graph import ConflictGraph, Vertex
from relaysched.channel import ScenarioConfig, draw_scenario


def make_graph(adj, weights):
    adj = np.asarray(adj, dtype=bool)
    vertices = tuple(Vertex((i,)) for i in range(len(weights)))
    return ConflictGraph(vertices, np.asarray(weights, dtype=float), adj)


def random_graph(seed, V, p=0.5):
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((V, V)) < p, k=1)
    return make_graph(upper | upper.T, rng.random(V))


class TestParams:
    def test_table_defaults(self):
        p = aco.AcoParams()
        assert (p.tau_min, p.tau_max, p.alpha, p.rho, p.nb_ants, p.max_iterations) == (0.01, 6.0, 1.0, 0.99, 10, 500)

    @pytest.mark.parametrize(
        "kw", [{"tau_min": 0}, {"tau_min": 7.0}, {"rho": 1.0}, {"rho": 0.0}, {"nb_ants": 0}, {"max_iterations": -1}]
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            aco.AcoParams(**kw)


class TestConstruction:
    def test_star_sampling_law(self):
        # centre 0 joined to three mutually non-adjacent leaves
        adj = np.zeros((4, 4), dtype=bool)
        adj[0, 1:] = adj[1:, 0] = True
        g = make_graph(adj, [1, 1, 1, 1])
        tau = np.array([1.0, 1.0, 2.0, 5.0])
        rng = np.random.default_rng(0)
        trials = 40_000
        counts = np.zeros(4)
        for _ in range(trials):
            clique = aco.construct_clique(g, tau, 1.0, rng)
            assert len(clique) == 2 and 0 in clique
            counts[sum(clique)] += 1
        expected = 0.25 + 0.25 * tau[1:] / tau[1:].sum()
        np.testing.assert_allclose(counts[1:] / trials, expected, atol=0.01)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 25))
    def test_ant_builds_maximal_clique(self, seed, V):
        g = random_graph(seed, V)
        clique = aco.construct_clique(g, np.ones(V), 1.0, np.random.default_rng(seed))
        assert g.is_maximal_clique(clique)


class TestUpdate:
    def test_evaporate_reward_clamp(self):
        tau = np.array([1.0, 1.0, 0.0101, 5.99])
        out = aco.update_pheromones(tau, [0, 3], best_weight=5.0, iter_weight=4.0, rho=0.99, tau_min=0.01, tau_max=6.0)
        np.testing.assert_allclose(out, [0.99 + 0.5, 0.99, 0.01, 6.0])
        assert tau[0] == 1.0  # input untouched

    def test_full_reward_when_iteration_matches_best(self):
        out = aco.update_pheromones(np.ones(2), [1], 3.0, 3.0, 0.5, 0.01, 6.0)
        np.testing.assert_allclose(out, [0.5, 1.5])

    def test_best_must_dominate(self):
        with pytest.raises(ValueError):
            aco.update_pheromones(np.ones(2), [0], 1.0, 2.0, 0.99, 0.01, 6.0)


class TestSolve:
    def test_empty_graph(self):
        g = make_graph(np.zeros((0, 0)), [])
        res = aco.solve(g)
        assert res.clique == () and res.total_weight == 0.0

    def test_single_vertex(self):
        res = aco.solve(make_graph([[0]], [2.5]), aco.AcoParams(max_iterations=3))
        assert res.clique == (0,) and res.total_weight == 2.5

    def test_pheromone_bounds_hold(self):
        g = random_graph(1, 40)
        res = aco.solve(g, aco.AcoParams(max_iterations=200))
        assert np.all(res.pheromone_range[:, 0] >= 0.01) and np.all(res.pheromone_range[:, 1] <= 6.0)
        assert np.all((res.pheromone >= 0.01) & (res.pheromone <= 6.0))

    def test_trace_non_decreasing(self):
        res = aco.solve(random_graph(2, 60), aco.AcoParams(max_iterations=100))
        assert np.all(np.diff(res.weight_trace) >= 0)
        assert res.weight_trace[-1] == pytest.approx(res.total_weight)

    def test_seeded_determinism(self):
        g = random_graph(3, 50)
        a = aco.solve(g, aco.AcoParams(rng_seed=4, max_iterations=50))
        b = aco.solve(g, aco.AcoParams(rng_seed=4, max_iterations=50))
        assert a.clique == b.clique and np.array_equal(a.weight_trace, b.weight_trace)

    def test_target_stops_early(self):
        g = random_graph(5, 15)
        opt = solve_exact(g).total_weight
        res = aco.solve(g, aco.AcoParams(max_iterations=500), target_weight=opt)
        assert res.total_weight == pytest.approx(opt)
        assert res.iterations_used < 500

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 30), st.floats(0.1, 0.9))
    def test_output_is_maximal_clique_within_exact(self, seed, V, p):
        g = random_graph(seed, V, p)
        res = aco.solve(g, aco.AcoParams(max_iterations=30, rng_seed=seed))
        assert g.is_maximal_clique(res.clique)
        assert res.total_weight <= solve_exact(g).total_weight + 1e-12


class TestEstimators:
    def test_params_round_trip(self):
        est = AntColonyClique(nb_ants=4, max_iterations=20)
        assert est.get_params()["nb_ants"] == 4
        twin = clone(est)
        assert twin.get_params() == est.get_params()
        est.set_params(rho=0.9)
        assert est.rho == 0.9

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            AntColonyClique().allocation(random_graph(0, 3))

    def test_fit_matches_functional_api(self):
        g = random_graph(6, 30)
        est = AntColonyClique(max_iterations=40, random_state=2).fit(g)
        res = aco.solve(g, aco.AcoParams(max_iterations=40, rng_seed=2))
        assert est.clique_ == res.clique and est.weight_ == res.total_weight
        assert est.n_iter_ == 40 and len(est.weight_trace_) == 40

    def test_exact_estimator(self):
        g = random_graph(7, 20)
        assert BranchAndBoundClique().fit(g).weight_ == pytest.approx(solve_exact(g).total_weight)

    def test_rejects_bad_input(self):
        with pytest.raises(TypeError):
            AntColonyClique().fit(np.eye(3))
        asym = np.zeros((2, 2), dtype=bool)
        asym[0, 1] = True
        with pytest.raises(ValueError):
            AntColonyClique().fit(make_graph(asym, [1, 1]))

    def test_scheduler(self):
        cfg = ScenarioConfig(num_ms=2, num_rs=2, num_subcarriers=3)
        _, real = draw_scenario(cfg, 0)
        exact = ProposedScheduler.from_config(cfg, solver="exact").fit(real)
        heur = ProposedScheduler.from_config(cfg, max_iterations=100).fit(real)
        assert exact.throughput_ >= heur.throughput_ - 1e-12
        assert exact.graph_.is_maximal_clique(exact.solver_.clique_)
        with pytest.raises(ValueError):
            ProposedScheduler(solver="magic").fit(real)
