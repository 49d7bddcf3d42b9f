"""scikit-learn style wrappers around the clique solvers and the scheduler.

``fit`` takes a :class:`ConflictGraph` (or a channel realization for the
scheduler) instead of a feature matrix; everything learned is exposed as
trailing-underscore attributes, and hyper-parameters round-trip through
``get_params``/``set_params`` so the objects clone and compare like any
other estimator.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import aco
from ._validation import check_graph, check_realization
from .channel import RelayStrategy, ScenarioConfig
from .exact import DEFAULT_MAX_VERTICES, solve_exact
from .graph import build_graph, clique_to_allocation


class _CliqueSolverMixin:
    def _store(self, graph, res):
        self.clique_ = res.clique
        self.weight_ = res.total_weight
        self.weight_trace_ = res.weight_trace
        self.n_iter_ = res.iterations_used
        self.n_vertices_ = len(graph)
        return self

    def allocation(self, graph):
        """Schedule encoded by the fitted clique on ``graph``."""
        check_is_fitted(self, "clique_")
        return clique_to_allocation(graph, self.clique_)


class AntColonyClique(_CliqueSolverMixin, BaseEstimator):
    """MAX-MIN ant colony solver for the maximum weighted clique.

    Parameters mirror :class:`relaysched.aco.AcoParams`; ``target_weight``
    stops the colony early once that weight is reached.
    """

    def __init__(
        self,
        tau_min=0.01,
        tau_max=6.0,
        alpha=1.0,
        rho=0.99,
        nb_ants=10,
        max_iterations=500,
        random_state=0,
        target_weight=None,
    ):
        self.tau_min = tau_min
        self.tau_max = tau_max
        self.alpha = alpha
        self.rho = rho
        self.nb_ants = nb_ants
        self.max_iterations = max_iterations
        self.random_state = random_state
        self.target_weight = target_weight

    def _params(self) -> aco.AcoParams:
        seed = self.random_state
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1)[0])
        return aco.AcoParams(
            tau_min=self.tau_min,
            tau_max=self.tau_max,
            alpha=self.alpha,
            rho=self.rho,
            nb_ants=self.nb_ants,
            max_iterations=self.max_iterations,
            rng_seed=int(seed),
        )

    def fit(self, graph, y=None):
        graph = check_graph(graph)
        res = aco.solve(graph, self._params(), self.target_weight)
        self.pheromone_ = res.pheromone
        self.pheromone_range_ = res.pheromone_range
        return self._store(graph, res)


class BranchAndBoundClique(_CliqueSolverMixin, BaseEstimator):
    """Exact maximum weighted clique; refuses graphs above ``max_vertices``."""

    def __init__(self, max_vertices=DEFAULT_MAX_VERTICES, method="auto"):
        self.max_vertices = max_vertices
        self.method = method

    def fit(self, graph, y=None):
        graph = check_graph(graph)
        return self._store(graph, solve_exact(graph, self.max_vertices, self.method))


class ProposedScheduler(BaseEstimator):
    """Three-slot scheduler: build the conflict graph, then solve it.

    ``solver`` is ``"aco"`` or ``"exact"``.  After ``fit`` the estimator
    holds ``graph_``, ``allocation_`` and ``throughput_``.
    """

    def __init__(
        self,
        strategy="df-xor",
        xi=0.5,
        theta=0.5,
        solver="aco",
        nb_ants=10,
        max_iterations=500,
        random_state=0,
        max_vertices=DEFAULT_MAX_VERTICES,
    ):
        self.strategy = strategy
        self.xi = xi
        self.theta = theta
        self.solver = solver
        self.nb_ants = nb_ants
        self.max_iterations = max_iterations
        self.random_state = random_state
        self.max_vertices = max_vertices

    @classmethod
    def from_config(cls, cfg: ScenarioConfig, **kw) -> ProposedScheduler:
        return cls(strategy=cfg.relay_strategy.value, xi=cfg.xi, theta=cfg.theta, **kw)

    def _solver(self):
        if self.solver == "aco":
            return AntColonyClique(
                nb_ants=self.nb_ants, max_iterations=self.max_iterations, random_state=self.random_state
            )
        if self.solver == "exact":
            return BranchAndBoundClique(max_vertices=self.max_vertices)
        raise ValueError(f"solver must be 'aco' or 'exact', got {self.solver!r}")

    def fit(self, real, y=None):
        real = check_realization(real)
        solver = self._solver()
        graph = build_graph(real, strategy=RelayStrategy(self.strategy), xi=self.xi, theta=self.theta)
        solver.fit(graph)
        self.graph_ = graph
        self.solver_ = solver
        self.allocation_ = clique_to_allocation(graph, solver.clique_)
        self.throughput_ = self.allocation_.throughput
        return self

