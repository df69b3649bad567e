"""scikit-learn style wrapper around the sparsest-permutation searches."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .causal import (
    CIOracle,
    FisherZOracle,
    exhaustive_sp,
    greedy_sp_covered,
    greedy_sp_permutohedron,
    minimal_imap,
)
from .graphs import essential_graph

ALGORITHMS = ("covered", "perm", "exhaustive")


class SparsestPermutation(BaseEstimator):
    """Learn a DAG up to Markov equivalence from data or a CI oracle.

    ``fit`` accepts an ``(n_samples, n_features)`` array, tested with a
    Fisher z partial-correlation oracle at level ``alpha``, or a ready
    :class:`~dagassoc.causal.CIOracle`.
    """

    def __init__(self, algorithm="covered", restarts=10, max_steps=1000,
                 plateau_budget=50, alpha=0.01, seed=0):
        self.algorithm = algorithm
        self.restarts = restarts
        self.max_steps = max_steps
        self.plateau_budget = plateau_budget
        self.alpha = alpha
        self.seed = seed

    def _oracle(self, X) -> CIOracle:
        if isinstance(X, CIOracle):
            return X
        X = check_array(X, ensure_min_samples=4, ensure_min_features=2)
        return FisherZOracle(X, alpha=self.alpha)

    def fit(self, X, y=None):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        oracle = self._oracle(X)
        self.n_features_in_ = oracle.n
        if self.algorithm == "exhaustive":
            res = exhaustive_sp(oracle)
            self.permutation_ = res.permutations[0]
            self.dag_ = minimal_imap(oracle, self.permutation_)
            self.log_ = []
        else:
            search = greedy_sp_covered if self.algorithm == "covered" else greedy_sp_permutohedron
            res = search(oracle, max_steps=self.max_steps, plateau_budget=self.plateau_budget,
                         seed=self.seed, restarts=self.restarts)
            self.permutation_ = res.pi
            self.dag_ = res.dag
            self.log_ = res.log
        self.essential_graph_ = essential_graph(self.dag_)
        self.n_edges_ = self.dag_.num_edges()
        return self

    @property
    def adjacency_matrix_(self) -> np.ndarray:
        """``A[i, j] = 1`` for each edge ``i -> j`` of the fitted DAG."""
        check_is_fitted(self, "dag_")
        a = np.zeros((self.dag_.n, self.dag_.n), dtype=int)
        for i, j in self.dag_.arcs():
            a[i, j] = 1
        return a
