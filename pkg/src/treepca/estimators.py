"""Estimator-style wrappers around the tree-line and tree-curve solvers.

``X`` is always a sequence of trees (label iterables) or a ``TreeDataset``.
``transform`` returns projection sizes, the per-tree scores used for
regression against a covariate.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analysis import projections, score_report
from .bnb import bb_first_pc_2line, brute_force_2line, brute_force_next_2line, next_pc_2line
from .curves import HEURISTICS, curve_objective, exhaustive_curve
from .lines import first_pc_1line, line_objective, next_pc_1line
from .trees import support_tree
from .validation import check_dataset, check_start


class TreeLinePCA(TransformerMixin, BaseEstimator):
    """Principal k-tree-lines (k = 1 or 2) found one after another.

    Parameters
    ----------
    k : 1 or 2
    n_components : number of lines; each later line minimises the distance
        to the union of projections onto all lines so far.
    start : starting tree, the root by default.
    method : ``"bb"`` (branch and bound) or ``"brute"`` for k = 2.
    time_limit : seconds per component for k = 2; on timeout the best line
        found so far is kept and ``status_`` says ``"timeout"``.
    """

    def __init__(self, k=2, n_components=1, start=None, method="bb", time_limit=None):
        self.k = k
        self.n_components = n_components
        self.start = start
        self.method = method
        self.time_limit = time_limit

    def _check_params(self):
        if self.k not in (1, 2):
            raise ValueError(f"k must be 1 or 2, got {self.k}")
        if int(self.n_components) < 1:
            raise ValueError("n_components must be at least 1")
        if self.method not in ("bb", "brute"):
            raise ValueError(f"method must be 'bb' or 'brute', got {self.method!r}")

    def fit(self, X, y=None):
        self._check_params()
        ds = check_dataset(X)
        trees = list(ds.trees)
        start = check_start(self.start, support_tree(trees)) if self.start is not None else ds.start
        comps, objs, statuses = [], [], []
        for c in range(int(self.n_components)):
            if self.k == 1:
                line = first_pc_1line(trees, start) if c == 0 else next_pc_1line(trees, start, comps)
                status = "optimal"
            elif self.method == "bb":
                res = (bb_first_pc_2line(trees, start, self.time_limit) if c == 0
                       else next_pc_2line(trees, start, comps, self.time_limit))
                line, status = res.line, res.status
            else:
                res = (brute_force_2line(trees, start, self.time_limit) if c == 0
                       else brute_force_next_2line(trees, start, comps))
                line, status = res.line, res.status
            comps.append(line)
            objs.append(line_objective(trees, comps))
            statuses.append(status)
        self.components_ = comps
        self.objectives_ = objs
        self.statuses_ = statuses
        self.status_ = "timeout" if "timeout" in statuses else "optimal"
        self.start_ = start
        self.n_features_in_ = len(support_tree(trees))
        return self

    def transform(self, X):
        """Projection size of each tree onto the union of the first 1, 2, ... lines."""
        check_is_fitted(self, "components_")
        trees = check_dataset(X).trees
        cols = [[len(p) for p in projections(trees, self.components_[: c + 1])]
                for c in range(len(self.components_))]
        return np.array(cols, dtype=np.int64).T

    def score_report(self, X, n_components=None):
        check_is_fitted(self, "components_")
        n = len(self.components_) if n_components is None else n_components
        return score_report(check_dataset(X).trees, self.components_[:n])


class TreeCurvePCA(TransformerMixin, BaseEstimator):
    """First principal tree-curve from one of the curve heuristics.

    ``heuristic`` is one of ``wo``, ``greedy``, ``switch``, ``wo_s`` or
    ``exhaustive`` (small supports only).
    """

    def __init__(self, heuristic="wo_s", start=None, node_budget=8):
        self.heuristic = heuristic
        self.start = start
        self.node_budget = node_budget

    def fit(self, X, y=None):
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}; choose from {sorted(HEURISTICS)}")
        ds = check_dataset(X)
        trees = list(ds.trees)
        start = check_start(self.start, support_tree(trees)) if self.start is not None else ds.start
        if self.heuristic == "exhaustive":
            curve = exhaustive_curve(trees, start, self.node_budget)
        else:
            curve = HEURISTICS[self.heuristic](trees, start)
        self.curve_ = curve
        self.objective_ = curve_objective(trees, curve)
        self.n_features_in_ = len(support_tree(trees))
        return self

    def transform(self, X):
        check_is_fitted(self, "curve_")
        trees = check_dataset(X).trees
        return np.array([[len(p)] for p in projections(trees, self.curve_)], dtype=np.int64)

    def score_report(self, X):
        check_is_fitted(self, "curve_")
        return score_report(check_dataset(X).trees, self.curve_)
