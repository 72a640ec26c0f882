"""Input checking shared by the estimators, solvers and the CLI."""
from __future__ import annotations

import numbers
from typing import Iterable

from .trees import MAX_DEPTH, MAX_LABEL, Tree, TreeDataset, support_tree


def check_tree(nodes: Iterable[int], *, index: int | None = None) -> Tree:
    """Validate an iterable of labels and return it as a frozenset.

    Raises ``ValueError`` naming the offending label (and tree index, if given).
    """
    where = "" if index is None else f"tree {index}: "
    labels = []
    for v in nodes:
        if isinstance(v, bool) or not isinstance(v, numbers.Integral):
            raise ValueError(f"{where}node label {v!r} is not an integer")
        v = int(v)
        if v < 1:
            raise ValueError(f"{where}node label {v} is not positive")
        if v > MAX_LABEL:
            raise ValueError(f"{where}node {v} is deeper than {MAX_DEPTH} levels")
        labels.append(v)
    t = frozenset(labels)
    if 1 not in t:
        raise ValueError(f"{where}tree does not contain the root 1")
    for v in sorted(t):
        if v != 1 and v // 2 not in t:
            raise ValueError(f"{where}node {v} is present but its parent {v // 2} is missing")
    return t


def check_dataset(X, covariate=None, name: str = "", start=None) -> TreeDataset:
    """Coerce ``X`` into a ``TreeDataset``.

    ``X`` may already be a dataset, or any sequence of label iterables.
    """
    if isinstance(X, TreeDataset):
        if covariate is None and start is None:
            return X
        cov = X.covariate if covariate is None else _check_covariate(covariate, len(X))
        st = X.start if start is None else check_start(start, support_tree(X.trees))
        return TreeDataset(X.trees, cov, X.name, st)
    if isinstance(X, (set, frozenset)):
        raise ValueError("expected a sequence of trees, got a single tree")
    trees = tuple(check_tree(t, index=i) for i, t in enumerate(X))
    if not trees:
        raise ValueError("a dataset needs at least one tree")
    cov = None if covariate is None else _check_covariate(covariate, len(trees))
    return TreeDataset(trees, cov, name, check_start(start, support_tree(trees)))


def _check_covariate(covariate, n: int) -> tuple:
    values = tuple(float(c) for c in covariate)
    if len(values) != n:
        raise ValueError(f"covariate has {len(values)} values for {n} trees")
    return values


def check_start(start, sup: Tree) -> Tree:
    start = check_tree([1] if start is None else start)
    extra = start - sup
    if extra:
        raise ValueError(f"starting tree is not inside the support tree (node {min(extra)})")
    return start
