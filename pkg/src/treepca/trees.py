"""Binary trees as sets of heap-style integer labels.

The root is labelled 1 and the children of ``v`` are ``2v`` and ``2v + 1``,
so parent and level are pure arithmetic.  A tree is a ``frozenset`` of labels
that contains the root and is closed under taking parents.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_LABEL = 2**53 - 1
MAX_DEPTH = 53

Tree = frozenset


class DepthLimitError(ValueError):
    """Raised when a label would fall below the 53rd level."""


def parent(v: int) -> int:
    if v == 1:
        raise ValueError("the root has no parent")
    if v < 1:
        raise ValueError(f"invalid node label {v}")
    return v // 2


def children(v: int) -> tuple[int, int]:
    if v < 1:
        raise ValueError(f"invalid node label {v}")
    if 2 * v + 1 > MAX_LABEL:
        raise DepthLimitError(f"children of {v} exceed the {MAX_DEPTH}-level limit")
    return 2 * v, 2 * v + 1


def level(v: int) -> int:
    """Level of ``v``; the root is on level 1."""
    if v < 1:
        raise ValueError(f"invalid node label {v}")
    return v.bit_length()


def label_ops(v: int) -> dict:
    """Parent (``None`` for the root), children and level of ``v``."""
    left, right = children(v)
    return {"parent": None if v == 1 else parent(v), "left_child": left, "right_child": right, "level": level(v)}


def distance(t1: Tree, t2: Tree) -> int:
    """Size of the symmetric difference of two trees."""
    return len(t1 ^ t2)


@dataclass(frozen=True)
class TreeDataset:
    trees: tuple
    covariate: tuple | None = None
    name: str = ""
    start: frozenset = frozenset({1})

    def __post_init__(self):
        if len(self.trees) == 0:
            raise ValueError("a dataset needs at least one tree")
        if self.covariate is not None and len(self.covariate) != len(self.trees):
            raise ValueError(
                f"covariate has {len(self.covariate)} values for {len(self.trees)} trees"
            )

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    @property
    def total_nodes(self) -> int:
        return sum(len(t) for t in self.trees)


def support_tree(trees: Iterable[Tree]) -> Tree:
    return frozenset().union(*trees)


def weights(trees: Iterable[Tree]) -> dict[int, int]:
    """Number of trees containing each node of the support."""
    counts: Counter = Counter()
    for t in trees:
        counts.update(t)
    return dict(counts)


def subtree_sizes(t: Tree) -> dict[int, int]:
    sizes = dict.fromkeys(t, 1)
    for v in sorted(t, reverse=True):
        if v != 1:
            sizes[v // 2] += sizes[v]
    return sizes


def descendant_correspondence(t: Tree) -> Tree:
    """Relabel ``t`` so the child with more descendants is always on the left.

    Equal subtree sizes keep their original orientation.
    """
    sizes = subtree_sizes(t)
    out = []
    stack = [(1, 1)]
    while stack:
        old, new = stack.pop()
        out.append(new)
        left, right = 2 * old, 2 * old + 1
        if sizes.get(right, 0) > sizes.get(left, 0):
            left, right = right, left
        if left in sizes:
            stack.append((left, 2 * new))
        if right in sizes:
            stack.append((right, 2 * new + 1))
    return frozenset(out)


def random_tree(p: float, max_depth: int = MAX_DEPTH, rng=None) -> Tree:
    """Galton-Watson tree: every node branches into two children with probability ``p``.

    Growth is level by level; nodes on level ``max_depth`` never branch.
    ``rng`` is a ``numpy.random.Generator`` or a seed.
    """
    if not 0 <= p < 1:
        raise ValueError(f"branching probability must lie in [0, 1), got {p}")
    if not 1 <= max_depth <= MAX_DEPTH:
        raise ValueError(f"max_depth must lie in [1, {MAX_DEPTH}], got {max_depth}")
    rng = np.random.default_rng(rng)
    nodes = [1]
    frontier = [1]
    for _ in range(max_depth - 1):
        if not frontier:
            break
        branch = rng.random(len(frontier)) < p
        frontier = [c for v, b in zip(frontier, branch) if b for c in (2 * v, 2 * v + 1)]
        nodes.extend(frontier)
    return frozenset(nodes)


def estimate_branch_prob(t: Tree) -> float:
    n = len(t)
    if n < 1:
        raise ValueError("empty tree")
    return 0.5 * (1.0 - 1.0 / n)


def full_tree(levels: int) -> Tree:
    return frozenset(range(1, 2**levels))


def children_map(sup: Tree) -> dict[int, tuple[int, ...]]:
    """Children of every support node that are themselves in the support."""
    return {v: tuple(c for c in (2 * v, 2 * v + 1) if c in sup) for v in sup}


def as_sequence(trees) -> Sequence[Tree]:
    if isinstance(trees, TreeDataset):
        return trees.trees
    return trees
