"""Tree-curves: unconstrained growth sequences from a starting tree to the support.

A curve adds one node at a time, each node's parent being already present.
Projection and objective mirror the tree-line versions.  Four heuristics build
curves (weight order, greedy, switching, and weight order followed by
switching) and an exhaustive search over all orderings serves as the oracle
on small supports.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lines import KTreeLine, scan_projection
from .trees import Tree, support_tree, weights as node_weights

ROOT = frozenset({1})


class InvalidCurve(ValueError):
    pass


@dataclass(frozen=True)
class TreeCurve:
    """Start tree plus an ordered sequence of added nodes.

    Every prefix must be a tree: each added node's parent is either in the
    start or added earlier.
    """

    start: Tree
    added: tuple = ()

    def __post_init__(self):
        seen = set(self.start)
        for v in self.added:
            if v in seen:
                raise InvalidCurve(f"node {v} appears twice on the curve")
            if v == 1 or v // 2 not in seen:
                raise InvalidCurve(f"node {v} is added before its parent {v // 2}")
            seen.add(v)

    @property
    def nodes(self) -> Tree:
        return self.start.union(self.added)

    def __len__(self):
        return len(self.added) + 1

    def tree_at(self, index: int) -> Tree:
        return self.start.union(self.added[:index])

    def is_complete(self, sup: Tree) -> bool:
        return self.nodes == sup

    @classmethod
    def from_line(cls, line: KTreeLine, rest=()) -> "TreeCurve":
        """Curve whose prefix reproduces ``line``, continued by ``rest``."""
        return cls(line.start, tuple(line.added) + tuple(rest))


def project_onto_curve(t: Tree, curve: TreeCurve) -> tuple[int, Tree, int]:
    i, d = scan_projection(t, curve.start, curve.added)
    return i, curve.tree_at(i), d


def curve_objective(trees: Sequence[Tree], curve: TreeCurve) -> int:
    sup = support_tree(trees)
    if not curve.is_complete(sup):
        raise ValueError(
            f"curve covers {len(curve.nodes)} nodes but the support tree has {len(sup)}"
        )
    return sum(scan_projection(t, curve.start, curve.added)[1] for t in trees)


def _check_start(trees, start) -> tuple[list, Tree, Tree]:
    trees = list(trees)
    sup = support_tree(trees)
    start = ROOT if start is None else frozenset(start)
    if not start <= sup:
        raise ValueError("starting tree is not inside the support tree")
    return trees, sup, start


def _deltas(trees, nodes) -> dict[int, np.ndarray]:
    """Per-tree change of distance when each node joins the prefix."""
    return {v: np.array([-1 if v in t else 1 for t in trees], dtype=np.int64) for v in nodes}


def heuristic_wo(trees: Sequence[Tree], start: Tree | None = None) -> TreeCurve:
    """Weight order: heaviest nodes first, ties by ascending label.

    A child never outweighs its parent and always carries a larger label, so
    this order keeps every prefix a valid tree.
    """
    trees, sup, start = _check_start(trees, start)
    w = node_weights(trees)
    order = sorted(sup - start, key=lambda v: (-w[v], v))
    return TreeCurve(start, tuple(order))


def heuristic_greedy(trees: Sequence[Tree], start: Tree | None = None) -> TreeCurve:
    """Append the frontier node giving the smallest partial-curve objective, ties by label."""
    trees, sup, start = _check_start(trees, start)
    delta = _deltas(trees, sup - start)
    cur = np.array([len(t ^ start) for t in trees], dtype=np.int64)
    low = cur.copy()
    nodes = set(start)
    added = []
    frontier = {c for v in start for c in (2 * v, 2 * v + 1) if c in sup and c not in start}
    while frontier:
        best, best_val = None, None
        for v in sorted(frontier):
            val = int(np.minimum(low, cur + delta[v]).sum())
            if best_val is None or val < best_val:
                best, best_val = v, val
        cur = cur + delta[best]
        low = np.minimum(low, cur)
        nodes.add(best)
        added.append(best)
        frontier.discard(best)
        frontier.update(c for c in (2 * best, 2 * best + 1) if c in sup)
    return TreeCurve(start, tuple(added))


def _try_switch(trees, curve: TreeCurve, delta) -> TreeCurve | None:
    """First improving feasible swap in lexicographic pair order, or ``None``."""
    seq = list(curve.added)
    m = len(seq)
    if m < 2:
        return None
    pos = {v: i for i, v in enumerate(seq)}
    steps = np.stack([delta[v] for v in seq], axis=1)
    d0 = np.array([len(t ^ curve.start) for t in trees], dtype=np.int64)
    dist = np.concatenate([d0[:, None], d0[:, None] + np.cumsum(steps, axis=1)], axis=1)
    pre = np.minimum.accumulate(dist, axis=1)
    suf = np.minimum.accumulate(dist[:, ::-1], axis=1)[:, ::-1]
    big = np.iinfo(np.int64).max // 4
    suf = np.concatenate([suf, np.full((len(trees), 1), big)], axis=1)
    current = int(pre[:, -1].sum())
    # position of each node's parent on the curve, -1 when it lies in the start
    ppos = np.array([pos.get(v // 2, -1) for v in seq])
    for i in range(m - 1):
        vi = seq[i]
        kid_pos = [pos[c] for c in (2 * vi, 2 * vi + 1) if c in pos]
        stop = min(kid_pos) if kid_pos else m
        js = np.arange(i + 1, stop)
        js = js[ppos[js] < i]
        if js.size == 0:
            continue
        # swapping positions i and j shifts prefixes i+1..j by delta(v_j) - delta(v_i)
        ranged = np.minimum.accumulate(dist[:, i + 1 :], axis=1)
        diff = steps[:, js] - steps[:, [i]]
        new = np.minimum(np.minimum(pre[:, [i]], ranged[:, js - i - 1] + diff), suf[:, js + 1])
        better = np.nonzero(new.sum(axis=0) < current)[0]
        if better.size:
            j = int(js[better[0]])
            seq[i], seq[j] = seq[j], seq[i]
            return TreeCurve(curve.start, tuple(seq))
    return None


def heuristic_switch(trees: Sequence[Tree], curve: TreeCurve) -> TreeCurve:
    """Swap pairs of nodes while some valid swap strictly lowers the objective.

    Pairs are scanned in lexicographic order of positions and the scan restarts
    after each accepted swap.  Swaps that would break a prefix are skipped.
    """
    trees = list(trees)
    curve_objective(trees, curve)  # completeness check
    delta = _deltas(trees, curve.added)
    while True:
        nxt = _try_switch(trees, curve, delta)
        if nxt is None:
            return curve
        curve = nxt


def heuristic_switch_natural(trees: Sequence[Tree], start: Tree | None = None) -> TreeCurve:
    """Switching started from the curve that adds nodes in ascending label order."""
    trees, sup, start = _check_start(trees, start)
    return heuristic_switch(trees, TreeCurve(start, tuple(sorted(sup - start))))


def heuristic_wo_s(trees: Sequence[Tree], start: Tree | None = None) -> TreeCurve:
    return heuristic_switch(trees, heuristic_wo(trees, start))


def exhaustive_curve(trees: Sequence[Tree], start: Tree | None = None, node_budget: int = 8) -> TreeCurve:
    """Best curve over every valid ordering; the lexicographically smallest wins ties.

    Orderings grow factorially, so supports with more than ``node_budget``
    nodes outside the start are refused.
    """
    trees, sup, start = _check_start(trees, start)
    free = sup - start
    if len(free) > node_budget:
        raise ValueError(
            f"exhaustive search over {len(free)} nodes exceeds the budget of {node_budget}"
        )
    delta = _deltas(trees, free)
    added: list[int] = []
    best: list = [None, ()]

    def rec(frontier, cur, low, rem):
        if not frontier:
            val = int(low.sum())
            if best[0] is None or val < best[0]:
                best[0], best[1] = val, tuple(added)
            return
        # adding the remaining nodes of a tree first is the best that tree can do
        if best[0] is not None and int(np.minimum(low, cur - rem).sum()) >= best[0]:
            return
        for v in sorted(frontier):
            nxt = cur + delta[v]
            added.append(v)
            rec((frontier - {v}) | {c for c in (2 * v, 2 * v + 1) if c in sup},
                nxt, np.minimum(low, nxt), rem - (delta[v] < 0))
            added.pop()

    d0 = np.array([len(t ^ start) for t in trees], dtype=np.int64)
    rem0 = np.array([len(t - start) for t in trees], dtype=np.int64)
    rec(frozenset(c for v in start for c in (2 * v, 2 * v + 1) if c in free), d0, d0.copy(), rem0)
    return TreeCurve(start, best[1])


def performance_from_objectives(f: int, f_star: int) -> float:
    if f_star > f:
        raise ValueError(f"reference objective {f_star} exceeds the heuristic's {f}")
    if f == 0:
        return 100.0
    return 100.0 * f_star / f


def performance_pct(trees: Sequence[Tree], curve: TreeCurve, best: TreeCurve) -> float:
    """Optimal objective as a percentage of ``curve``'s; 100 when both are zero."""
    return performance_from_objectives(curve_objective(trees, curve), curve_objective(trees, best))


HEURISTICS = {
    "wo": heuristic_wo,
    "greedy": heuristic_greedy,
    "switch": heuristic_switch_natural,
    "wo_s": heuristic_wo_s,
    "exhaustive": exhaustive_curve,
}
