"""k-tree-lines for k in {1, 2}: construction, projection and the exact 1-line solver."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .trees import Tree, support_tree, weights as node_weights


class InvalidExtension(ValueError):
    pass


@dataclass(frozen=True)
class KTreeLine:
    """Nested trees grown from ``start`` by appending ``added`` one node at a time.

    Each new node must be a child of one of the ``k`` most recently added
    nodes; while fewer than ``k`` nodes have been added, any node of the
    current tree may be its parent.
    """

    start: Tree
    added: tuple = ()
    k: int = 2

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError(f"only k = 1 or k = 2 is supported, got {self.k}")

    @property
    def nodes(self) -> Tree:
        return self.start.union(self.added)

    def __len__(self):
        return len(self.added) + 1

    def active(self):
        """Nodes whose children may be appended next."""
        if len(self.added) < self.k:
            return self.start.union(self.added)
        return self.added[-self.k :]

    def candidates(self, sup: Tree) -> list[int]:
        nodes = self.nodes
        out = {
            c
            for v in self.active()
            for c in (2 * v, 2 * v + 1)
            if c in sup and c not in nodes
        }
        return sorted(out)

    def is_maximal(self, sup: Tree) -> bool:
        return not self.candidates(sup)

    def extend(self, v: int, sup: Tree | None = None) -> "KTreeLine":
        if v in self.start or v in self.added:
            raise InvalidExtension(f"node {v} is already on the line")
        if sup is not None and v not in sup:
            raise InvalidExtension(f"node {v} is not in the support tree")
        if v == 1 or v // 2 not in set(self.active()):
            raise InvalidExtension(
                f"parent of {v} is not among the active nodes {sorted(self.active())}"
            )
        return KTreeLine(self.start, self.added + (v,), self.k)

    def prefixes(self) -> Iterator[Tree]:
        cur = set(self.start)
        yield frozenset(cur)
        for v in self.added:
            cur.add(v)
            yield frozenset(cur)

    def tree_at(self, index: int) -> Tree:
        return self.start.union(self.added[:index])

    @classmethod
    def from_sequence(cls, start, added, k=2, sup=None) -> "KTreeLine":
        """Build a line node by node, checking the window rule at each step."""
        line = cls(frozenset(start), (), k)
        for v in added:
            line = line.extend(v, sup)
        return line


def scan_projection(t: Tree, start: Tree, added: Sequence[int]) -> tuple[int, int]:
    """Index and distance of the nearest prefix tree (smallest index on ties).

    Walks the prefixes once: the distance drops by one when the appended node
    is in ``t`` and grows by one otherwise.
    """
    d = len(t ^ start)
    best_i, best_d = 0, d
    for i, v in enumerate(added, 1):
        d += -1 if v in t else 1
        if d < best_d:
            best_i, best_d = i, d
    return best_i, best_d


def project_onto_line(t: Tree, line: KTreeLine) -> tuple[int, Tree, int]:
    i, d = scan_projection(t, line.start, line.added)
    return i, line.tree_at(i), d


def project_onto_union(t: Tree, lines: Sequence[KTreeLine]) -> tuple[Tree, int]:
    """Union of the per-line projections of ``t`` and its distance to ``t``."""
    if not lines:
        raise ValueError("need at least one line")
    start = lines[0].start
    if any(line.start != start for line in lines):
        raise ValueError("all lines must share the same starting tree")
    proj = frozenset().union(*(project_onto_line(t, line)[1] for line in lines))
    return proj, len(t ^ proj)


def line_objective(trees: Sequence[Tree], lines) -> int:
    if isinstance(lines, KTreeLine):
        lines = [lines]
    if len(lines) == 1:
        line = lines[0]
        return sum(scan_projection(t, line.start, line.added)[1] for t in trees)
    return sum(project_onto_union(t, lines)[1] for t in trees)


def iter_lines(sup: Tree, start: Tree, k: int = 2, maximal_only: bool = True) -> Iterator[KTreeLine]:
    """Depth-first enumeration of the k-tree-lines from ``start`` inside ``sup``.

    Lines come out in lexicographic order of their added sequences.  With
    ``maximal_only`` only lines that admit no further extension are yielded,
    otherwise every prefix (including the bare start) is yielded once.
    """
    nodes = set(start)
    added: list[int] = []

    def active():
        if len(added) < k:
            return nodes
        return added[-k:]

    def rec():
        cands = sorted(
            {c for v in active() for c in (2 * v, 2 * v + 1) if c in sup and c not in nodes}
        )
        if not maximal_only or not cands:
            yield KTreeLine(start, tuple(added), k)
        for c in cands:
            nodes.add(c)
            added.append(c)
            yield from rec()
            added.pop()
            nodes.discard(c)

    yield from rec()


def enumerate_2lines(sup: Tree, start: Tree) -> Iterator[KTreeLine]:
    return iter_lines(sup, start, 2, maximal_only=True)


def count_2lines(levels: int) -> int:
    """Number of 2-tree-lines from the root of a full tree whose last node is on ``levels``.

    Tracks lines ending with one node (``one``) and two nodes (``two``) on the
    deepest level: ``one' = 2 one + 4 two`` and ``two' = 2 one + 6 two``.
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    one, two = 1, 0
    for _ in range(levels - 1):
        one, two = 2 * one + 4 * two, 2 * one + 6 * two
    return one + two


def count_2lines_closed_form(levels: int) -> float:
    if levels < 1:
        raise ValueError("levels must be at least 1")
    lam1, lam2 = 4 + 2 * math.sqrt(3), 4 - 2 * math.sqrt(3)
    n = levels - 1
    return (lam1**n + lam2**n) / 2


def max_line_length(m: int) -> int:
    """Most nodes a 2-tree-line from the root can hold in a full tree of ``m`` nodes."""
    if m < 1 or (m + 1) & m:
        raise ValueError(f"{m} is not the size of a full binary tree")
    depth = (m + 1).bit_length() - 1
    return 1 + 2 * (depth - 1)


def _best_paths(sup: Tree, w: dict[int, int]) -> dict[int, tuple[int, int | None]]:
    """For each support node, the heaviest downward path sum and the child it continues to."""
    best: dict[int, tuple[int, int | None]] = {}
    for v in sorted(sup, reverse=True):
        kids = [c for c in (2 * v, 2 * v + 1) if c in sup]
        if kids:
            nxt = max(kids, key=lambda c: (best[c][0], -c))
            best[v] = (w.get(v, 0) + best[nxt][0], nxt)
        else:
            best[v] = (w.get(v, 0), None)
    return best


def first_pc_1line(trees: Sequence[Tree], start: Tree) -> KTreeLine:
    """Optimal first principal 1-tree-line: the maximal path of largest weight."""
    sup = support_tree(trees)
    if not start <= sup:
        raise ValueError("starting tree is not inside the support tree")
    w = node_weights(trees)
    best = _best_paths(sup, w)
    firsts = sorted({c for v in start for c in (2 * v, 2 * v + 1) if c in sup and c not in start})
    if not firsts:
        return KTreeLine(start, (), 1)
    v = max(firsts, key=lambda c: (best[c][0], -c))
    path = []
    while v is not None:
        path.append(v)
        v = best[v][1]
    return KTreeLine(start, tuple(path), 1)


def next_pc_1line(trees: Sequence[Tree], start: Tree, fixed: Sequence[KTreeLine]) -> KTreeLine:
    """Next 1-tree-line minimising the union objective, by scanning every maximal path."""
    sup = support_tree(trees)
    best_line, best_obj = None, None
    for line in iter_lines(sup, start, 1, maximal_only=True):
        obj = line_objective(trees, list(fixed) + [line])
        if best_obj is None or obj < best_obj:
            best_line, best_obj = line, obj
    return best_line
