"""Exact principal 2-tree-lines: maximum 2-paths, Branch & Bound and brute force.

Lower bounds come from the heaviest structure with at most two nodes per
level (three when the line does not start from the root) that any maximal
extension of a partial line can still reach.  Upper
bounds come from completing the partial line into a maximal line that follows
that structure, and evaluating it exactly.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .lines import KTreeLine, iter_lines, line_objective, project_onto_line, scan_projection
from .trees import Tree, children_map, support_tree, weights as node_weights

ROOT = frozenset({1})


@dataclass(frozen=True)
class TwoPath:
    nodes: Tree
    weight: int


class _PathBounds:
    """Dynamic programs over structures with at most ``cap`` chosen nodes per level."""

    def __init__(self, sup: Tree, w: dict[int, int], cap: int = 2):
        self.sup = sup
        self.w = w
        self.cap = cap
        self.kids = children_map(sup)
        self._below: dict[frozenset, tuple[int, tuple]] = {}

    def _weight(self, nodes) -> int:
        w = self.w
        return sum(w.get(v, 0) for v in nodes)

    def below(self, frontier: frozenset) -> int:
        """Best weight strictly below ``frontier`` (all of one level)."""
        hit = self._below.get(frontier)
        if hit is not None:
            return hit[0]
        cands = sorted(c for v in frontier for c in self.kids[v])
        if not cands:
            self._below[frontier] = (0, ())
            return 0
        best, arg = -1, ()
        # supersets never lose weight, so only maximum-size choices matter
        for choice in combinations(cands, min(self.cap, len(cands))):
            val = self._weight(choice) + self.below(frozenset(choice))
            if val > best:
                best, arg = val, choice
        self._below[frontier] = (best, arg)
        return best

    def below_nodes(self, frontier: frozenset) -> list[int]:
        out = []
        self.below(frontier)
        while True:
            choice = self._below[frontier][1]
            if not choice:
                return out
            out.extend(choice)
            frontier = frozenset(choice)

    def anchored(self, anchors: dict[int, set], forced: dict[int, set], blocked) -> tuple[int, list[int]] | None:
        """Heaviest choice of extra nodes hanging off ``anchors``.

        Level by level, chosen nodes must be children of the chosen or anchor
        nodes one level up, must include every ``forced`` node of that level,
        and number at most ``cap``.  Anchor weights are not counted.  Returns
        ``None`` when the forced nodes cannot be accommodated.
        """
        top = min(anchors)
        last = max(list(anchors) + list(forced))
        memo: dict = {}

        def solve(h: int, chosen: frozenset):
            key = (h, chosen)
            if key in memo:
                return memo[key]
            frontier = chosen | anchors.get(h, frozenset())
            if h >= last:
                res = (self.below(frozenset(frontier)), None)
                memo[key] = res
                return res
            must = forced.get(h + 1, frozenset())
            cands = sorted(c for v in frontier for c in self.kids[v] if c not in blocked)
            res = None
            if len(must) <= self.cap and must.issubset(cands):
                free = [c for c in cands if c not in must]
                room = min(self.cap - len(must), len(free))
                for extra in combinations(free, room):
                    nxt = frozenset(must).union(extra)
                    sub = solve(h + 1, nxt)
                    if sub is None:
                        continue
                    val = self._weight(nxt) + sub[0]
                    if res is None or val > res[0]:
                        res = (val, nxt)
            memo[key] = res
            return res

        res = solve(top, frozenset())
        if res is None:
            return None
        nodes: list[int] = []
        h, chosen = top, frozenset()
        while h < last:
            chosen = memo[(h, chosen)][1]
            nodes.extend(sorted(chosen))
            h += 1
        nodes.extend(self.below_nodes(frozenset(chosen | anchors.get(last, frozenset()))))
        return res[0], nodes


def _by_level(nodes) -> dict[int, frozenset]:
    out: dict[int, set] = {}
    for v in nodes:
        out.setdefault(v.bit_length(), set()).add(v)
    return {h: frozenset(s) for h, s in out.items()}


def _mp(bounds: _PathBounds, line: KTreeLine) -> TwoPath | None:
    res = bounds.anchored(_by_level(line.start), _by_level(line.added), line.start)
    if res is None:
        return None
    value, extra = res
    return TwoPath(line.start.union(extra), bounds._weight(line.start) + value)


def max_two_path(sup: Tree, w: dict[int, int], line: KTreeLine) -> TwoPath:
    """Heaviest 2-path inside ``sup`` containing the start and every added node of ``line``.

    Nodes of the starting tree are held fixed; at most two further nodes are
    allowed per level.
    """
    path = _mp(_PathBounds(sup, w), line)
    if path is None:
        raise ValueError("the line's added nodes do not fit in a 2-path")
    return path


def _reachable(u: int, nodes, window) -> bool:
    """Whether ``u`` hangs below a window node through nodes not yet on the line."""
    v = u // 2
    while v not in nodes:
        v //= 2
    return window is None or v in window


def two_path_to_maximal_line(path, sup: Tree, start: Tree, w: dict[int, int] | None = None,
                             prefix: KTreeLine | None = None, trees: Sequence[Tree] | None = None,
                             budget: int = 4000) -> KTreeLine:
    """Extend ``prefix`` (or the bare start) into a maximal 2-tree-line that follows ``path``.

    Nodes of ``path`` are taken first, in an order that keeps every remaining
    node of ``path`` reachable; a short backtracking search finds such an
    order when one exists.  Among admissible choices, the node that moves the
    most trees still at their nearest point closer wins (when ``trees`` is
    given), then heavier nodes.  Afterwards the line grows by weight until it
    is maximal.
    """
    target = path.nodes if isinstance(path, TwoPath) else frozenset(path)
    w = w or {}
    line = prefix if prefix is not None else KTreeLine(start, (), 2)
    trees = list(trees) if trees is not None else []
    nodes = set(line.nodes)
    added = list(line.added)
    cur = [len(t ^ line.start) for t in trees]
    low = list(cur)
    for v in added:
        for i, t in enumerate(trees):
            cur[i] += -1 if v in t else 1
            low[i] = min(low[i], cur[i])
    todo = set(target) - nodes
    steps = [0]

    def window():
        return None if len(added) < 2 else set(added[-2:])

    def cands():
        act = nodes if len(added) < 2 else added[-2:]
        return {c for v in act for c in (2 * v, 2 * v + 1) if c in sup and c not in nodes}

    def push(c):
        nodes.add(c)
        added.append(c)
        todo.discard(c)

    def pop(c):
        nodes.discard(c)
        added.pop()
        if c in target:
            todo.add(c)

    def cover() -> bool:
        if not todo:
            return True
        steps[0] += 1
        if steps[0] > budget:
            return False
        live = [t for i, t in enumerate(trees) if cur[i] == low[i]]
        pool = sorted((c for c in cands() if c in todo),
                      key=lambda c: (-sum(1 for t in live if c in t), -w.get(c, 0), c))
        for c in pool:
            push(c)
            win = window()
            if all(_reachable(u, nodes, win) for u in todo):
                saved = (list(cur), list(low))
                for i, t in enumerate(trees):
                    cur[i] += -1 if c in t else 1
                    low[i] = min(low[i], cur[i])
                if cover():
                    return True
                cur[:], low[:] = saved
            pop(c)
        return False

    if not cover():
        # no order reaches the whole target: take its nodes greedily instead
        while True:
            pool = [c for c in cands() if c in todo]
            if not pool:
                break
            push(min(pool, key=lambda c: (c.bit_length(), -w.get(c, 0), c)))
    while True:
        pool = cands()
        if not pool:
            break
        push(min(pool, key=lambda c: (-w.get(c, 0), c)))
    return KTreeLine(line.start, tuple(added), 2)


@dataclass
class Partial:
    line: KTreeLine
    lower: int
    upper: int | None
    witness: KTreeLine | None
    maximal: bool
    scan: tuple | None = None


@dataclass
class IterationStats:
    created: int
    surviving: int
    active: int
    lower: int
    upper: int


@dataclass
class BnbState:
    active: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    incumbent: int | None = None
    incumbent_line: KTreeLine | None = None
    pruned: list | None = None

    def summary(self) -> list[tuple[int, int]]:
        """Per-iteration (partials created, partials surviving)."""
        return [(s.created, s.surviving) for s in self.trace]


@dataclass
class BnbResult:
    lines: list
    objective: int
    state: BnbState
    status: str = "optimal"
    lower_bound: int = 0
    elapsed: float = 0.0

    @property
    def line(self) -> KTreeLine:
        return self.lines[0]

    @property
    def completed(self) -> bool:
        return self.status == "optimal"

    @property
    def gap(self) -> tuple[int, int]:
        return self.lower_bound, self.objective


class _Search:
    def __init__(self, trees, start, sup, w, base, objective: Callable[[KTreeLine], int],
                 per_tree: bool = False):
        self.sup = sup
        self.start = start
        self.w = w
        self.base = base
        self.objective = objective
        self.bounds = _PathBounds(sup, w)
        # Lines grown from the root are 2-paths.  From any other start the
        # first two additions are free, and the window can then straddle
        # levels, which lets a line put a third node on one level.
        self.window_cap = 2 if start == ROOT else 3
        self.window_bounds = self.bounds if start == ROOT else _PathBounds(sup, w, cap=3)
        self.total = sum(w.get(v, 0) for v in sup)
        self.all_trees = list(trees)
        self.trees = self.all_trees if per_tree else None
        if per_tree:
            self.tree_bounds = [_PathBounds(t, dict.fromkeys(t, 1), self.window_cap) for t in self.trees]
            self._gain: dict = {}

    def scan_state(self, line: KTreeLine, parent: Partial | None = None) -> tuple:
        """Per tree, (distance to the line's last tree, smallest distance so far)."""
        if parent is not None and parent.scan is not None and parent.line.added == line.added[:-1]:
            v = line.added[-1]
            out = []
            for t, (d, low) in zip(self.trees, parent.scan):
                d += -1 if v in t else 1
                out.append((d, min(low, d)))
            return tuple(out)
        out = []
        for t in self.trees:
            d = len(t ^ line.start)
            low = d
            for v in line.added:
                d += -1 if v in t else 1
                if d < low:
                    low = d
            out.append((d, low))
        return tuple(out)

    def tree_wise_bound(self, line: KTreeLine, scan: tuple | None = None) -> int:
        """Sum over trees of the best distance any extension can still reach.

        Each tree either keeps its nearest prefix so far, or projects onto a
        later tree, which carries every current node plus at most what a
        structure below the active nodes can pick up from it (two nodes per
        level from the root, three from other starts).
        """
        scan = scan if scan is not None else self.scan_state(line)
        total = 0
        window = line.added[-2:] if len(line.added) >= 2 else None
        nodes = line.nodes
        n_nodes = len(nodes)
        for i, (t, (d, low)) in enumerate(zip(self.trees, scan)):
            # d = |t| + |nodes| - 2 |t & nodes|, so this is what t still has to offer
            rest = (len(t) - n_nodes + d) // 2
            if window is None or d - rest >= low:
                gain = rest
            else:
                inside = frozenset(v for v in window if v in t)
                if not inside:
                    gain = 0
                else:
                    key = (i, inside, nodes & t)
                    gain = self._gain.get(key)
                    if gain is None:
                        gain = self.tree_bounds[i].anchored(_by_level(inside), {}, nodes)[0]
                        self._gain[key] = gain
            total += min(low, d - gain)
        return total

    def bound(self, line: KTreeLine) -> tuple[int, frozenset]:
        """Upper bound on the weight any maximal extension of ``line`` can collect."""
        best, target = None, frozenset()
        if line.start == ROOT:
            # every 2-tree-line grown from the root is itself a 2-path
            mp = _mp(self.bounds, line)
            best, target = mp.weight, mp.nodes
        if len(line.added) >= 2:
            window = line.added[-2:]
            res = self.window_bounds.anchored(_by_level(window), {}, line.nodes)
            cur = self.bounds._weight(line.nodes)
            if best is None or cur + res[0] < best:
                best, target = cur + res[0], frozenset(res[1])
        if best is None:
            best = self.total
        return best, target

    def evaluate(self, line: KTreeLine, incumbent: int | None = None, parent: Partial | None = None) -> Partial:
        """Bounds for ``line``.

        The witness extends ``line``, so its objective is at least the lower
        bound; when that already reaches ``incumbent`` the witness cannot
        improve anything and is skipped (``upper`` is then None).  Any lower
        bound returned is valid, though a skipped one may be looser.
        """
        if line.is_maximal(self.sup):
            obj = self.objective(line)
            return Partial(line, obj, obj, line, True)
        scan = self.scan_state(line, parent) if self.trees is not None else None
        lower = self.tree_wise_bound(line, scan) if scan is not None else 0
        if incumbent is not None and lower >= incumbent:
            # the cheaper bound already settles it; skip the path programs too
            return Partial(line, lower, None, None, False, scan)
        weight, target = self.bound(line)
        lower = max(lower, self.base - weight)
        if incumbent is not None and lower >= incumbent:
            return Partial(line, lower, None, None, False, scan)
        witness = two_path_to_maximal_line(target, self.sup, self.start, self.w, prefix=line,
                                           trees=self.all_trees)
        return Partial(line, lower, self.objective(witness), witness, False, scan)


def _branch_and_bound(search: _Search, time_limit: float | None, keep_pruned: bool) -> BnbResult:
    t0 = time.perf_counter()
    deadline = None if time_limit is None else t0 + time_limit
    state = BnbState(pruned=[] if keep_pruned else None)
    root = search.evaluate(KTreeLine(search.start, (), 2))
    state.incumbent, state.incumbent_line = root.upper, root.witness
    live = [root]
    state.trace.append(IterationStats(1, 1, 1, root.lower, root.upper))
    status = "optimal"
    lower = root.lower
    while any(not p.maximal for p in live):
        lower = min(p.lower for p in live)
        if deadline is not None and time.perf_counter() > deadline:
            status = "timeout"
            break
        created = []
        timed_out = False
        for p in live:
            if p.maximal:
                continue
            for c in p.line.candidates(search.sup):
                q = search.evaluate(KTreeLine(p.line.start, p.line.added + (c,), 2), state.incumbent, p)
                created.append(q)
                if q.upper is not None and q.upper < state.incumbent:
                    state.incumbent, state.incumbent_line = q.upper, q.witness
            if deadline is not None and time.perf_counter() > deadline:
                timed_out = True
                break
        if timed_out:
            status = "timeout"
            break
        inc = state.incumbent
        survivors = [q for q in created if q.lower <= inc]
        if keep_pruned:
            state.pruned.extend(q.line for q in created if q.lower > inc)
            state.pruned.extend(p.line for p in live if p.maximal and p.lower > inc)
        live = [p for p in live if p.maximal and p.lower <= inc] + survivors
        lower = min(p.lower for p in live)
        state.trace.append(IterationStats(len(created), len(survivors), len(live), lower, inc))
    state.active = live
    if status == "optimal":
        lines = sorted((p.line for p in live if p.upper == state.incumbent), key=lambda l: l.added)
        lower = state.incumbent
    else:
        lines = [state.incumbent_line]
    return BnbResult(lines, state.incumbent, state, status, lower, time.perf_counter() - t0)


def bb_first_pc_2line(trees: Sequence[Tree], start: Tree = ROOT, time_limit: float | None = None,
                      keep_pruned: bool = False) -> BnbResult:
    """Optimal first principal 2-tree-lines by Branch & Bound.

    Returns every co-optimal maximal line (sorted by added sequence) when the
    search completes; on timeout, the incumbent line and the optimality gap.
    """
    trees = list(trees)
    sup = support_tree(trees)
    if not start <= sup:
        raise ValueError("starting tree is not inside the support tree")
    w = node_weights(trees)
    base = sum(len(t) for t in trees)

    def objective(line):
        return sum(scan_projection(t, line.start, line.added)[1] for t in trees)

    search = _Search(trees, start, sup, w, base, objective, per_tree=True)
    return _branch_and_bound(search, time_limit, keep_pruned)


def _fixed_projections(trees, fixed) -> list[Tree]:
    return [frozenset().union(*(project_onto_line(t, line)[1] for line in fixed)) for t in trees]


def next_pc_2line(trees: Sequence[Tree], start: Tree, fixed: Sequence[KTreeLine],
                  time_limit: float | None = None) -> BnbResult:
    """Next principal 2-tree-line given the components already found.

    The objective is the distance to the union of projections onto ``fixed``
    and the new line.  A node's bound weight only counts trees whose fixed
    projections do not already contain it.
    """
    trees = list(trees)
    sup = support_tree(trees)
    if any(line.start != start for line in fixed):
        raise ValueError("all lines must share the same starting tree")
    covered = _fixed_projections(trees, fixed)
    rw: dict[int, int] = {}
    for t, f in zip(trees, covered):
        for v in t - f:
            rw[v] = rw.get(v, 0) + 1
    base = sum(len(t) - len(t & f) for t, f in zip(trees, covered))

    def objective(line):
        total = 0
        for t, f in zip(trees, covered):
            i, _ = scan_projection(t, line.start, line.added)
            total += len(t ^ f.union(line.start, line.added[:i]))
        return total

    return _branch_and_bound(_Search(trees, start, sup, rw, base, objective), time_limit, False)


@dataclass
class BruteResult:
    lines: list
    objective: int | None
    n_lines: int
    status: str = "optimal"
    elapsed: float = 0.0

    @property
    def line(self) -> KTreeLine:
        return self.lines[0]

    @property
    def completed(self) -> bool:
        return self.status == "optimal"


def brute_force_2line(trees: Sequence[Tree], start: Tree = ROOT, time_limit: float | None = None) -> BruteResult:
    """Check every maximal 2-tree-line, keeping all optimal ones.

    Per-tree distances to the current prefix and their running minima are
    carried down the depth-first search, so each step costs one vector update.
    """
    trees = list(trees)
    sup = support_tree(trees)
    if not start <= sup:
        raise ValueError("starting tree is not inside the support tree")
    t0 = time.perf_counter()
    deadline = None if time_limit is None else t0 + time_limit
    delta = {v: np.array([-1 if v in t else 1 for t in trees], dtype=np.int64) for v in sup}
    kids = children_map(sup)
    nodes = set(start)
    added: list[int] = []
    best: list = [None, []]
    count = [0]

    class _Timeout(Exception):
        pass

    def rec(cur, low):
        act = nodes if len(added) < 2 else added[-2:]
        cands = sorted({c for v in act for c in kids[v] if c not in nodes})
        if not cands:
            count[0] += 1
            if deadline is not None and count[0] % 512 == 0 and time.perf_counter() > deadline:
                raise _Timeout
            obj = int(low.sum())
            if best[0] is None or obj < best[0]:
                best[0], best[1] = obj, [tuple(added)]
            elif obj == best[0]:
                best[1].append(tuple(added))
            return
        for c in cands:
            nxt = cur + delta[c]
            nodes.add(c)
            added.append(c)
            rec(nxt, np.minimum(low, nxt))
            added.pop()
            nodes.discard(c)

    d0 = np.array([len(t ^ start) for t in trees], dtype=np.int64)
    status = "optimal"
    try:
        rec(d0, d0.copy())
    except _Timeout:
        status = "timeout"
    lines = [KTreeLine(start, a, 2) for a in best[1]]
    return BruteResult(lines, best[0], count[0], status, time.perf_counter() - t0)


def brute_force_next_2line(trees: Sequence[Tree], start: Tree, fixed: Sequence[KTreeLine]) -> BruteResult:
    """Exhaustive oracle for the next principal 2-tree-line under the union objective."""
    trees = list(trees)
    sup = support_tree(trees)
    t0 = time.perf_counter()
    best, lines, n = None, [], 0
    for line in iter_lines(sup, start, 2, maximal_only=True):
        n += 1
        obj = line_objective(trees, list(fixed) + [line])
        if best is None or obj < best:
            best, lines = obj, [line]
        elif obj == best:
            lines.append(line)
    return BruteResult(lines, best, n, "optimal", time.perf_counter() - t0)
