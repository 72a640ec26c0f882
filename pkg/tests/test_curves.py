from itertools import permutations

import numpy as np
import pytest
from hypothesis import assume, given, settings

from conftest import datasets
from treepca.bnb import bb_first_pc_2line
from treepca.curves import (
    HEURISTICS,
    InvalidCurve,
    TreeCurve,
    curve_objective,
    exhaustive_curve,
    heuristic_greedy,
    heuristic_switch,
    heuristic_wo,
    heuristic_wo_s,
    performance_from_objectives,
    performance_pct,
    project_onto_curve,
)
from treepca.lines import first_pc_1line, line_objective, scan_projection
from treepca.trees import random_tree, support_tree, weights

F = frozenset
ROOT = F({1})


def test_curve_validity():
    TreeCurve(ROOT, (3, 2, 6))
    with pytest.raises(InvalidCurve):
        TreeCurve(ROOT, (6, 3))
    with pytest.raises(InvalidCurve):
        TreeCurve(ROOT, (2, 2))


def test_projection_examples():
    c = TreeCurve(ROOT, (3, 2))
    assert project_onto_curve(F({1, 2}), c) == (0, ROOT, 1)
    assert project_onto_curve(F({1, 3}), c) == (1, F({1, 3}), 0)
    assert project_onto_curve(F({1, 2, 3}), c) == (2, F({1, 2, 3}), 0)


def test_objective_examples():
    assert curve_objective([ROOT], TreeCurve(ROOT)) == 0
    ts = [F({1, 2}), F({1, 3})]
    assert curve_objective(ts, TreeCurve(ROOT, (2, 3))) == 1
    assert curve_objective(ts, TreeCurve(ROOT, (3, 2))) == 1
    with pytest.raises(ValueError):
        curve_objective(ts, TreeCurve(ROOT, (2,)))


def test_weight_order_tie_rule():
    ts = [F({1, 2, 3, 4}), F({1, 2, 3}), F({1})]
    assert weights(ts) == {1: 3, 2: 2, 3: 2, 4: 1}
    assert heuristic_wo(ts).added == (2, 3, 4)
    assert heuristic_wo([ROOT]).added == ()


def test_greedy_traces_a_single_tree():
    rng = np.random.default_rng(3)
    for _ in range(20):
        t = random_tree(0.5, 8, rng)
        assert curve_objective([t], heuristic_greedy([t])) == 0
    assert heuristic_greedy([ROOT]).added == ()
    assert heuristic_wo_s([ROOT]).added == ()


def _naive_switch(ts, curve):
    def f(seq):
        return sum(scan_projection(t, curve.start, seq)[1] for t in ts)

    seq = list(curve.added)
    while True:
        cur = f(seq)
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                s = seq[:]
                s[i], s[j] = s[j], s[i]
                try:
                    TreeCurve(curve.start, tuple(s))
                except InvalidCurve:
                    continue
                if f(s) < cur:
                    seq = s
                    break
            else:
                continue
            break
        else:
            return TreeCurve(curve.start, tuple(seq))


@settings(max_examples=80, deadline=None)
@given(datasets(n_trees=(1, 5), max_depth=5, max_nodes=10))
def test_switch_matches_naive_scan(ts):
    sup = support_tree(ts)
    for start in (heuristic_wo(ts), TreeCurve(ROOT, tuple(sorted(sup - ROOT))), heuristic_greedy(ts)):
        out = heuristic_switch(ts, start)
        assert out == _naive_switch(ts, start)
        assert curve_objective(ts, out) <= curve_objective(ts, start)
        assert heuristic_switch(ts, out) == out


def _all_orderings(sup, start):
    free = sorted(sup - start)
    for perm in permutations(free):
        try:
            yield TreeCurve(start, perm)
        except InvalidCurve:
            pass


@settings(max_examples=60, deadline=None)
@given(datasets(n_trees=(1, 4), max_depth=4, max_nodes=7))
def test_exhaustive_matches_permutations(ts):
    sup = support_tree(ts)
    assume(len(sup) <= 8)
    scored = sorted((curve_objective(ts, c), c.added) for c in _all_orderings(sup, ROOT))
    best = exhaustive_curve(ts)
    assert (curve_objective(ts, best), best.added) == scored[0]
    for h in ("wo", "greedy", "switch", "wo_s"):
        assert curve_objective(ts, best) <= curve_objective(ts, HEURISTICS[h](ts))


def test_exhaustive_examples():
    ts = [F({1, 2}), F({1, 3})]
    best = exhaustive_curve(ts)
    assert best.added == (2, 3) and curve_objective(ts, best) == 1
    assert exhaustive_curve([F({1, 2})], F({1, 2})).added == ()
    with pytest.raises(ValueError, match="budget of 8"):
        exhaustive_curve([F(range(1, 16))])


def test_performance():
    ts = [F({1, 2}), F({1, 3})]
    c = heuristic_wo(ts)
    assert performance_pct(ts, c, c) == 100.0
    assert performance_from_objectives(10, 8) == 80.0
    assert performance_from_objectives(0, 0) == 100.0
    with pytest.raises(ValueError):
        performance_from_objectives(5, 6)


@settings(max_examples=40, deadline=None)
@given(datasets(n_trees=(1, 6), max_depth=5, max_nodes=12))
def test_curves_dominate_lines(ts):
    """A curve that starts by replaying a maximal line can only get closer to each tree."""
    sup = support_tree(ts)
    for line in (first_pc_1line(ts, ROOT), bb_first_pc_2line(ts).line):
        rest = sorted(sup - line.nodes)
        curve = TreeCurve.from_line(line, rest)
        assert curve_objective(ts, curve) <= line_objective(ts, line)


@settings(max_examples=40, deadline=None)
@given(datasets(n_trees=(1, 6), max_depth=6, max_nodes=20))
def test_heuristics_give_complete_valid_curves(ts):
    sup = support_tree(ts)
    for h in ("wo", "greedy", "switch", "wo_s"):
        c = HEURISTICS[h](ts)
        assert c.is_complete(sup)
        TreeCurve(c.start, c.added)
    assert curve_objective(ts, heuristic_wo_s(ts)) <= curve_objective(ts, heuristic_wo(ts))
