"""Scores, coverage, regression of a covariate on projection sizes, simulation and benchmarking."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .bnb import bb_first_pc_2line, brute_force_2line
from .curves import TreeCurve, project_onto_curve
from .lines import KTreeLine, project_onto_line
from .trees import Tree, TreeDataset, as_sequence, descendant_correspondence, random_tree, support_tree


@dataclass(frozen=True)
class ScoreReport:
    per_tree_scores: tuple
    nodes_explained: int
    coverage_pct: float


def projections(trees: Sequence[Tree], component) -> list[Tree]:
    """Projection of every tree onto a line, a union of lines, or a curve."""
    trees = as_sequence(trees)
    if isinstance(component, TreeCurve):
        return [project_onto_curve(t, component)[1] for t in trees]
    lines = [component] if isinstance(component, KTreeLine) else list(component)
    if not lines:
        raise ValueError("need at least one line")
    return [frozenset().union(*(project_onto_line(t, line)[1] for line in lines)) for t in trees]


def score_report(trees: Sequence[Tree], component) -> ScoreReport:
    """Projection sizes and how many data nodes the projections recover.

    A node only counts as explained when it is in both the tree and its
    projection, so curve projections that carry foreign nodes are not
    over-credited.
    """
    trees = as_sequence(trees)
    projs = projections(trees, component)
    explained = sum(len(t & p) for t, p in zip(trees, projs))
    total = sum(len(t) for t in trees)
    return ScoreReport(tuple(len(p) for p in projs), explained, 100.0 * explained / total)


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    slope_se: float
    t_stat: float
    p_value: float
    n: int


def regress_age(scores, covariate) -> RegressionResult:
    """Least-squares fit of ``covariate`` on ``scores`` with a two-sided slope test.

    The test uses Student's t with n - 2 degrees of freedom.  An exact fit
    has zero standard error and gets p = 0 (or p = 1 if the slope is zero).
    """
    x = np.asarray(scores, dtype=float)
    y = np.asarray(covariate, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"scores and covariate differ in length ({x.size} vs {y.size})")
    n = x.size
    if n < 3:
        raise ValueError(f"regression needs at least 3 observations, got {n}")
    if np.all(x == x[0]):
        raise ValueError("all scores are equal, so the slope is not identifiable")
    fit = stats.linregress(x, y)
    slope, se = float(fit.slope), float(fit.stderr)
    if se > 0:
        t_stat = slope / se
        p = float(2 * stats.t.sf(abs(t_stat), n - 2))
    elif slope == 0:
        t_stat, p = 0.0, 1.0
    else:
        t_stat, p = math.copysign(math.inf, slope), 0.0
    return RegressionResult(slope, float(fit.intercept), se, t_stat, min(max(p, 0.0), 1.0), n)


def simulate_sets(count: int, trees_per_set: int, p: float, max_depth: int = 53,
                  correspondence: bool = False, seed=0) -> list[TreeDataset]:
    """Datasets of Galton-Watson trees drawn from one seeded stream.

    With ``correspondence`` every tree is relabelled heavier-side-left after
    it is drawn, so the same seed gives the same raw trees either way.
    """
    if count < 1 or trees_per_set < 1:
        raise ValueError("count and trees_per_set must be positive")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        trees = [random_tree(p, max_depth, rng) for _ in range(trees_per_set)]
        if correspondence:
            trees = [descendant_correspondence(t) for t in trees]
        out.append(TreeDataset(tuple(trees), None, f"set{i:03d}"))
    return out


@dataclass(frozen=True)
class BenchmarkRecord:
    dataset_id: str
    support_size: int
    method: str
    elapsed: float
    completed: bool
    objective: int | None
    trace: tuple | None = None


def _run_one(args) -> list[BenchmarkRecord]:
    name, trees, time_limit = args
    size = len(support_tree(trees))
    brute = brute_force_2line(trees, time_limit=time_limit)
    bb = bb_first_pc_2line(trees, time_limit=time_limit)
    if brute.completed and bb.completed and brute.objective != bb.objective:
        raise RuntimeError(
            f"{name}: branch and bound found {bb.objective}, brute force {brute.objective}"
        )
    recs = []
    for method, res, trace in (("brute", brute, None), ("bb", bb, tuple(bb.state.summary()))):
        # a cut-off run stops at the limit; any overshoot is only the check granularity
        elapsed = res.elapsed if res.completed else min(res.elapsed, time_limit)
        recs.append(BenchmarkRecord(name, size, method, elapsed, res.completed,
                                    res.objective if res.completed else None, trace))
    return recs


def benchmark(datasets: Sequence[TreeDataset], time_limit: float, n_jobs: int = 1) -> list[BenchmarkRecord]:
    """Run brute force and branch and bound on every dataset under a wall-clock limit.

    Records come back in dataset order, brute force first, whatever ``n_jobs`` is.
    """
    if time_limit <= 0:
        raise ValueError("time_limit must be positive")
    jobs = [(d.name or f"set{i:03d}", list(d.trees), time_limit) for i, d in enumerate(datasets)]
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            chunks = list(pool.map(_run_one, jobs))
    else:
        chunks = [_run_one(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]

