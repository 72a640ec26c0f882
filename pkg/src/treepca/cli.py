"""Command-line entry point: ``treepca <command> ...``.

CSV reports go to ``-o FILE`` (standard output by default) and a short
summary goes to standard error.  Exit status is 0 on success, 2 when a solver
hit its time limit and reported its best line so far, and 1 on errors.
"""
from __future__ import annotations

import argparse
import os
import statistics
import sys

from . import __version__
from .analysis import benchmark, projections, regress_age, score_report, simulate_sets
from .bnb import bb_first_pc_2line, brute_force_2line, brute_force_next_2line, next_pc_2line
from .curves import HEURISTICS, curve_objective, exhaustive_curve, performance_pct
from .io import csv_text, dlview_csv, dlview_svg, dumps_datasets, load_datasets
from .lines import first_pc_1line, line_objective, next_pc_1line
from .trees import support_tree

EXIT_OK, EXIT_ERROR, EXIT_TIMEOUT = 0, 1, 2
CURVE_HEURISTICS = ("wo", "greedy", "switch", "wo_s")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def default_seed() -> int:
    raw = os.environ.get("TREEPCA_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"TREEPCA_SEED must be an integer, got {raw!r}") from None


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _lines_2(trees, start, method, n, time_limit):
    """Principal 2-tree-lines one after another, with each run's status."""
    comps, statuses = [], []
    for c in range(n):
        if method == "bb":
            res = bb_first_pc_2line(trees, start, time_limit) if c == 0 else next_pc_2line(trees, start, comps, time_limit)
        else:
            res = brute_force_2line(trees, start, time_limit) if c == 0 else brute_force_next_2line(trees, start, comps)
        comps.append(res.line)
        statuses.append(res.status)
    return comps, statuses


def _lines_1(trees, start, n):
    comps = []
    for c in range(n):
        comps.append(first_pc_1line(trees, start) if c == 0 else next_pc_1line(trees, start, comps))
    return comps, ["optimal"] * n


def cmd_pca_line(args) -> int:
    return _pca(args, k=1)


def cmd_pca_2line(args) -> int:
    return _pca(args, k=2)


def _pca(args, k: int) -> int:
    rows, timed_out = [], False
    for ds in load_datasets(args.data):
        trees = list(ds.trees)
        if k == 1:
            comps, statuses = _lines_1(trees, ds.start, args.num_pcs)
        else:
            comps, statuses = _lines_2(trees, ds.start, args.method, args.num_pcs, args.time_limit)
        for c, status in enumerate(statuses):
            rep = score_report(trees, comps[: c + 1])
            obj = line_objective(trees, comps[: c + 1])
            rows.append([ds.name, c + 1, status, comps[c].added, obj, rep.nodes_explained, rep.coverage_pct])
            _say(f"{ds.name or 'dataset'}: PC{c + 1} objective {obj} ({status}), "
                 f"coverage {rep.coverage_pct:.2f}%")
            timed_out |= status == "timeout"
    header = ["dataset", "component", "status", "added", "objective", "nodes_explained", "coverage_pct"]
    _emit(csv_text(header, rows), args.output)
    return EXIT_TIMEOUT if timed_out else EXIT_OK


def cmd_pca_curve(args) -> int:
    names = list(CURVE_HEURISTICS) if args.heuristic == "all" else [args.heuristic]
    rows = []
    pct: dict[str, list] = {h: [] for h in names}
    for ds in load_datasets(args.data):
        trees = list(ds.trees)
        best = exhaustive_curve(trees, ds.start, args.node_budget) if args.performance else None
        for h in names:
            if h == "exhaustive":
                curve = best or exhaustive_curve(trees, ds.start, args.node_budget)
            else:
                curve = HEURISTICS[h](trees, ds.start)
            obj = curve_objective(trees, curve)
            rep = score_report(trees, curve)
            perf = performance_pct(trees, curve, best) if best is not None else None
            if perf is not None:
                pct[h].append(perf)
            rows.append([ds.name, h, obj, None if best is None else curve_objective(trees, best),
                         perf, rep.nodes_explained, rep.coverage_pct, curve.added])
    header = ["dataset", "heuristic", "objective", "optimum", "performance_pct",
              "nodes_explained", "coverage_pct", "added"]
    _emit(csv_text(header, rows), args.output)
    for h in names:
        if pct[h]:
            _say(f"{h}: mean performance {statistics.fmean(pct[h]):.2f}% over {len(pct[h])} datasets")
    return EXIT_OK


def cmd_simulate(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    sets = simulate_sets(args.sets, args.trees, args.p, args.depth, args.correspondence, seed)
    _emit(dumps_datasets(sets), args.output)
    sizes = [len(support_tree(d.trees)) for d in sets]
    _say(f"{len(sets)} datasets, seed {seed}, mean support size {statistics.fmean(sizes):.1f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    sets = load_datasets(args.data)
    recs = benchmark(sets, args.time_limit, args.jobs)
    rows = [[r.dataset_id, r.method, r.support_size, r.elapsed, r.completed, r.objective] for r in recs]
    header = ["dataset", "method", "support_size", "elapsed_s", "completed", "objective"]
    _emit(csv_text(header, rows), args.output)
    if args.trace:
        trace = [[r.dataset_id, i + 1, created, surviving]
                 for r in recs if r.trace for i, (created, surviving) in enumerate(r.trace)]
        _emit(csv_text(["dataset", "iteration", "created", "surviving"], trace), args.trace)
    for method in ("brute", "bb"):
        done = [r for r in recs if r.method == method and r.completed]
        _say(f"{method}: completed {len(done)} of {len(sets)}")
    return EXIT_OK


def cmd_dlview(args) -> int:
    ds = load_datasets(args.data)[args.dataset]
    if not 0 <= args.tree < len(ds.trees):
        raise ValueError(f"tree index {args.tree} is out of range for {len(ds.trees)} trees")
    t = ds.trees[args.tree]
    if args.format == "csv":
        _emit(dlview_csv(t), args.output)
        return EXIT_OK
    classes = {v: "start" for v in ds.start & t}
    status = "optimal"
    if args.pcs:
        comps, statuses = _lines_2(list(ds.trees), ds.start, "bb", args.pcs, args.time_limit)
        status = "timeout" if "timeout" in statuses else status
        for c, line in enumerate(comps):
            for v in projections([t], line)[0]:
                classes.setdefault(v, f"pc{c + 1}")
    _emit(dlview_svg(t, classes), args.output)
    return EXIT_TIMEOUT if status == "timeout" else EXIT_OK


def cmd_regress(args) -> int:
    ds = load_datasets(args.data)[args.dataset]
    if ds.covariate is None:
        raise ValueError(f"dataset {ds.name!r} has no covariate")
    trees = list(ds.trees)
    if args.curve:
        component, statuses = HEURISTICS[args.curve](trees, ds.start), ["optimal"]
    elif args.k == 1:
        component, statuses = _lines_1(trees, ds.start, args.num_pcs)
    else:
        component, statuses = _lines_2(trees, ds.start, args.method, args.num_pcs, args.time_limit)
    scores = [len(p) for p in projections(trees, component)]
    res = regress_age(scores, ds.covariate)
    _emit(csv_text(["tree_index", "score"], enumerate(scores)), args.output)
    summary = csv_text(["slope", "intercept", "slope_se", "t_stat", "p_value", "n"],
                       [[res.slope, res.intercept, res.slope_se, res.t_stat, res.p_value, res.n]])
    if args.summary:
        _emit(summary, args.summary)
    else:
        sys.stderr.write(summary)
    _say(f"slope {res.slope:.4f}, p-value {res.p_value:.4f}")
    return EXIT_TIMEOUT if "timeout" in statuses else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treepca", description="Principal tree-lines and tree-curves for binary tree data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_data(p):
        p.add_argument("data", help="JSON dataset file (one dataset or a list)")
        p.add_argument("-o", "--output", default=None, help="output file (default: standard output)")
        return p

    p = with_data(sub.add_parser("pca-line", help="principal 1-tree-lines"))
    p.add_argument("--num-pcs", type=int, default=1)
    p.set_defaults(func=cmd_pca_line)

    p = with_data(sub.add_parser("pca-2line", help="principal 2-tree-lines"))
    p.add_argument("--method", choices=("bb", "brute"), default="bb")
    p.add_argument("--time-limit", type=float, default=None, help="seconds per component")
    p.add_argument("--num-pcs", type=int, default=1)
    p.set_defaults(func=cmd_pca_2line)

    p = with_data(sub.add_parser("pca-curve", help="first principal tree-curve"))
    p.add_argument("--heuristic", choices=CURVE_HEURISTICS + ("exhaustive", "all"), default="wo_s")
    p.add_argument("--performance", action="store_true",
                   help="compare against the exhaustive optimum (small supports only)")
    p.add_argument("--node-budget", type=int, default=8)
    p.set_defaults(func=cmd_pca_curve)

    p = sub.add_parser("simulate", help="write random datasets as JSON")
    p.add_argument("--sets", type=int, default=100)
    p.add_argument("--trees", type=int, default=10)
    p.add_argument("--p", type=float, default=0.4953)
    p.add_argument("--depth", type=int, default=53)
    p.add_argument("--correspondence", action="store_true",
                   help="put the child with more descendants on the left")
    p.add_argument("--seed", type=int, default=None, help="default: $TREEPCA_SEED or 0")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_simulate)

    p = with_data(sub.add_parser("bench", help="brute force against branch and bound"))
    p.add_argument("--time-limit", type=float, default=10.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--trace", default=None, help="also write per-iteration partial counts here")
    p.set_defaults(func=cmd_bench)

    p = with_data(sub.add_parser("dlview", help="descendant-level view of one tree"))
    p.add_argument("--dataset", type=int, default=0, help="index within a dataset list")
    p.add_argument("--tree", type=int, default=0)
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.add_argument("--pcs", type=int, choices=(0, 1, 2), default=0,
                   help="colour nodes by projection onto this many principal 2-tree-lines (svg)")
    p.add_argument("--time-limit", type=float, default=None)
    p.set_defaults(func=cmd_dlview)

    p = with_data(sub.add_parser("regress", help="regress the covariate on projection sizes"))
    p.add_argument("--dataset", type=int, default=0)
    p.add_argument("--k", type=int, choices=(1, 2), default=2)
    p.add_argument("--num-pcs", type=int, default=1)
    p.add_argument("--method", choices=("bb", "brute"), default="bb")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--curve", choices=CURVE_HEURISTICS, default=None,
                   help="score with a tree-curve instead of tree-lines")
    p.add_argument("--summary", default=None, help="regression summary CSV (default: standard error)")
    p.set_defaults(func=cmd_regress)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "num_pcs", 1) < 1:
        parser.error("--num-pcs must be at least 1")
    try:
        return args.func(args)
    except (ValueError, OSError, IndexError) as exc:
        _say(f"treepca: error: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
