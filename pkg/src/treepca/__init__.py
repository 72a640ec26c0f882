"""Principal component analysis for samples of binary trees.

Trees are sets of heap-style integer labels (root 1, children 2v and 2v + 1).
The package finds principal 1- and 2-tree-lines exactly and principal
tree-curves heuristically, and scores data trees by their projections.
"""

__version__ = "0.1.0"

from .trees import (
    MAX_DEPTH,
    MAX_LABEL,
    DepthLimitError,
    TreeDataset,
    children,
    descendant_correspondence,
    distance,
    estimate_branch_prob,
    label_ops,
    level,
    parent,
    random_tree,
    support_tree,
    weights,
)
from .lines import (
    InvalidExtension,
    KTreeLine,
    count_2lines,
    enumerate_2lines,
    first_pc_1line,
    line_objective,
    max_line_length,
    next_pc_1line,
    project_onto_line,
    project_onto_union,
)
from .bnb import (
    TwoPath,
    bb_first_pc_2line,
    brute_force_2line,
    max_two_path,
    next_pc_2line,
    two_path_to_maximal_line,
)
from .curves import (
    TreeCurve,
    curve_objective,
    exhaustive_curve,
    heuristic_greedy,
    heuristic_switch,
    heuristic_wo,
    heuristic_wo_s,
    performance_pct,
    project_onto_curve,
)
from .analysis import benchmark, regress_age, score_report, simulate_sets
from .estimators import TreeCurvePCA, TreeLinePCA
from .io import dlview, ingest
