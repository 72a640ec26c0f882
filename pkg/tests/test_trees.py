import numpy as np
import pytest
from hypothesis import given

from conftest import datasets, trees
from treepca.trees import (
    MAX_LABEL,
    DepthLimitError,
    TreeDataset,
    children,
    descendant_correspondence,
    distance,
    estimate_branch_prob,
    full_tree,
    label_ops,
    level,
    parent,
    random_tree,
    subtree_sizes,
    support_tree,
    weights,
)
from treepca.validation import check_dataset, check_start, check_tree

F = frozenset


def test_label_ops_root():
    ops = label_ops(1)
    assert ops["level"] == 1 and ops["parent"] is None
    assert (ops["left_child"], ops["right_child"]) == (2, 3)
    with pytest.raises(ValueError):
        parent(1)


def test_label_ops_five():
    assert label_ops(5) == {"parent": 2, "left_child": 10, "right_child": 11, "level": 3}


def test_children_depth_limit():
    with pytest.raises(DepthLimitError):
        children(2**52)
    assert children(2**51) == (2**52, 2**52 + 1)
    assert level(MAX_LABEL) == 53


@given(trees(max_depth=8))
def test_parent_of_children(t):
    for v in t:
        a, b = children(v)
        assert parent(a) == parent(b) == v
        assert level(a) == level(v) + 1


@pytest.mark.parametrize("a,b,d", [({1}, {1}, 0), ({1, 2}, {1, 3}, 2), ({1, 2, 4}, {1, 2, 5, 3}, 3)])
def test_distance_examples(a, b, d):
    assert distance(F(a), F(b)) == d


@given(trees(), trees(), trees())
def test_metric_axioms(a, b, c):
    assert distance(a, a) == 0
    assert distance(a, b) == distance(b, a)
    assert distance(a, c) <= distance(a, b) + distance(b, c)


def test_support_examples():
    assert support_tree([F({1})]) == F({1})
    assert support_tree([F({1, 2}), F({1, 3})]) == F({1, 2, 3})
    assert support_tree([F({1, 2, 4}), F({1, 2, 5}), F({1, 3})]) == F({1, 2, 3, 4, 5})


def test_weights_examples():
    assert weights([F({1})]) == {1: 1}
    assert weights([F({1, 2}), F({1, 2, 4}), F({1, 3})]) == {1: 3, 2: 2, 4: 1, 3: 1}


@given(datasets())
def test_weight_properties(ts):
    w = weights(ts)
    sup = support_tree(ts)
    assert sum(w.values()) == sum(len(t) for t in ts)
    assert w[1] == len(ts)
    assert all(t <= sup for t in ts)
    for v in sup:
        if v != 1:
            assert w[v] <= w[v // 2]
        assert 0 < w[v] <= len(ts)
    check_tree(sup)


@pytest.mark.parametrize("t,out", [({1}, {1}), ({1, 3, 6, 7}, {1, 2, 4, 5}), ({1, 2, 3}, {1, 2, 3})])
def test_correspondence_examples(t, out):
    assert descendant_correspondence(F(t)) == F(out)


def test_correspondence_keeps_orientation_on_ties():
    # node 2 has only a right subtree and flips; the equal subtrees under 3 and 5 stay put
    t = F({1, 2, 3, 5, 10, 11, 6, 7})
    sizes = subtree_sizes(t)
    assert sizes[2] == 4 and sizes[3] == 3
    out = descendant_correspondence(t)
    assert out == F({1, 2, 3, 4, 8, 9, 6, 7})


@given(trees(max_depth=7, max_nodes=30))
def test_correspondence_properties(t):
    out = descendant_correspondence(t)
    assert len(out) == len(t)
    check_tree(out)
    sizes = subtree_sizes(out)
    for v in out:
        assert sizes.get(2 * v, 0) >= sizes.get(2 * v + 1, 0)
    assert descendant_correspondence(out) == out


def test_random_tree_p_zero():
    for seed in range(20):
        assert random_tree(0.0, 53, seed) == F({1})


def test_random_tree_deterministic():
    a = random_tree(0.4953, 53, np.random.default_rng(7))
    b = random_tree(0.4953, 53, np.random.default_rng(7))
    assert a == b
    check_tree(a)


def test_random_tree_depth_cap(rng):
    for _ in range(10_000):
        t = random_tree(0.6, 6, rng)
        assert max(t).bit_length() <= 6


def test_random_tree_full_frequency():
    """Fraction of full 3-level trees matches p^3 within three standard errors."""
    p, n = 0.9999, 100_000
    full = full_tree(3)
    hits = sum(random_tree(p, 3, seed) == full for seed in range(n))
    q = p**3
    assert abs(hits / n - q) <= 3 * np.sqrt(q * (1 - q) / n)


@pytest.mark.parametrize("p,depth", [(-0.1, 5), (1.0, 5), (0.5, 0), (0.5, 54)])
def test_random_tree_rejects(p, depth):
    with pytest.raises(ValueError):
        random_tree(p, depth, 0)


def test_estimate_branch_prob():
    assert estimate_branch_prob(F({1})) == 0
    assert estimate_branch_prob(full_tree(3) | F({8, 9, 10})) == pytest.approx(0.45)
    for n in (1, 2, 10, 10**6):
        assert estimate_branch_prob(F(range(1, n + 1))) < 0.5


def test_check_tree_errors():
    with pytest.raises(ValueError, match="parent 2"):
        check_tree([1, 4])
    with pytest.raises(ValueError, match="root"):
        check_tree([2, 3])
    with pytest.raises(ValueError, match="53 levels"):
        check_tree([1, MAX_LABEL + 1])
    with pytest.raises(ValueError, match="not an integer"):
        check_tree([1, 2.5])
    with pytest.raises(ValueError, match="tree 3"):
        check_tree([1, 0], index=3)


def test_check_dataset():
    ds = check_dataset([[1], [1, 2, 3]], covariate=[1, 2], name="toy")
    assert isinstance(ds, TreeDataset) and len(ds) == 2 and ds.total_nodes == 4
    with pytest.raises(ValueError, match="covariate"):
        check_dataset([[1], [1, 2, 3]], covariate=[1])
    with pytest.raises(ValueError):
        check_dataset([])
    with pytest.raises(ValueError, match="single tree"):
        check_dataset(F({1, 2}))
    with pytest.raises(ValueError, match="starting tree"):
        check_dataset([[1, 2]], start=[1, 3])
    assert check_start(None, F({1, 2})) == F({1})
