import numpy as np
import pytest
from hypothesis import strategies as st

from treepca.trees import descendant_correspondence, random_tree


@st.composite
def trees(draw, max_depth=4, max_nodes=12):
    """Parent-closed label sets grown from the root by random child picks."""
    nodes = {1}
    frontier = [2, 3]
    n_extra = draw(st.integers(0, max_nodes - 1))
    for _ in range(n_extra):
        open_ = sorted(v for v in frontier if v not in nodes and v.bit_length() <= max_depth)
        if not open_:
            break
        v = draw(st.sampled_from(open_))
        nodes.add(v)
        frontier.extend((2 * v, 2 * v + 1))
    return frozenset(nodes)


def datasets(n_trees=(1, 5), **kw):
    return st.lists(trees(**kw), min_size=n_trees[0], max_size=n_trees[1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def set2_like(rng, n_trees=10, p=0.4953, max_support=40):
    """Draw descendant-corresponded datasets until the support fits ``max_support``."""
    while True:
        ts = [descendant_correspondence(random_tree(p, 53, rng)) for _ in range(n_trees)]
        if len(frozenset().union(*ts)) <= max_support:
            return ts


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS  # noqa: imported lazily, only filled when that module ran

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
