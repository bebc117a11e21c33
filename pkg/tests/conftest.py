from __future__ import annotations

from pathlib import Path

import pytest

from tropicert.certify import caterpillar_curve
from tropicert.degeneration_model import make_scenario
from tropicert.graph_core import Graph
from tropicert.tropical_curve import TropicalCurve

FIXTURES = Path(__file__).parent / "fixtures"

# the conic with leaves (-1,0),(0,-1) | (0,-1) | (1,1) | (-1,0),(1,1) along a 4-vertex spine
CONIC_ASSIGNMENT = [[(-1, 0), (0, -1)], [(0, -1)], [(1, 1)], [(-1, 0), (1, 1)]]


def make_conic():
    return caterpillar_curve(CONIC_ASSIGNMENT, make_scenario(3, 3))


def make_tripod(dirs=((-1, 0), (0, -1), (1, 1)), weights=None) -> TropicalCurve:
    g = Graph.build(1, leaves=[0, 0, 0], weights=weights)
    return TropicalCurve(g, 2, ((0, 0),), dict(enumerate(dirs)))


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture
def conic():
    return make_conic()


@pytest.fixture
def tripod():
    return make_tripod()


def random_tree_edges(rng, n_leaves: int) -> list[tuple[int, int]]:
    """A uniform-ish trivalent tree by random leaf insertion; leaves are 0..n_leaves-1."""
    e = n_leaves
    edges = [(0, e), (1, e), (2, e)]
    for i in range(3, n_leaves):
        k = e + i - 2
        x, y = edges.pop(rng.randrange(len(edges)))
        edges += [(x, k), (k, y), (i, k)]
    return edges


def random_role_tree(rng, n_leaves: int):
    from tropicert.certify import _tree_graph
    from tropicert.degeneration_model import EdgeRole
    from tropicert.obstruction import RoleTree

    labels = [(0,)] * n_leaves
    g, _ = _tree_graph(random_tree_edges(rng, n_leaves), n_leaves, labels)
    roles = {e.id: EdgeRole.NODE if not e.is_leaf else rng.choice([EdgeRole.FREE, EdgeRole.NONFREE])
             for e in g.edges}
    return RoleTree(g, roles)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
