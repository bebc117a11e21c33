from fractions import Fraction as F

import pytest

from conftest import make_tripod
from tropicert.certify import canonical_certificate
from tropicert.degeneration_model import (
    Anchor, BadDegree, BadFreeSet, EdgeRole, NotProjectiveDegree, ScenarioError, assign_anchors,
    check_labeled, classify_edges, make_scenario, projective_degree, projective_directions,
    role_counts, validate_prelog,
)
from tropicert.graph_core import Graph
from tropicert.tropical_curve import TropicalCurve


def test_projective_directions():
    assert projective_directions(3) == [(-1, 0), (0, -1), (1, 1)]
    assert projective_directions(4) == [(-1, 0, 0), (0, -1, 0), (0, 0, -1), (1, 1, 1)]
    for n in range(3, 12):
        dirs = projective_directions(n)
        assert len(dirs) == n
        assert [sum(c) for c in zip(*dirs)] == [0] * (n - 1)


def test_scenarios():
    assert make_scenario(4, 4).free_dirs == ((-1, 0, 0),)
    s = make_scenario(5, 3)
    assert len(s.free_dirs) == 3 and len(s.nonfree_dirs) == 2
    with pytest.raises(BadDegree):
        make_scenario(4, 5)
    with pytest.raises(BadDegree):
        make_scenario(2, 2)


def test_explicit_free_set():
    s = make_scenario(3, 3, [(1, 1)])
    assert s.free_dirs == ((1, 1),)
    with pytest.raises(BadFreeSet):
        make_scenario(3, 3, [(1, 0)])
    with pytest.raises(BadFreeSet):
        make_scenario(3, 2, [(1, 1)])


def test_classify_conic(conic):
    assert role_counts(conic) == {"node": 3, "free": 2, "nonfree": 4}
    assert all(conic.roles[e.id] is EdgeRole.NODE for e in conic.graph.bounded_edges())


def test_classify_tripod_as_line():
    lc = classify_edges(make_tripod(), make_scenario(3, 2))
    assert role_counts(lc) == {"node": 0, "free": 2, "nonfree": 1}


def test_projective_degree(conic):
    assert projective_degree(conic.curve, 3) == 2
    assert projective_degree(make_tripod(), 3) == 1
    with pytest.raises(NotProjectiveDegree):
        projective_degree(make_tripod(((1, 0), (0, 1), (-1, -1))), 3)


def test_from_curve_anchors(conic):
    a = conic.anchors
    assert sorted(a) == conic.edges_with(EdgeRole.NONFREE)
    # the (0, -1) leaf at V1 = (0, 0) and the one at V2 = (1, 1)
    first, second = (a[e] for e in sorted(a) if conic.curve.leaf_directions[e] == (0, -1))
    assert first.contains((0, 5)) and not first.contains((1, 0))
    assert second.contains((1, F(-7, 3))) and not second.contains((0, 1))
    for e, anchor in a.items():
        v = conic.graph.edges[e].ends[0]
        assert anchor.contains(conic.curve.positions[v])


def test_random_anchors_deterministic(conic):
    a = assign_anchors(conic, "random", seed=7)
    b = assign_anchors(conic, "random", seed=7)
    c = assign_anchors(conic, "random", seed=8)
    assert a.anchors == b.anchors
    assert a.anchors != c.anchors


def test_line_anchors_agree_in_the_plane(conic):
    lines = assign_anchors(conic, kind="line")
    for e, anchor in lines.anchors.items():
        assert anchor.codimension == 1
        h = conic.anchors[e]
        assert set(anchor.normals) <= {h.normals[0], tuple(-x for x in h.normals[0])}


def test_line_anchors_in_higher_dimension():
    lc = canonical_certificate(4).curve
    lines = assign_anchors(lc, kind="line")
    assert all(a.codimension == 2 for a in lines.anchors.values())
    assert all(a.codimension == 1 for a in lc.anchors.values())


def test_anchor_normals_must_annihilate():
    with pytest.raises(ScenarioError):
        Anchor(0, (0, 0), (0, -1), ((0, 1),))


def test_prelog(conic):
    assert validate_prelog(conic)
    # two (-1, 0) leaves at V0 force a weight-2 node
    g = Graph.build(2, bounded=[(0, 1)], leaves=[0, 0, 1, 1, 1, 1], weights=[2, 1, 1, 1, 1, 1, 1])
    curve = TropicalCurve(g, 2, ((0, 0), (1, 0)),
                          {1: (-1, 0), 2: (-1, 0), 3: (0, -1), 4: (0, -1), 5: (1, 1), 6: (1, 1)})
    lc = classify_edges(curve, make_scenario(3, 3))
    assert lc.roles[0] is EdgeRole.NODE and validate_prelog(lc)


def test_check_labeled(conic):
    check_labeled(conic)
    bad = dict(conic.roles)
    e = conic.edges_with(EdgeRole.FREE)[0]
    bad[e] = EdgeRole.NONFREE
    with pytest.raises(ScenarioError):
        check_labeled(type(conic)(conic.curve, conic.scenario, bad, conic.anchors))
