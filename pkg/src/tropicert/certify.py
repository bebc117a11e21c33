"""Sweeping certificates: search, verification and a small exhaustive census.

A sweeping certificate is a balanced, immersive, realizable, unobstructed
degree-2 tropical curve one of whose free-face vertices moves with the full
``n - 2`` degrees of freedom inside the free face.
"""
from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .degeneration_model import (
    EdgeRole, LabeledCurve, Scenario, assign_anchors, classify_edges, make_scenario,
    projective_directions,
)
from .errors import Infeasible, TropicertError
from .graph_core import Graph
from .moduli import BaseInfeasible, best_mobility, deformation_space
from .obstruction import (
    ObstructionError, ObstructionReport, VertexProfile, propagate_vanishing, section_space_dim,
)
from .rational_kernel import IntVec, primitive
from .tropical_curve import (
    Contracted, check_balancing, degree_map, infer_directions, is_immersive, realize,
)


class OracleMismatch(TropicertError, AssertionError):
    """Zero propagation claimed vanishing but explicit sections survive."""


class SearchExhausted(TropicertError):
    pass


@dataclass(frozen=True)
class CertificateReport:
    curve: LabeledCurve
    balanced: bool
    immersive: bool
    realizable: bool
    obstruction: ObstructionReport | None
    oracle_dim: int | None
    deformation_dim: int
    expected_deformation_dim: int
    mobility: int
    mobility_vertex: int | None
    profile_counts: dict[str, int]
    reason: str | None = None

    @property
    def is_certificate(self) -> bool:
        return self.reason is None

    @property
    def verdict(self) -> str:
        return "certificate" if self.reason is None else "not-certificate"


def profile_counts(lc: LabeledCurve) -> dict[str, int]:
    """How many vertices have each of the four conic-certificate profiles (``c1``..``c4``)."""
    cnt = Counter()
    for v in lc.graph.vertices:
        try:
            t = VertexProfile.at(lc, v).certificate_type()
        except ObstructionError:
            t = None
        cnt[f"c{t}" if t else "other"] += 1
    return {k: cnt.get(k, 0) for k in ("c1", "c2", "c3", "c4", "other")}


def verify_certificate(lc: LabeledCurve, n: int | None = None) -> CertificateReport:
    n = lc.scenario.n if n is None else n
    curve = lc.curve
    balanced = check_balancing(curve).balanced
    immersive = is_immersive(curve)
    try:
        realizable = degree_map(realize(curve.combinatorial_type())) == degree_map(curve)
    except Infeasible:
        realizable = False
    try:
        obstruction = propagate_vanishing(lc, n)
        oracle = section_space_dim(lc, n)
    except ObstructionError:
        obstruction, oracle = None, None
    if obstruction is not None and obstruction.vanishes and oracle != 0:
        raise OracleMismatch(f"propagation vanishes but {oracle} glued sections survive")
    if not lc.anchors:
        lc = assign_anchors(lc)
    reason = None
    try:
        ds = deformation_space(lc)
        mob, where = best_mobility(ds)
        ddim, dexp = ds.dimension, ds.expected_count
    except BaseInfeasible:
        mob, where, ddim, dexp = 0, None, 0, 0
        reason = "base curve violates its anchors"
    if not balanced:
        reason = "not balanced"
    elif not immersive:
        reason = "not immersive"
    elif not realizable:
        reason = "not realizable"
    elif obstruction is None:
        reason = "obstruction calculus needs a trivalent genus-0 curve"
    elif not obstruction.vanishes:
        reason = "obstruction inconclusive"
    elif reason is None and mob != n - 2:
        reason = f"free-vertex mobility {mob} < {n - 2}"
    return CertificateReport(lc, balanced, immersive, realizable, obstruction, oracle,
                             ddim, dexp, mob, where, profile_counts(lc), reason)


# --------------------------------------------------------------------------
# caterpillar search

def caterpillar_curve(assignment: Sequence[Sequence[IntVec]], scenario: Scenario) -> LabeledCurve:
    """Realize and label the caterpillar with the given leaf directions per spine vertex.

    Bounded edges come first (``i -> i + 1``), then leaves in vertex order.
    """
    k = len(assignment)
    leaves, dirs = [], []
    for v, ws in enumerate(assignment):
        for w in ws:
            leaves.append(v)
            dirs.append(tuple(w))
    g = Graph.build(k, bounded=[(i, i + 1) for i in range(k - 1)], leaves=leaves)
    leaf_dirs = {k - 1 + j: w for j, w in enumerate(dirs)}
    curve = realize(infer_directions(g, leaf_dirs))
    return assign_anchors(classify_edges(curve, scenario))


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _caterpillar_assignments(n: int) -> Iterator[list[list[IntVec]]]:
    """Leaf distributions in lexicographic order, pruned to non-contracted, locally immersive ones."""
    dirs = projective_directions(n)
    k = 2 * n - 2
    zero = (0,) * (n - 1)
    counts = [2] * n

    def distinct(*us):
        return len(set(us)) == len(us)

    def rec(t, s, chosen):
        if t == k - 1:
            rest = [i for i in range(n) for _ in range(counts[i])]
            i, j = rest
            if i == j:
                return
            if distinct(primitive(s)[0], dirs[i], dirs[j]):
                yield chosen + [[dirs[i], dirs[j]]]
            return
        back = primitive(s)[0]
        for i in range(n):
            if not counts[i]:
                continue
            s2 = _add(s, dirs[i])
            if s2 == zero:
                continue
            if not distinct(back, dirs[i], primitive(tuple(-x for x in s2))[0]):
                continue
            counts[i] -= 1
            yield from rec(t + 1, s2, chosen + [[dirs[i]]])
            counts[i] += 1

    for i in range(n):
        for j in range(i + 1, n):
            s = _add(dirs[i], dirs[j])
            if s == zero or not distinct(dirs[i], dirs[j], primitive(tuple(-x for x in s))[0]):
                continue
            counts[i] -= 1
            counts[j] -= 1
            yield from rec(1, s, [[dirs[i], dirs[j]]])
            counts[i] += 1
            counts[j] += 1


def _has_seed_end(assignment, scenario: Scenario) -> bool:
    free = set(scenario.free_dirs)
    for ws in (assignment[0], assignment[-1]):
        if sum(w in free for w in ws) == 1:
            return True
    return False


def canonical_certificate(n: int, d: int | None = None) -> CertificateReport:
    """The lexicographically first caterpillar sweeping certificate for P^n.

    The caterpillar has ``2n - 2`` spine vertices: two leaves on each end and
    one on each middle vertex, two leaves per projective direction.
    """
    scenario = make_scenario(n, n if d is None else d)
    for assignment in _caterpillar_assignments(n):
        if not _has_seed_end(assignment, scenario):
            continue
        try:
            lc = caterpillar_curve(assignment, scenario)
        except Infeasible:
            continue
        mob, _ = best_mobility(deformation_space(lc))
        if mob != n - 2:
            continue
        report = verify_certificate(lc)
        if report.is_certificate:
            return report
    raise SearchExhausted(f"no caterpillar certificate for n={n}")


# --------------------------------------------------------------------------
# census

def _labeled_trees(e: int) -> Iterator[list[tuple[int, int]]]:
    """All trivalent trees with leaves 0..e-1 (internal nodes e, e+1, ...), by leaf insertion."""
    if e < 3:
        raise ValueError("need at least three leaves")

    def rec(edges, i):
        if i == e:
            yield edges
            return
        z = e + i - 2
        for idx, (x, y) in enumerate(edges):
            new = edges[:idx] + [(x, z), (z, y)] + edges[idx + 1:] + [(i, z)]
            yield from rec(new, i + 1)

    yield from rec([(0, e), (1, e), (2, e)], 3)


def _tree_graph(edges: list[tuple[int, int]], e: int, labels: Sequence[IntVec]):
    internal = sorted({x for ed in edges for x in ed if x >= e})
    idx = {x: i for i, x in enumerate(internal)}
    bounded = sorted((min(idx[x], idx[y]), max(idx[x], idx[y]))
                     for x, y in edges if x >= e and y >= e)
    leaf_pairs = sorted((min(x, y), idx[max(x, y)]) for x, y in edges if min(x, y) < e)
    g = Graph.build(len(internal), bounded=bounded, leaves=[v for _, v in leaf_pairs])
    nb = len(bounded)
    leaf_dirs = {nb + j: tuple(labels[leaf]) for j, (leaf, _) in enumerate(leaf_pairs)}
    return g, leaf_dirs


def canonical_form(graph: Graph, leaf_dirs) -> str:
    """A string invariant under graph automorphisms, for trees with labeled leaves."""
    adj: dict[object, list[object]] = {v: [] for v in graph.vertices}
    label = {}
    for ed in graph.edges:
        if ed.is_leaf:
            node = ("leaf", ed.id)
            label[node] = ",".join(map(str, leaf_dirs[ed.id])) + (f"*{ed.weight}" if ed.weight > 1 else "")
            adj[node] = [ed.ends[0]]
            adj[ed.ends[0]].append(node)
        else:
            a, b = ed.ends
            adj[a].append(b)
            adj[b].append(a)
    deg = {v: len(a) for v, a in adj.items()}
    layer = [v for v, k in deg.items() if k <= 1]
    left = len(adj)
    removed = set()
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            removed.add(v)
            for w in adj[v]:
                if w not in removed:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        layer = nxt
    centers = [v for v in adj if v not in removed]

    def enc(v, parent):
        if v in label:
            return "L" + label[v]
        return "(" + "".join(sorted(enc(w, v) for w in adj[v] if w != parent)) + ")"

    if len(centers) == 1:
        return enc(centers[0], None)
    a, b = centers
    return "E" + "|".join(sorted([enc(a, b), enc(b, a)]))


@dataclass(frozen=True)
class TypeCensus:
    n: int
    degree: int
    d: int
    trees_generated: int
    types_examined: int
    contracted: int
    realizable: int
    certificates: int
    certificate_forms: tuple[str, ...]
    representatives: tuple[LabeledCurve, ...]
    capped: bool
    verdicts: dict[str, int] = field(default_factory=dict)


def _census_item(args):
    form, graph, leaf_dirs, scenario = args
    try:
        ct = infer_directions(graph, leaf_dirs)
    except Contracted:
        return form, "contracted", None
    try:
        curve = realize(ct)
    except Infeasible:
        return form, "not realizable", None
    lc = assign_anchors(classify_edges(curve, scenario))
    report = verify_certificate(lc)
    if report.is_certificate:
        return form, "certificate", lc
    return form, report.reason, None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TROPICERT_THREADS", "1")))
    except ValueError:
        return 1


def enumerate_types(n: int, degree: int, max_trees: int | None = 20000,
                    max_assignments: int | None = 20000, d: int | None = None,
                    threads: int | None = None, keep: int = 4) -> TypeCensus:
    """Exhaustive census of trivalent genus-0 types of projective degree ``degree``.

    Leaves get the direction multiset (``degree`` copies of each projective
    direction); types equal up to automorphism are merged through
    :func:`canonical_form`.  Results are processed in canonical order so the
    census does not depend on the number of worker processes.
    """
    if d is None:
        d = n if degree >= 2 else n - 1
    scenario = make_scenario(n, d)
    dirs = projective_directions(n)
    labels = [u for u in dirs for _ in range(degree)]
    e = len(labels)
    classes: dict[str, tuple] = {}
    generated = 0
    capped = False
    for edges in _labeled_trees(e):
        if max_trees is not None and generated >= max_trees:
            capped = True
            break
        generated += 1
        g, leaf_dirs = _tree_graph(edges, e, labels)
        form = canonical_form(g, leaf_dirs)
        if form not in classes:
            if max_assignments is not None and len(classes) >= max_assignments:
                capped = True
                break
            classes[form] = (g, leaf_dirs)
    items = [(f, *classes[f], scenario) for f in sorted(classes)]
    threads = _threads() if threads is None else threads
    if threads > 1 and len(items) > 1:
        with ProcessPoolExecutor(threads) as pool:
            results = list(pool.map(_census_item, items, chunksize=16))
    else:
        results = [_census_item(it) for it in items]
    verdicts = Counter(status for _, status, _ in results)
    certs = [(f, lc) for f, status, lc in results if status == "certificate"]
    return TypeCensus(
        n=n, degree=degree, d=d, trees_generated=generated, types_examined=len(items),
        contracted=verdicts.get("contracted", 0),
        realizable=len(items) - verdicts.get("contracted", 0) - verdicts.get("not realizable", 0),
        certificates=len(certs), certificate_forms=tuple(f for f, _ in certs),
        representatives=tuple(lc for _, lc in certs[:keep]), capped=capped,
        verdicts=dict(sorted(verdicts.items())),
    )


def certificate_form(lc: LabeledCurve) -> str:
    return canonical_form(lc.graph, lc.curve.leaf_directions)
