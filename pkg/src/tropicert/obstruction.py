"""Obstruction bookkeeping on the components of a maximally degenerate curve.

Each trivalent vertex is a P^1 component.  Its normal sheaf splits as
``O(a) + O^(n-3)`` where ``a = 1 - #non-free leaves``.  The obstruction space
is Serre dual to ``H^0`` of the dual bundle twisted by ``omega(k)``, ``k`` the
number of nodes on the component, so each summand of the dual has degree

    first:      (k_nonfree - 1) + (k_node - 2)
    transverse: k_node - 2

:func:`propagate_vanishing` runs the zero-propagation argument over the dual
tree; :func:`section_space_dim` glues explicit polynomial sections across the
nodes and computes the exact dimension, as an independent check.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

from .degeneration_model import EdgeRole
from .errors import TropicertError
from .graph_core import Graph
from .rational_kernel import sparse_rank


class ObstructionError(TropicertError, ValueError):
    pass


class NotGenusZero(ObstructionError):
    pass


class NotTrivalent(ObstructionError):
    pass


class Labeling(Protocol):
    graph: Graph
    roles: Mapping[int, EdgeRole]


@dataclass(frozen=True)
class RoleTree:
    """A bare graph with edge roles; enough input for the obstruction calculus."""

    graph: Graph
    roles: Mapping[int, EdgeRole]


@dataclass(frozen=True)
class VertexProfile:
    k_node: int
    k_free: int
    k_nonfree: int

    def __post_init__(self):
        if min(self.k_node, self.k_free, self.k_nonfree) < 0:
            raise ValueError("profile counts must be non-negative")
        if self.k_node + self.k_free + self.k_nonfree != 3:
            raise NotTrivalent(f"profile {self} is not trivalent")

    @classmethod
    def at(cls, lab: Labeling, v: int) -> "VertexProfile":
        roles = [lab.roles[e] for e in lab.graph.incident(v)]
        return cls(roles.count(EdgeRole.NODE), roles.count(EdgeRole.FREE),
                   roles.count(EdgeRole.NONFREE))

    def certificate_type(self) -> int | None:
        """1..4 for the four vertex types that occur in the conic certificate, else None."""
        return {
            (1, 1, 1): 1,  # node, free, non-free
            (2, 1, 0): 2,  # two nodes, free
            (2, 0, 1): 3,  # two nodes, non-free
            (1, 0, 2): 4,  # node, two non-free
        }.get((self.k_node, self.k_free, self.k_nonfree))


def normal_first_degree(p: VertexProfile) -> int:
    return 1 - p.k_nonfree


def dual_degrees(p: VertexProfile, n: int) -> tuple[int, ...]:
    if n < 3:
        raise ValueError("n must be at least 3")
    twist = p.k_node - 2
    return (-normal_first_degree(p) + twist,) + (twist,) * (n - 3)


def h0_dim(d: int) -> int:
    return max(0, d + 1)


def dual_dim(p: VertexProfile, n: int) -> int:
    return sum(h0_dim(d) for d in dual_degrees(p, n))


@dataclass(frozen=True)
class ObstructionReport:
    verdict: str  # "vanishes" or "inconclusive"
    degrees: dict[int, tuple[int, ...]]
    dual_dims: dict[int, int]
    trace: tuple[int, ...]

    @property
    def vanishes(self) -> bool:
        return self.verdict == "vanishes"


def _check_input(lab: Labeling) -> None:
    g = lab.graph
    if not g.is_tree():
        raise NotGenusZero("obstruction calculus needs a genus-0 curve")
    for v in g.vertices:
        if g.valence(v) != 3:
            raise NotTrivalent(f"vertex {v} has valence {g.valence(v)}")
    missing = [e.id for e in g.edges if e.id not in lab.roles]
    if missing:
        raise ObstructionError(f"edges {missing} have no role")


def propagate_vanishing(lab: Labeling, n: int, order: Sequence[int] | None = None) -> ObstructionReport:
    """Zero propagation from components with no dual sections.

    A component is forced to zero once the number of already-forced node
    neighbours exceeds every summand degree of its dual bundle.  ``order`` is a
    tie-break permutation of the vertices (default: ascending ids); the final
    verdict does not depend on it.
    """
    _check_input(lab)
    g = lab.graph
    order = list(g.vertices) if order is None else list(order)
    if sorted(order) != list(g.vertices):
        raise ValueError("order must be a permutation of the vertices")
    degs = {v: dual_degrees(VertexProfile.at(lab, v), n) for v in g.vertices}
    marked: set[int] = set()
    trace: list[int] = []
    for v in order:
        if max(degs[v]) <= -1:
            marked.add(v)
            trace.append(v)
    progress = True
    while progress:
        progress = False
        for v in order:
            if v in marked:
                continue
            z = sum(1 for _, w in g.neighbors(v) if w in marked)
            if z > max(degs[v]):
                marked.add(v)
                trace.append(v)
                progress = True
                break
    verdict = "vanishes" if len(marked) == g.n_vertices else "inconclusive"
    return ObstructionReport(verdict, degs, {v: sum(h0_dim(d) for d in degs[v]) for v in g.vertices},
                             tuple(trace))


def section_space_dim(lab: Labeling, n: int) -> int:
    """Dimension of the space of dual sections glued across all nodes.

    On each component the three special points sit at 0, 1 and infinity (in
    ascending edge-id order).  A summand of degree ``d >= 0`` is a polynomial
    of degree at most ``d``; its value at infinity is the ``z^d`` coefficient.
    At a node the two components' values of the same summand must be
    negatives of each other.
    """
    _check_input(lab)
    g = lab.graph
    degs = {v: dual_degrees(VertexProfile.at(lab, v), n) for v in g.vertices}
    var: dict[tuple[int, int, int], int] = {}
    for v in g.vertices:
        for j, d in enumerate(degs[v]):
            for c in range(d + 1):
                var[(v, j, c)] = len(var)
    point = {(v, e): k for v in g.vertices for k, e in enumerate(sorted(g.incident(v)))}

    def value(v: int, j: int, e: int) -> dict[int, int]:
        d = degs[v][j]
        if d < 0:
            return {}
        k = point[(v, e)]
        if k == 0:
            return {var[(v, j, 0)]: 1}
        if k == 1:
            return {var[(v, j, c)]: 1 for c in range(d + 1)}
        return {var[(v, j, d)]: 1}

    rows = []
    for e in g.bounded_edges():
        a, b = e.ends
        for j in range(n - 2):
            row = dict(value(a, j, e.id))
            for x, c in value(b, j, e.id).items():
                row[x] = row.get(x, 0) + c
            if row:
                rows.append(row)
    return len(var) - sparse_rank(rows, len(var))
