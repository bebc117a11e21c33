"""Parametrized tropical curves in Q^m and their combinatorial types."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import Infeasible, TropicertError
from .graph_core import Graph, GraphError
from .rational_kernel import (
    IntVec, LinSys, RatVec, integer_direction, primitive, rat_vec, solve_affine,
    strictly_positive_point,
)


class CurveError(TropicertError, ValueError):
    pass


class Contracted(TropicertError):
    """Balancing forces a bounded edge to have zero direction."""

    def __init__(self, edge: int):
        super().__init__(f"edge {edge} is contracted (zero balancing direction)")
        self.edge = edge


def _neg(u: Sequence[int]) -> IntVec:
    return tuple(-x for x in u)


def _scale(c, u):
    return tuple(c * x for x in u)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


@dataclass(frozen=True)
class CombinatorialType:
    """A graph plus a primitive direction per edge.

    ``directions[e]`` is read from ``ends[0]`` toward ``ends[1]`` for a bounded
    edge and outward for a leaf, so ``u(V, E) = -u(W, E)`` holds by construction.
    """

    graph: Graph
    ambient_dim: int
    directions: Mapping[int, IntVec]

    def __post_init__(self):
        for e in self.graph.edges:
            u = tuple(self.directions[e.id])
            if len(u) != self.ambient_dim:
                raise CurveError(f"edge {e.id}: direction has wrong length")
            if primitive(u)[0] != u:
                raise CurveError(f"edge {e.id}: direction {u} is not primitive")

    def u(self, vertex: int, edge: int) -> IntVec:
        e = self.graph.edges[edge]
        d = tuple(self.directions[edge])
        if e.is_leaf or e.ends[0] == vertex:
            return d
        return _neg(d)

    def combinatorial_type(self) -> "CombinatorialType":
        return self


@dataclass(frozen=True)
class TropicalCurve:
    graph: Graph
    ambient_dim: int
    positions: tuple[RatVec, ...]
    leaf_directions: Mapping[int, IntVec] = field(default_factory=dict)

    def __post_init__(self):
        g = self.graph
        object.__setattr__(self, "positions", tuple(rat_vec(p) for p in self.positions))
        object.__setattr__(self, "leaf_directions",
                           {int(k): tuple(v) for k, v in sorted(self.leaf_directions.items())})
        if not g.is_connected():
            raise GraphError("tropical curve graph must be connected")
        if len(self.positions) != g.n_vertices:
            raise CurveError("need one position per vertex")
        for v, p in enumerate(self.positions):
            if len(p) != self.ambient_dim:
                raise CurveError(f"vertex {v}: position has wrong dimension")
        leaf_ids = {e.id for e in g.leaf_edges()}
        if set(self.leaf_directions) != leaf_ids:
            raise CurveError("leaf_directions must cover exactly the leaf edges")
        for i, u in self.leaf_directions.items():
            if len(u) != self.ambient_dim:
                raise CurveError(f"leaf {i}: direction has wrong dimension")
            if primitive(u)[0] != u:
                raise CurveError(f"leaf {i}: direction {u} is not primitive")
        for e in g.bounded_edges():
            a, b = e.ends
            if self.positions[a] == self.positions[b]:
                raise CurveError(f"edge {e.id} has zero displacement")

    def direction(self, edge: int) -> IntVec:
        e = self.graph.edges[edge]
        if e.is_leaf:
            return self.leaf_directions[edge]
        a, b = e.ends
        return integer_direction(_sub(self.positions[b], self.positions[a]))[0]

    def length(self, edge: int) -> Fraction:
        a, b = self.graph.edges[edge].ends
        return integer_direction(_sub(self.positions[b], self.positions[a]))[1]

    def combinatorial_type(self) -> CombinatorialType:
        return CombinatorialType(self.graph, self.ambient_dim,
                                 {e.id: self.direction(e.id) for e in self.graph.edges})


Curveish = Union[TropicalCurve, CombinatorialType]


# --------------------------------------------------------------------------
# balancing, degree, valence

@dataclass(frozen=True)
class BalancingReport:
    balanced: bool
    residues: dict[int, IntVec]  # only unbalanced vertices


def check_balancing(c: Curveish) -> BalancingReport:
    ct = c.combinatorial_type()
    g = ct.graph
    residues = {}
    for v in g.vertices:
        r = (0,) * ct.ambient_dim
        for i in g.incident(v):
            r = _add(r, _scale(g.edges[i].weight, ct.u(v, i)))
        if any(r):
            residues[v] = r
    return BalancingReport(not residues, residues)


@dataclass(frozen=True)
class DegreeMap:
    support: dict[IntVec, int]

    @property
    def e(self) -> int:
        return sum(self.support.values())


def degree_map(c: Curveish) -> DegreeMap:
    ct = c.combinatorial_type()
    cnt = Counter()
    for e in ct.graph.leaf_edges():
        cnt[_scale(e.weight, ct.directions[e.id])] += 1
    return DegreeMap(dict(sorted(cnt.items())))


def is_trivalent(c: Curveish) -> bool:
    g = c.graph
    return all(g.valence(v) == 3 for v in g.vertices)


def global_leaf_sum(c: Curveish) -> IntVec:
    ct = c.combinatorial_type()
    s = (0,) * ct.ambient_dim
    for e in ct.graph.leaf_edges():
        s = _add(s, _scale(e.weight, ct.directions[e.id]))
    return s


def has_repeated_flag(ct: CombinatorialType) -> bool:
    """Two flags at one vertex share a direction, so their images overlap for any positions."""
    g = ct.graph
    for v in g.vertices:
        seen = set()
        for i in g.incident(v):
            u = ct.u(v, i)
            if u in seen:
                return True
            seen.add(u)
    return False


# --------------------------------------------------------------------------
# immersiveness

def _segment_meet(p, a, s_max, q, b, t_max):
    """Solutions of ``p + s a = q + t b`` with ``0 <= s <= s_max``, ``0 <= t <= t_max``.

    ``s_max``/``t_max`` of ``None`` means an unbounded ray.  Returns ``None`` for
    no intersection, otherwise ``(s_lo, s_hi)``: the parameter interval along
    the first piece (a single point when equal).
    """
    m = len(p)
    d = _sub(q, p)
    # parallel test: a and b proportional
    i0 = next(i for i in range(m) if a[i])
    par = all(a[i0] * b[j] == a[j] * b[i0] for j in range(m))
    if par:
        # collinear iff d is parallel to a
        if any(a[i0] * d[j] != a[j] * d[i0] for j in range(m)):
            return None
        # param of q along a, and ratio of b to a
        s0 = Fraction(d[i0]) / a[i0]
        r = Fraction(b[i0]) / a[i0]
        ends = [s0] if t_max is None else [s0, s0 + r * t_max]
        if t_max is None:
            lo, hi = (s0, None) if r > 0 else (None, s0)
        else:
            lo, hi = min(ends), max(ends)
        lo = Fraction(0) if lo is None else max(lo, Fraction(0))
        if s_max is not None:
            hi = s_max if hi is None else min(hi, s_max)
        if hi is not None and lo > hi:
            return None
        return lo, hi
    # two unknowns, solve via a 2x2 minor that is nonsingular
    for i in range(m):
        for j in range(i + 1, m):
            det = -a[i] * b[j] + a[j] * b[i]
            if det:
                s = Fraction(-d[i] * b[j] + d[j] * b[i], det)
                t = Fraction(a[i] * d[j] - a[j] * d[i], det)
                break
        else:
            continue
        break
    if any(p[k] + s * a[k] != q[k] + t * b[k] for k in range(m)):
        return None
    if s < 0 or t < 0:
        return None
    if (s_max is not None and s > s_max) or (t_max is not None and t > t_max):
        return None
    return s, s


def _piece(curve: TropicalCurve, edge_id: int, ct: CombinatorialType):
    e = curve.graph.edges[edge_id]
    v0 = e.ends[0]
    p = curve.positions[v0]
    a = ct.directions[edge_id]
    if e.is_leaf:
        return p, a, None
    return p, a, curve.length(edge_id)


def _bbox_disjoint(p, a, smax, q, b, tmax) -> bool:
    for k in range(len(p)):
        lo1 = hi1 = p[k]
        end = p[k] + a[k] * smax if smax is not None else None
        if end is None:
            if a[k] > 0:
                hi1 = None
            elif a[k] < 0:
                lo1 = None
        else:
            lo1, hi1 = min(lo1, end), max(hi1, end)
        lo2 = hi2 = q[k]
        end = q[k] + b[k] * tmax if tmax is not None else None
        if end is None:
            if b[k] > 0:
                hi2 = None
            elif b[k] < 0:
                lo2 = None
        else:
            lo2, hi2 = min(lo2, end), max(hi2, end)
        if hi1 is not None and lo2 is not None and hi1 < lo2:
            return True
        if hi2 is not None and lo1 is not None and hi2 < lo1:
            return True
    return False


def is_immersive(curve: TropicalCurve) -> bool:
    """Distinct vertex images, no zero edge, and edge images meeting only at shared endpoints."""
    g = curve.graph
    if len(set(curve.positions)) != g.n_vertices:
        return False
    ct = curve.combinatorial_type()
    if has_repeated_flag(ct):
        return False
    pieces = [_piece(curve, e.id, ct) for e in g.edges]
    for i in range(len(g.edges)):
        p, a, smax = pieces[i]
        for j in range(i + 1, len(g.edges)):
            q, b, tmax = pieces[j]
            if _bbox_disjoint(p, a, smax, q, b, tmax):
                continue
            meet = _segment_meet(p, a, smax, q, b, tmax)
            if meet is None:
                continue
            lo, hi = meet
            if lo != hi:
                return False
            shared = set(g.edges[i].ends) & set(g.edges[j].ends)
            point = _add(p, _scale(lo, a))
            if not any(curve.positions[v] == point for v in shared):
                return False
    return True


# --------------------------------------------------------------------------
# direction inference and realization

def infer_directions(graph: Graph, leaf_dirs: Mapping[int, Sequence[int]]) -> CombinatorialType:
    """Balancing-forced directions and weights on a tree with weighted leaf vectors.

    ``leaf_dirs[e]`` is the weighted vector ``w * u`` of leaf ``e``.  Raises
    :class:`Contracted` if some bounded edge would get direction zero.
    """
    if not graph.is_tree():
        raise GraphError("direction inference needs a genus-0 graph")
    leaves = {e.id for e in graph.leaf_edges()}
    if set(leaf_dirs) != leaves:
        raise CurveError("every leaf needs a direction")
    m = len(next(iter(leaf_dirs.values())))
    weights: dict[int, int] = {}
    dirs: dict[int, IntVec] = {}
    for i, w_u in leaf_dirs.items():
        dirs[i], weights[i] = primitive(tuple(w_u))
    # subtree sums via one pass from the root: sum of weighted leaves below each vertex
    order = graph.bfs_tree(0)
    below: dict[int, IntVec] = {}
    for v in graph.vertices:
        s = (0,) * m
        for e in graph.leaves_at(v):
            s = _add(s, tuple(leaf_dirs[e.id]))
        below[v] = s
    for v, _, parent in reversed(order):
        if parent is not None:
            below[parent] = _add(below[parent], below[v])
    parent_edge = {v: pe for v, pe, _ in order}
    for e in graph.bounded_edges():
        a, b = e.ends
        # the child side of e is the vertex whose parent edge is e
        child = b if parent_edge.get(b) == e.id else a
        s = below[child]
        if not any(s):
            raise Contracted(e.id)
        # weighted direction from the child toward the parent side is -s
        toward_b = s if child == b else _neg(s)
        dirs[e.id], weights[e.id] = primitive(toward_b)
    ct = CombinatorialType(graph.with_weights(weights), m, dirs)
    return ct


def _place(ct: CombinatorialType, lengths: Mapping[int, Fraction]) -> tuple[RatVec, ...]:
    g = ct.graph
    pos: dict[int, RatVec] = {0: (Fraction(0),) * ct.ambient_dim}
    for v, pe, parent in g.bfs_tree(0):
        if pe is None:
            continue
        step = _scale(lengths[pe], ct.u(parent, pe))
        pos[v] = _add(pos[parent], step)
    return tuple(pos[v] for v in g.vertices)


def _curve_from(ct: CombinatorialType, positions) -> TropicalCurve:
    leaf = {e.id: ct.directions[e.id] for e in ct.graph.leaf_edges()}
    return TropicalCurve(ct.graph, ct.ambient_dim, positions, leaf)


REALIZE_ATTEMPTS = 64


def realize(ct: CombinatorialType, attempts: int = REALIZE_ATTEMPTS) -> TropicalCurve:
    """A deterministic immersive representative with vertex 0 at the origin.

    Unit edge lengths are tried first.  After that a fixed sequence of seeded
    perturbations is tried; if none is immersive the type is declared
    :class:`Infeasible` (a search cap, not a proof of non-realizability).
    """
    if not check_balancing(ct).balanced:
        raise Infeasible("type is not balanced")
    if has_repeated_flag(ct):
        raise Infeasible("two flags at one vertex share a direction")
    g = ct.graph
    bounded = [e.id for e in g.bounded_edges()]
    if g.is_tree():
        candidates = ({i: Fraction(1) for i in bounded},)
        for k in range(1, attempts):
            rng = random.Random(k)
            candidates += ({i: Fraction(rng.randint(1, 2 + k)) for i in bounded},)
        for lengths in candidates:
            curve = _curve_from(ct, _place(ct, lengths))
            if is_immersive(curve):
                return curve
        raise Infeasible(f"no immersive placement among {attempts} length choices")
    return _realize_cyclic(ct, attempts)


def _realize_cyclic(ct: CombinatorialType, attempts: int) -> TropicalCurve:
    # unknowns: m coordinates per vertex, then one length per bounded edge
    g = ct.graph
    m = ct.ambient_dim
    bounded = [e.id for e in g.bounded_edges()]
    nv = m * g.n_vertices
    n = nv + len(bounded)
    rows, rhs = [], []
    for k in range(m):
        r = [0] * n
        r[k] = 1
        rows.append(r)
        rhs.append(0)
    for j, i in enumerate(bounded):
        a, b = g.edges[i].ends
        u = ct.directions[i]
        for k in range(m):
            r = [0] * n
            r[m * b + k] += 1
            r[m * a + k] -= 1
            r[nv + j] = -u[k]
            rows.append(r)
            rhs.append(0)
    space = solve_affine(LinSys.of(rows, rhs, n))
    length_coords = range(nv, n)
    unit = None
    try:
        unit = solve_affine(LinSys.of(rows + [[1 if c == nv + j else 0 for c in range(n)]
                                              for j in range(len(bounded))],
                                      rhs + [1] * len(bounded), n)).basepoint
    except Infeasible:
        pass
    x0 = strictly_positive_point(space, length_coords)
    if x0 is None:
        raise Infeasible("no positive edge lengths satisfy the cycle conditions")
    tries = [unit] if unit is not None else []
    tries.append(x0)
    for k in range(1, attempts):
        rng = random.Random(k)
        coeffs = [Fraction(rng.randint(-5, 5)) for _ in space.basis]
        delta = space.point(coeffs)
        delta = _sub(delta, space.basepoint)
        scale = Fraction(1, 8)
        while True:
            x = _add(x0, _scale(scale, delta))
            if all(x[c] > 0 for c in length_coords):
                break
            scale /= 2
        tries.append(x)
    for x in tries:
        positions = tuple(tuple(x[m * v:m * v + m]) for v in g.vertices)
        try:
            curve = _curve_from(ct, positions)
        except CurveError:
            continue
        if is_immersive(curve):
            return curve
    raise Infeasible("no immersive placement found")
