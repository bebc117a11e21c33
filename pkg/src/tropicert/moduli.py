"""Dimension counts for rational curves in the degenerate hypersurface, and exact deformation spaces."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .degeneration_model import EdgeRole, LabeledCurve, annihilator_basis
from .errors import Infeasible, TropicertError
from .rational_kernel import AffineSolution, IntVec, RatVec, rank, solve_sparse


class ModuliError(TropicertError, ValueError):
    pass


class NotFano(ModuliError):
    pass


class BaseInfeasible(ModuliError):
    pass


class NotFreeVertex(ModuliError):
    pass


@dataclass(frozen=True)
class DimensionReport:
    curve_degree: int
    n: int
    d: int
    moduli: int
    incidence: int
    expected: int
    threshold: int
    sweeps: bool
    # the bound form: every one of the n-1 divisors besides the free one counted as non-free
    bound_incidence: int
    bound_expected: int
    ci_degrees: tuple[int, ...] | None = None
    ambient: int | None = None

    @property
    def minimal_sweeping_degree(self) -> int | None:
        """1 if lines already sweep, 2 if conics are needed, None if neither count suffices."""
        n, nonfree = self.n, self.incidence // self.curve_degree
        for delta in (1, 2):
            if delta * n + n - 4 - delta * nonfree >= self.threshold:
                return delta
        return None


def moduli_dim(delta: int, n: int) -> int:
    """Dimension of degree-``delta`` rational curves in P^(n-1)."""
    if delta < 1 or n < 3:
        raise ModuliError("need delta >= 1 and n >= 3")
    return delta * n + n - 4


def incidence_dim(delta: int, n: int, d: int) -> int:
    """``delta`` points on each of the ``d - 1`` non-free divisors, one condition each."""
    if delta < 1 or not 2 <= d <= n:
        raise ModuliError("need delta >= 1 and 2 <= d <= n")
    return delta * (d - 1)


def expected_dim(delta: int, n: int, d: int) -> DimensionReport:
    moduli = moduli_dim(delta, n)
    incidence = incidence_dim(delta, n, d)
    expected = moduli - incidence
    threshold = n - 2
    bound_incidence = delta * (n - 1)
    return DimensionReport(delta, n, d, moduli, incidence, expected, threshold,
                           expected >= threshold, bound_incidence, moduli - bound_incidence)


def ci_expected(degrees: Sequence[int], n: int, delta: int) -> DimensionReport:
    """Complete intersection of hypersurfaces of the given degrees in P^(k+n-1).

    Each component of the degeneration is a P^(n-1) with ``d - k`` non-free
    toric divisors, ``d`` the sum of the degrees.
    """
    degrees = tuple(degrees)
    k = len(degrees)
    if k < 1 or any(x < 2 for x in degrees):
        raise ModuliError("every degree must be at least 2")
    if n < 3 or delta < 1:
        raise ModuliError("need n >= 3 and delta >= 1")
    ambient = k + n - 1
    d = sum(degrees)
    if d > ambient:
        raise NotFano(f"total degree {d} exceeds {ambient}")
    moduli = moduli_dim(delta, n)
    incidence = delta * (d - k)
    expected = moduli - incidence
    threshold = n - 2
    bound_incidence = delta * (n - 1)
    return DimensionReport(delta, n, d, moduli, incidence, expected, threshold,
                           expected >= threshold, bound_incidence, moduli - bound_incidence,
                           degrees, ambient)


# --------------------------------------------------------------------------
# deformation spaces

@dataclass(frozen=True)
class DeformationSpace:
    curve: LabeledCurve
    dimension: int
    basis: tuple[tuple[RatVec, ...], ...]  # basis[i][v] = velocity of vertex v
    expected_count: int
    base_satisfied: bool
    feasible: bool = True

    def velocity(self, i: int, v: int) -> RatVec:
        return self.basis[i][v]


def expected_count(lc: LabeledCurve) -> int:
    """Unknowns minus constraints, assuming every constraint independent."""
    g = lc.graph
    m = lc.curve.ambient_dim
    anchored = sum(lc.anchors[e].codimension for e in lc.anchors)
    return m * g.n_vertices - (m - 1) * len(g.bounded_edges()) - anchored


def _anchor_rows(lc: LabeledCurve):
    g = lc.graph
    for e in sorted(lc.anchors):
        a = lc.anchors[e]
        v = g.edges[e].ends[0]
        for c, val in zip(a.normals, a.values()):
            yield v, c, val


def deformation_space(lc: LabeledCurve, require_base: bool = True) -> DeformationSpace:
    """Exact space of vertex motions keeping edge directions and anchors.

    For trees the unknowns are the position of vertex 0 and one length per
    bounded edge, which solves the parallelism constraints explicitly; other
    graphs use the vertex-position formulation directly.  With
    ``require_base`` the base curve must satisfy every anchor.
    """
    base_ok = all(lc.anchors[e].contains(lc.curve.positions[lc.graph.edges[e].ends[0]])
                  for e in lc.anchors)
    if require_base and not base_ok:
        raise BaseInfeasible("the base curve violates an anchor")
    if lc.graph.is_tree():
        return _tree_space(lc, base_ok)
    return position_space(lc, base_ok)


def _tree_space(lc: LabeledCurve, base_ok: bool) -> DeformationSpace:
    g = lc.graph
    curve = lc.curve
    ct = curve.combinatorial_type()
    m = curve.ambient_dim
    bounded = [e.id for e in g.bounded_edges()]
    col = {e: m + j for j, e in enumerate(bounded)}
    nvar = m + len(bounded)
    # pos(v) = x[0:m] + sum over path edges of L_e * u(parent, e)
    path: dict[int, list[tuple[int, IntVec]]] = {0: []}
    for v, pe, parent in g.bfs_tree(0):
        if pe is not None:
            path[v] = path[parent] + [(pe, ct.u(parent, pe))]
    rows, rhs = [], []
    for v, c, val in _anchor_rows(lc):
        row: dict[int, Fraction] = {}
        for k in range(m):
            if c[k]:
                row[k] = Fraction(c[k])
        for e, u in path[v]:
            s = sum(a * b for a, b in zip(c, u))
            if s:
                row[col[e]] = row.get(col[e], 0) + s
        rows.append(row)
        rhs.append(val)
    feasible = True
    try:
        sol = solve_sparse(rows, rhs, nvar)
    except Infeasible:
        feasible = False
        sol = solve_sparse(rows, [0] * len(rows), nvar)
    basis = []
    for b in sol.basis:
        vel = {}
        for v in g.vertices:
            p = list(b[:m])
            for e, u in path[v]:
                L = b[col[e]]
                if L:
                    p = [x + L * y for x, y in zip(p, u)]
            vel[v] = tuple(p)
        basis.append(tuple(vel[v] for v in g.vertices))
    return DeformationSpace(lc, len(basis), tuple(basis), expected_count(lc), base_ok, feasible)


def position_space(lc: LabeledCurve, base_ok: bool | None = None) -> DeformationSpace:
    """The vertex-position formulation: unknowns are all vertex coordinates."""
    g = lc.graph
    curve = lc.curve
    m = curve.ambient_dim
    nvar = m * g.n_vertices
    rows, rhs = [], []
    for e in g.bounded_edges():
        a, b = e.ends
        for c in annihilator_basis(curve.direction(e.id)):
            row = {}
            for k in range(m):
                if c[k]:
                    row[m * b + k] = Fraction(c[k])
                    row[m * a + k] = Fraction(-c[k])
            rows.append(row)
            rhs.append(0)
    for v, c, val in _anchor_rows(lc):
        rows.append({m * v + k: Fraction(c[k]) for k in range(m) if c[k]})
        rhs.append(val)
    feasible = True
    try:
        sol = solve_sparse(rows, rhs, nvar)
    except Infeasible:
        feasible = False
        sol = solve_sparse(rows, [0] * len(rows), nvar)
    basis = tuple(tuple(tuple(b[m * v:m * v + m]) for v in g.vertices) for b in sol.basis)
    if base_ok is None:
        base_ok = all(lc.anchors[e].contains(curve.positions[g.edges[e].ends[0]]) for e in lc.anchors)
    return DeformationSpace(lc, len(basis), basis, expected_count(lc), base_ok, feasible)


def quotient(x: Sequence[Fraction], u: Sequence[int]) -> RatVec:
    """Coordinates of ``x`` modulo ``u``: eliminate along ``u`` and drop its first nonzero slot."""
    i = next(k for k in range(len(u)) if u[k])
    t = Fraction(x[i]) / u[i]
    return tuple(x[k] - t * u[k] for k in range(len(u)) if k != i)


def _velocity_rows(ds: DeformationSpace, vertex: int, direction: IntVec) -> list[RatVec]:
    return [quotient(ds.velocity(i, vertex), direction) for i in range(ds.dimension)]


def _check_free(ds: DeformationSpace, vertex: int, direction: Sequence[int]) -> IntVec:
    direction = tuple(direction)
    if (vertex, direction) not in ds.curve.free_vertices():
        raise NotFreeVertex(f"vertex {vertex} carries no free leaf with direction {direction}")
    return direction


def mobility(ds: DeformationSpace, free_vertex: int, free_direction: Sequence[int]) -> int:
    """Rank of the motion of ``free_vertex`` inside its free face."""
    u = _check_free(ds, free_vertex, free_direction)
    if ds.dimension == 0:
        return 0
    return rank(_velocity_rows(ds, free_vertex, u))


def residual_mobility(ds: DeformationSpace, vertex: int, direction: Sequence[int],
                      given: Sequence[tuple[int, Sequence[int]]]) -> int:
    """Extra free-face rank of ``vertex`` once the motions in ``given`` are quotiented out."""
    u = _check_free(ds, vertex, direction)
    given = [(w, _check_free(ds, w, d)) for w, d in given]
    if ds.dimension == 0:
        return 0
    base = [sum((list(quotient(ds.velocity(i, w), d)) for w, d in given), [])
            for i in range(ds.dimension)]
    both = [row + list(quotient(ds.velocity(i, vertex), u)) for i, row in enumerate(base)]
    return rank(both) - (rank(base) if given else 0)


def best_mobility(ds: DeformationSpace) -> tuple[int, int | None]:
    """Largest mobility over the free leaves, with the vertex attaining it."""
    best, where = 0, None
    for v, u in ds.curve.free_vertices():
        r = mobility(ds, v, u)
        if where is None or r > best:
            best, where = r, v
    return best, where
