"""Edge roles and incidence anchors for curves in one component of the degenerate hypersurface.

A degree-``d`` hypersurface in P^n degenerates to ``d`` copies of P^(n-1).
In the fan picture of P^(n-1) the toric divisors correspond to the ``n``
directions ``-e_1, ..., -e_(n-1), (1, ..., 1)``; those shared with another
component are *non-free*, the rest are *free*.  A curve leaf pointing in a
non-free direction must hit the singular locus of the total space, which is
modelled tropically by an affine *anchor* through the vertex carrying that
leaf.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import TropicertError
from .rational_kernel import IntVec, RatVec, primitive, rat_vec
from .tropical_curve import TropicalCurve, degree_map


class ScenarioError(TropicertError, ValueError):
    pass


class BadDegree(ScenarioError):
    pass


class BadFreeSet(ScenarioError):
    pass


class NotProjectiveDegree(ScenarioError):
    pass


class EdgeRole(str, enum.Enum):
    NODE = "node"
    FREE = "free"
    NONFREE = "nonfree"


def projective_directions(n: int) -> list[IntVec]:
    """``[-e_1, ..., -e_(n-1), (1, ..., 1)]`` in dimension ``n - 1``."""
    if n < 3:
        raise BadDegree(f"need n >= 3, got {n}")
    m = n - 1
    dirs = [tuple(-1 if j == i else 0 for j in range(m)) for i in range(m)]
    dirs.append((1,) * m)
    return dirs


@dataclass(frozen=True)
class Scenario:
    n: int
    d: int
    free_dirs: tuple[IntVec, ...]

    @property
    def m(self) -> int:
        return self.n - 1

    @property
    def nonfree_dirs(self) -> tuple[IntVec, ...]:
        return tuple(u for u in projective_directions(self.n) if u not in self.free_dirs)


def make_scenario(n: int, d: int, free_dirs: Iterable[Sequence[int]] | None = None) -> Scenario:
    if n < 3:
        raise BadDegree(f"need n >= 3, got {n}")
    if not 2 <= d <= n:
        raise BadDegree(f"hypersurface degree must satisfy 2 <= d <= n, got d={d}, n={n}")
    dirs = projective_directions(n)
    if free_dirs is None:
        free = tuple(dirs[: n - d + 1])
    else:
        free = tuple(tuple(u) for u in free_dirs)
        if len(set(free)) != len(free) or len(free) != n - d + 1:
            raise BadFreeSet(f"expected {n - d + 1} distinct free directions, got {len(free)}")
        for u in free:
            if u not in dirs:
                raise BadFreeSet(f"{u} is not one of the projective directions")
        free = tuple(sorted(free, key=dirs.index))
    return Scenario(n, d, free)


def projective_degree(curve: TropicalCurve, n: int) -> int:
    """The ``delta`` with degree map equal to ``delta`` copies of each projective direction."""
    if curve.ambient_dim != n - 1:
        raise NotProjectiveDegree(f"curve lives in Q^{curve.ambient_dim}, expected Q^{n - 1}")
    support = degree_map(curve).support
    dirs = projective_directions(n)
    counts = {support.get(u, 0) for u in dirs}
    if len(counts) != 1 or set(support) - set(dirs) or 0 in counts:
        raise NotProjectiveDegree(f"degree map {support} is not a multiple of the projective degree")
    return counts.pop()


@dataclass(frozen=True)
class Anchor:
    """The affine subspace ``{x : normal . x = normal . basepoint for each normal}``.

    Every normal annihilates ``direction``, so the subspace contains the full
    line through ``basepoint`` with that direction.
    """

    edge: int
    basepoint: RatVec
    direction: IntVec
    normals: tuple[IntVec, ...]

    def __post_init__(self):
        object.__setattr__(self, "basepoint", rat_vec(self.basepoint))
        object.__setattr__(self, "direction", tuple(self.direction))
        object.__setattr__(self, "normals", tuple(tuple(c) for c in self.normals))
        for c in self.normals:
            if sum(a * b for a, b in zip(c, self.direction)) != 0:
                raise ScenarioError(f"anchor on edge {self.edge}: normal {c} does not annihilate its direction")

    @property
    def codimension(self) -> int:
        return len(self.normals)

    def values(self) -> tuple[Fraction, ...]:
        return tuple(sum((a * b for a, b in zip(c, self.basepoint)), Fraction(0))
                     for c in self.normals)

    def contains(self, point: Sequence[Fraction]) -> bool:
        return all(sum((a * b for a, b in zip(c, point)), Fraction(0)) == v
                   for c, v in zip(self.normals, self.values()))


def annihilator_basis(u: Sequence[int]) -> list[IntVec]:
    """Primitive integer covectors spanning the annihilator of ``u``."""
    m = len(u)
    i = next(k for k in range(m) if u[k])
    out = []
    for j in range(m):
        if j == i:
            continue
        c = [0] * m
        c[j] = u[i]
        c[i] = -u[j]
        out.append(primitive(c)[0])
    return out


def _generic_normal(u: IntVec, rng: random.Random) -> IntVec:
    basis = annihilator_basis(u)
    c = [0] * len(u)
    for b in basis:
        k = rng.randint(1, 100)
        c = [x + k * y for x, y in zip(c, b)]
    return primitive(c)[0]


ANCHOR_KINDS = ("hyperplane", "line")


@dataclass(frozen=True)
class LabeledCurve:
    curve: TropicalCurve
    scenario: Scenario
    roles: Mapping[int, EdgeRole]
    anchors: Mapping[int, Anchor] = field(default_factory=dict)
    transversal: bool = True  # the transversality-to-S assumption (not checked geometrically)

    @property
    def graph(self):
        return self.curve.graph

    @property
    def n(self) -> int:
        return self.scenario.n

    def edges_with(self, role: EdgeRole) -> list[int]:
        return [e for e, r in sorted(self.roles.items()) if r is role]

    def free_vertices(self) -> list[tuple[int, IntVec]]:
        g = self.graph
        return [(g.edges[e].ends[0], self.curve.leaf_directions[e])
                for e in self.edges_with(EdgeRole.FREE)]


def classify_edges(curve: TropicalCurve, scenario: Scenario) -> LabeledCurve:
    projective_degree(curve, scenario.n)
    roles = {}
    for e in curve.graph.edges:
        if not e.is_leaf:
            roles[e.id] = EdgeRole.NODE
        elif curve.leaf_directions[e.id] in scenario.free_dirs:
            roles[e.id] = EdgeRole.FREE
        else:
            roles[e.id] = EdgeRole.NONFREE
    return LabeledCurve(curve, scenario, roles)


def role_counts(lc: LabeledCurve) -> dict[str, int]:
    out = {r.value: 0 for r in EdgeRole}
    for r in lc.roles.values():
        out[r.value] += 1
    return out


def _random_rat(rng: random.Random, height: int = 100) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def assign_anchors(lc: LabeledCurve, mode: str = "from-curve", seed: int = 0,
                   kind: str = "hyperplane") -> LabeledCurve:
    """Attach an anchor to every non-free leaf.

    ``from-curve`` anchors pass through the vertex carrying the leaf, so the
    curve satisfies them.  ``random`` anchors get seeded random rational
    basepoints of height at most 100.  A ``hyperplane`` anchor imposes one
    condition (a fixed generic normal inside the annihilator of the leaf
    direction); a ``line`` anchor imposes all ``m - 1``.  In Q^2 the two
    coincide.
    """
    if mode not in ("from-curve", "random"):
        raise ValueError(f"unknown anchor mode {mode!r}")
    if kind not in ANCHOR_KINDS:
        raise ValueError(f"unknown anchor kind {kind!r}")
    curve = lc.curve
    rng = random.Random(seed) if mode == "random" else None
    anchors = {}
    for e in lc.edges_with(EdgeRole.NONFREE):
        u = curve.leaf_directions[e]
        if kind == "line":
            normals = tuple(annihilator_basis(u))
        elif rng is not None:
            normals = (_generic_normal(u, rng),)
        else:
            normals = (_generic_normal(u, random.Random(f"anchor-normal:{e}")),)
        if rng is None:
            base = curve.positions[curve.graph.edges[e].ends[0]]
        else:
            base = tuple(_random_rat(rng) for _ in range(curve.ambient_dim))
        anchors[e] = Anchor(e, base, u, normals)
    return replace(lc, anchors=anchors)


def validate_prelog(lc: LabeledCurve) -> bool:
    """Intersection indices agree on both branches of every node.

    Each node is a single edge carrying a single weight, so this always holds
    in the present model; the check is kept so the invariant is enforced if
    the model ever grows per-branch data.
    """
    g = lc.graph
    for e in lc.edges_with(EdgeRole.NODE):
        a, b = g.edges[e].ends
        if _branch_index(g, e, a) != _branch_index(g, e, b):
            return False
    return True


def _branch_index(g, edge: int, vertex: int) -> int:
    # intersection index of the branch of the node lying on ``vertex``'s component
    return g.edges[edge].weight


def check_labeled(lc: LabeledCurve) -> None:
    """Raise :class:`ScenarioError` if roles or anchors disagree with the scenario."""
    expected = classify_edges(lc.curve, lc.scenario).roles
    if dict(lc.roles) != dict(expected):
        raise ScenarioError("edge roles disagree with the scenario classification")
    for e, a in lc.anchors.items():
        if lc.roles.get(e) is not EdgeRole.NONFREE:
            raise ScenarioError(f"anchor on edge {e}, which is not a non-free leaf")
        if a.direction != lc.curve.leaf_directions[e]:
            raise ScenarioError(f"anchor on edge {e} has the wrong direction")
        if len(a.basepoint) != lc.curve.ambient_dim:
            raise ScenarioError(f"anchor on edge {e} has the wrong dimension")
