"""Exact linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` and Python integers, so
there is no tolerance anywhere: a rank, a balancing residue or a feasibility
verdict is either exactly right or a bug.

Elimination is done on sparse rows (``dict`` column -> value).  The systems
produced by tropical curves have two or three nonzeros per row and the fill
stays small, which keeps pure-Python elimination fast enough for the desk
scale this package targets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import Infeasible, ZeroVector

Rat = Fraction
RatVec = tuple[Fraction, ...]
IntVec = tuple[int, ...]

__all__ = [
    "Rat", "RatVec", "IntVec", "LinSys", "AffineSolution",
    "to_rat", "rat_vec", "primitive", "integer_direction", "rank",
    "solve_affine", "nullspace", "strictly_positive_point",
    "Infeasible", "ZeroVector",
]


def to_rat(x) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused: they would smuggle rounding into exact code.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_vec(xs: Iterable) -> RatVec:
    return tuple(to_rat(x) for x in xs)


def primitive(v: Sequence[int]) -> tuple[IntVec, int]:
    """Split a nonzero integer vector as ``v = g * u`` with ``u`` primitive.

    >>> primitive((2, 4, 6))
    ((1, 2, 3), 2)
    >>> primitive((0, -3))
    ((0, -1), 3)
    """
    g = 0
    for x in v:
        if not isinstance(x, int):
            raise TypeError(f"entry {x!r} is not an integer")
        g = gcd(g, x)
    if g == 0:
        raise ZeroVector(f"zero vector {tuple(v)} has no direction")
    return tuple(x // g for x in v), g


def integer_direction(v: Sequence[Fraction]) -> tuple[IntVec, Fraction]:
    """Write a nonzero rational vector as ``length * u`` with ``u`` primitive.

    Returns ``(u, length)`` with ``length > 0``.
    """
    den = 1
    for x in v:
        x = to_rat(x)
        den = den * x.denominator // gcd(den, x.denominator)
    scaled = [int(to_rat(x) * den) for x in v]
    u, g = primitive(scaled)
    return u, Fraction(g, den)


# --------------------------------------------------------------------------
# elimination

Row = dict[int, Fraction]


def _sparse(row: Sequence) -> Row:
    return {j: to_rat(x) for j, x in enumerate(row) if x != 0}


def _eliminate(rows: list[Row], ncols: int, reduced: bool):
    """Gaussian elimination on sparse rows.

    Only columns ``< ncols`` are pivoted; a column ``ncols`` (if present) is a
    right-hand side.  Returns ``(pivots, leftovers)`` where ``pivots`` is an
    ordered list of ``(col, row)`` with the pivot entry normalized to 1 and
    ``leftovers`` are the rows with no pivotable entry.
    """
    remaining = [dict(r) for r in rows if r]
    pivots: list[tuple[int, Row]] = []
    for col in range(ncols):
        best = -1
        for i, r in enumerate(remaining):
            if col in r and (best < 0 or len(r) < len(remaining[best])):
                best = i
        if best < 0:
            continue
        prow = remaining.pop(best)
        inv = 1 / prow[col]
        prow = {j: x * inv for j, x in prow.items()}
        targets = remaining + ([r for _, r in pivots] if reduced else [])
        for r in targets:
            f = r.get(col)
            if f is None:
                continue
            for j, x in prow.items():
                y = r.get(j, 0) - f * x
                if y:
                    r[j] = y
                else:
                    r.pop(j, None)
        remaining = [r for r in remaining if r]
        pivots.append((col, prow))
    return pivots, remaining


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a rectangular matrix given as a list of rows."""
    rows = list(rows)
    if not rows:
        return 0
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("matrix is not rectangular")
    pivots, _ = _eliminate([_sparse(r) for r in rows], ncols, reduced=False)
    return len(pivots)


@dataclass(frozen=True)
class LinSys:
    """The system ``rows . x = rhs`` in ``n_unknowns`` rational unknowns."""

    rows: tuple[RatVec, ...]
    rhs: RatVec
    n_unknowns: int

    @classmethod
    def of(cls, rows: Sequence[Sequence], rhs: Sequence | None = None,
           n_unknowns: int | None = None) -> "LinSys":
        rows = tuple(rat_vec(r) for r in rows)
        if n_unknowns is None:
            if not rows:
                raise ValueError("n_unknowns is required for an empty system")
            n_unknowns = len(rows[0])
        if any(len(r) != n_unknowns for r in rows):
            raise ValueError("all rows must have length n_unknowns")
        rhs = rat_vec(rhs) if rhs is not None else (Fraction(0),) * len(rows)
        if len(rhs) != len(rows):
            raise ValueError("rhs length differs from the number of rows")
        return cls(rows, rhs, n_unknowns)

    def residual(self, x: Sequence) -> RatVec:
        x = rat_vec(x)
        return tuple(sum((a * b for a, b in zip(r, x)), Fraction(0)) - c
                     for r, c in zip(self.rows, self.rhs))


@dataclass(frozen=True)
class AffineSolution:
    """``{basepoint + sum_i c_i basis[i]}``, with ``basis`` linearly independent."""

    basepoint: RatVec
    basis: tuple[RatVec, ...] = field(default=())

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def ambient(self) -> int:
        return len(self.basepoint)

    def point(self, coeffs: Sequence) -> RatVec:
        coeffs = rat_vec(coeffs)
        if len(coeffs) != len(self.basis):
            raise ValueError("wrong number of coefficients")
        out = list(self.basepoint)
        for c, b in zip(coeffs, self.basis):
            if c:
                for j, x in enumerate(b):
                    out[j] += c * x
        return tuple(out)


def _solve_sparse(rows: list[Row], ncols: int) -> AffineSolution:
    pivots, leftovers = _eliminate(rows, ncols, reduced=True)
    if leftovers:
        # only the rhs column survived: 0 = c with c != 0
        raise Infeasible("inconsistent linear system")
    pivot_cols = {c for c, _ in pivots}
    base = [Fraction(0)] * ncols
    for c, r in pivots:
        base[c] = r.get(ncols, Fraction(0))
    basis = []
    for f in range(ncols):
        if f in pivot_cols:
            continue
        b = [Fraction(0)] * ncols
        b[f] = Fraction(1)
        for c, r in pivots:
            x = r.get(f)
            if x:
                b[c] = -x
        basis.append(tuple(b))
    return AffineSolution(tuple(base), tuple(basis))


def solve_affine(sys: LinSys) -> AffineSolution:
    """Exact solution space of ``sys``; raises :class:`Infeasible`."""
    n = sys.n_unknowns
    rows = []
    for r, c in zip(sys.rows, sys.rhs):
        s = _sparse(r)
        if c:
            s[n] = c
        rows.append(s)
    return _solve_sparse(rows, n)


def solve_sparse(rows: Sequence[Row], rhs: Sequence, n_unknowns: int) -> AffineSolution:
    """Like :func:`solve_affine` for rows already given as ``{col: value}``."""
    aug = []
    for r, c in zip(rows, rhs):
        s = {j: to_rat(x) for j, x in r.items() if x}
        c = to_rat(c)
        if c:
            s[n_unknowns] = c
        aug.append(s)
    return _solve_sparse(aug, n_unknowns)


def sparse_rank(rows: Sequence[Row], n_unknowns: int) -> int:
    pivots, _ = _eliminate([{j: to_rat(x) for j, x in r.items() if x} for r in rows],
                           n_unknowns, reduced=False)
    return len(pivots)


def nullspace(rows: Sequence[Sequence], n_unknowns: int | None = None) -> tuple[RatVec, ...]:
    return solve_affine(LinSys.of(rows, None, n_unknowns)).basis


# --------------------------------------------------------------------------
# strict feasibility

def _normalize(coeffs: tuple[Fraction, ...], const: Fraction):
    for a in coeffs:
        if a:
            s = abs(a)
            return tuple(x / s for x in coeffs), const / s
    return coeffs, const


def strictly_positive_point(space: AffineSolution, coords: Iterable[int]) -> RatVec | None:
    """A point of ``space`` whose coordinates in ``coords`` are all > 0.

    Exact Fourier-Motzkin elimination on the strict inequalities, followed by
    back substitution that takes the midpoint of each bounded interval, the
    next integer past a lone lower bound (previous integer below a lone upper
    bound) and zero for unconstrained parameters.  Returns ``None`` when the
    open region is empty.
    """
    coords = sorted(set(coords))
    k = space.dimension
    cons = []
    for i in coords:
        c = tuple(b[i] for b in space.basis)
        cons.append(_normalize(c, space.basepoint[i]))
    cons = list(dict.fromkeys(cons))
    stages: list[list] = [[] for _ in range(k)]
    for j in range(k - 1, -1, -1):
        involved = [c for c in cons if c[0][j]]
        rest = [c for c in cons if not c[0][j]]
        stages[j] = involved
        lower = [c for c in involved if c[0][j] > 0]
        upper = [c for c in involved if c[0][j] < 0]
        new = []
        for lo, lc in lower:
            for up, uc in upper:
                a, b = lo[j], -up[j]
                coeffs = tuple(b * x + a * y for x, y in zip(lo, up))
                new.append(_normalize(coeffs, b * lc + a * uc))
        cons = list(dict.fromkeys(rest + new))
    if any(const <= 0 for _, const in cons):
        return None
    t = [Fraction(0)] * k
    for j in range(k):
        lo = hi = None
        for coeffs, const in stages[j]:
            val = const + sum((coeffs[i] * t[i] for i in range(j)), Fraction(0))
            bound = -val / coeffs[j]
            if coeffs[j] > 0:
                lo = bound if lo is None or bound > lo else lo
            else:
                hi = bound if hi is None or bound < hi else hi
        if lo is not None and hi is not None:
            t[j] = (lo + hi) / 2
        elif lo is not None:
            t[j] = Fraction(lo.__floor__() + 1)
        elif hi is not None:
            t[j] = Fraction(hi.__ceil__() - 1)
    return space.point(t)
