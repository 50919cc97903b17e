"""Exact-rational building blocks: constraints, polyhedra, instances.

Every number in this package is a ``fractions.Fraction`` (arbitrary
precision, always in lowest terms, positive denominator).  Nothing is ever
rounded; floats are rejected at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence, Union

Vector = tuple[Fraction, ...]

RELATIONS = ("<=", "=", ">=")

GOAL_BOUND = "prove-bound"
GOAL_INFEASIBLE = "prove-infeasible"
GOALS = (GOAL_BOUND, GOAL_INFEASIBLE)


class Error(Exception):
    """Base class for package errors."""


class InputError(Error):
    """Malformed or out-of-contract input."""


class BudgetError(Error):
    """A configured enumeration or node budget was exceeded."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class UnboundedPolyhedronError(Error):
    """An operation that requires a bounded polyhedron met an unbounded one."""


class InvalidInstanceError(Error):
    """The instance's claimed bound or infeasibility is refuted by an integer point."""


RationalLike = Union[Fraction, int, str]


def rat(x: RationalLike) -> Fraction:
    """Coerce an int, Fraction, or "p/q" string to an exact Fraction.

    Floats are rejected: silent binary-to-rational conversion is a bug
    magnet in exact arithmetic.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational from {x!r}: {exc}") from None
    raise InputError(f"expected int, Fraction or 'p/q' string, got {type(x).__name__}")


def rat_str(q: Fraction) -> str:
    """Serialize a Fraction as "p/q", omitting the denominator when it is 1."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def vec(xs: Iterable[RationalLike]) -> Vector:
    return tuple(rat(x) for x in xs)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    if len(a) != len(b):
        raise InputError(f"dot product of lengths {len(a)} and {len(b)}")
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def zeros(k: int) -> Vector:
    return (Fraction(0),) * k


def unit(i: int, k: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(k))


def primitive_vector(coeffs: Sequence[Fraction]) -> tuple[tuple[int, ...], Fraction]:
    """Scale a rational vector by the positive factor that makes it a
    primitive integer vector (coprime entries).

    Returns ``(integer_coeffs, scale)`` with ``scale * coeffs == integer_coeffs``.
    The zero vector maps to itself with scale 1.
    """
    nonzero = [c for c in coeffs if c != 0]
    if not nonzero:
        return tuple(0 for _ in coeffs), Fraction(1)
    denom_lcm = lcm(*(c.denominator for c in nonzero))
    ints = [c.numerator * (denom_lcm // c.denominator) for c in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    scale = Fraction(denom_lcm, g)
    return tuple(v // g for v in ints), scale


@dataclass(frozen=True)
class LinearConstraint:
    """One row ``<coeffs, x> relation rhs`` over the full ambient space."""

    coeffs: Vector
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise InputError(f"unknown relation {self.relation!r}")

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def sparsity(self) -> int:
        """Number of nonzero coefficients in primitive integer form."""
        return sum(1 for c in self.coeffs if c != 0)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coeffs) if c != 0)

    def evaluate(self, point: Sequence[Fraction]) -> Fraction:
        return dot(self.coeffs, point)

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        lhs = self.evaluate(point)
        if self.relation == "<=":
            return lhs <= self.rhs
        if self.relation == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs

    def le_rows(self) -> list[tuple[Vector, Fraction]]:
        """This constraint as one or two ``<=`` rows (equalities give two)."""
        if self.relation == "<=":
            return [(self.coeffs, self.rhs)]
        neg = (tuple(-c for c in self.coeffs), -self.rhs)
        if self.relation == ">=":
            return [neg]
        return [(self.coeffs, self.rhs), neg]

    def primitive(self) -> "LinearConstraint":
        """Equivalent constraint with primitive integer coefficients.

        Only positive scaling is applied, so the relation is unchanged.
        """
        ints, scale = primitive_vector(self.coeffs)
        return LinearConstraint(vec(ints), self.relation, self.rhs * scale)

    def canonical_key(self):
        """Orientation-normalized comparison key.

        Inequalities are oriented to ``<=`` and scaled primitive; equalities
        are scaled primitive with the first nonzero coefficient positive.
        Two constraints describe the same halfspace/hyperplane iff their
        keys are equal.
        """
        if self.relation == "=":
            prim = self.primitive()
            flip = next((c < 0 for c in prim.coeffs if c != 0), False)
            if flip:
                return ("=", tuple(-c for c in prim.coeffs), -prim.rhs)
            return ("=", prim.coeffs, prim.rhs)
        coeffs, rhs = self.le_rows()[0]
        prim = LinearConstraint(coeffs, "<=", rhs).primitive()
        return ("<=", prim.coeffs, prim.rhs)

    def __str__(self):
        terms = " + ".join(
            f"{rat_str(c)}*x{i}" for i, c in enumerate(self.coeffs) if c != 0
        )
        return f"{terms or '0'} {self.relation} {rat_str(self.rhs)}"


def con(coeffs: Iterable[RationalLike], relation: str, rhs: RationalLike) -> LinearConstraint:
    """Convenience constructor coercing all numeric data through `rat`."""
    return LinearConstraint(vec(coeffs), relation, rat(rhs))


def box_constraints(k: int, lo: RationalLike = 0, hi: RationalLike = 1) -> list[LinearConstraint]:
    """``lo <= x_i <= hi`` for every coordinate, as ordinary rows."""
    rows = []
    for i in range(k):
        rows.append(LinearConstraint(unit(i, k), ">=", rat(lo)))
        rows.append(LinearConstraint(unit(i, k), "<=", rat(hi)))
    return rows


@dataclass(frozen=True)
class Polyhedron:
    """H-representation over ``Z^dim_int x R^dim_cont``.

    Variable bounds are ordinary constraints; there is no separate bound
    storage.  Coordinates 0..dim_int-1 are the integer-constrained ones.
    """

    dim_int: int
    dim_cont: int
    constraints: tuple[LinearConstraint, ...]

    def __post_init__(self):
        if self.dim_int < 0 or self.dim_cont < 0 or self.ambient_dim == 0:
            raise InputError("polyhedron needs a positive ambient dimension")
        for c in self.constraints:
            if c.dim != self.ambient_dim:
                raise InputError(
                    f"constraint length {c.dim} != ambient dimension {self.ambient_dim}"
                )

    @property
    def ambient_dim(self) -> int:
        return self.dim_int + self.dim_cont

    def contains(self, point: Sequence[Fraction]) -> bool:
        return all(c.satisfied_by(point) for c in self.constraints)

    def with_constraints(self, extra: Iterable[LinearConstraint]) -> "Polyhedron":
        return Polyhedron(self.dim_int, self.dim_cont, self.constraints + tuple(extra))


def polyhedron(dim_int: int, dim_cont: int, constraints: Iterable[LinearConstraint]) -> Polyhedron:
    return Polyhedron(dim_int, dim_cont, tuple(constraints))


@dataclass(frozen=True)
class Instance:
    """A proof obligation: show ``<objective, x> <= bound`` over the integer
    points of the polyhedron, or show there are none at all."""

    polyhedron: Polyhedron
    objective: Vector
    bound: Fraction
    goal: str = GOAL_BOUND

    def __post_init__(self):
        if len(self.objective) != self.polyhedron.ambient_dim:
            raise InputError("objective length != ambient dimension")
        if self.goal not in GOALS:
            raise InputError(f"unknown goal {self.goal!r}")

    @property
    def dim_int(self) -> int:
        return self.polyhedron.dim_int

    @property
    def dim_cont(self) -> int:
        return self.polyhedron.dim_cont


def is_integral(point: Sequence[Fraction], n: int) -> bool:
    """True iff the first n coordinates are integers (exact test)."""
    if len(point) < n:
        raise InputError(f"point of length {len(point)} cannot have {n} integer coordinates")
    return all(rat(point[i]).denominator == 1 for i in range(n))


@dataclass(frozen=True)
class OrientedSystem:
    """A polyhedron's constraints flattened to ``G x <= h`` rows.

    ``<=`` rows pass through, ``>=`` rows are negated, equalities expand to
    a ``<=`` pair (original first).  Multiplier vectors for Chvatal-Gomory
    cuts, Farkas witnesses and LP duals are all indexed by these rows, in
    this deterministic order.
    """

    ambient: int
    rows: tuple[Vector, ...]
    rhs: Vector
    origins: tuple[tuple[int, int], ...]  # (constraint index, +1 as-is / -1 negated)

    @classmethod
    def from_polyhedron(cls, P: Polyhedron) -> "OrientedSystem":
        rows, rhs, origins = [], [], []
        for idx, c in enumerate(P.constraints):
            le = c.le_rows()
            rows.append(le[0][0])
            rhs.append(le[0][1])
            origins.append((idx, 1 if c.relation != ">=" else -1))
            if len(le) == 2:
                rows.append(le[1][0])
                rhs.append(le[1][1])
                origins.append((idx, -1))
        return cls(P.ambient_dim, tuple(rows), tuple(rhs), tuple(origins))

    def __len__(self) -> int:
        return len(self.rows)

    def combine(self, multipliers: Sequence[Fraction]) -> tuple[Vector, Fraction]:
        """Nonnegative combination ``(lambda^T G, lambda^T h)``.

        Raises on a negative multiplier or a length mismatch.
        """
        if len(multipliers) != len(self.rows):
            raise InputError(
                f"multiplier vector of length {len(multipliers)}, expected {len(self.rows)}"
            )
        k = self.ambient
        acc = [Fraction(0)] * k
        acc_rhs = Fraction(0)
        for lam, row, b in zip(multipliers, self.rows, self.rhs):
            lam = rat(lam)
            if lam < 0:
                raise InputError("multipliers must be nonnegative")
            if lam == 0:
                continue
            for j, g in enumerate(row):
                if g != 0:
                    acc[j] += lam * g
            acc_rhs += lam * b
        return tuple(acc), acc_rhs
