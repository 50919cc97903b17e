"""Exact LP solving and vertex enumeration over rational H-polyhedra.

``solve_lp`` maximizes over ``{x : G x <= h}`` by running the simplex kernel
on the row-multiplier problem ``min h.y : G^T y = c, y >= 0``.  That single
solve yields everything at once, exactly:

* the optimal value (LP duality),
* an optimal point -- the kernel's simplex multipliers, which satisfy the
  basic rows with equality, so the point is a vertex whenever the
  polyhedron is pointed,
* nonnegative row multipliers ``y`` with ``y^T G = c`` and ``y^T h = value``
  (the strong-duality certificate), and
* on the failure paths, a Farkas infeasibility certificate or an improving
  ray.

Statuses are exactly {optimal, infeasible, unbounded}; an unbounded
relaxation is a first-class outcome, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from . import kernels
from .core import (
    BudgetError,
    InputError,
    LinearConstraint,
    OrientedSystem,
    Polyhedron,
    UnboundedPolyhedronError,
    Vector,
    box_constraints,
    dot,
    vec,
    zeros,
)

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    """Outcome of an exact LP solve.

    ``dual`` (optimal) and ``farkas`` (infeasible) are multiplier vectors
    over the rows of ``OrientedSystem.from_polyhedron(P)``.
    """

    status: str
    value: Fraction | None = None
    point: Vector | None = None
    dual: Vector | None = None
    farkas: Vector | None = None
    ray: Vector | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == STATUS_OPTIMAL

    @property
    def is_infeasible(self) -> bool:
        return self.status == STATUS_INFEASIBLE

    @property
    def is_unbounded(self) -> bool:
        return self.status == STATUS_UNBOUNDED


def _kernel_dual(system: OrientedSystem, target: Sequence[Fraction]):
    """Run the kernel on ``min h.y : G^T y = target, y >= 0``."""
    k = system.ambient
    m = len(system)
    A = [[system.rows[j][i] for j in range(m)] for i in range(k)]
    return kernels.simplex_min(A, list(target), list(system.rhs))


def solve_lp(P: Polyhedron, c: Sequence[Fraction]) -> LpResult:
    """Maximize ``<c, x>`` over the polyhedron, exactly and deterministically."""
    c = vec(c)
    if len(c) != P.ambient_dim:
        raise InputError(
            f"objective length {len(c)} != ambient dimension {P.ambient_dim}"
        )
    system = OrientedSystem.from_polyhedron(P)
    status, y, value, pi = _kernel_dual(system, c)

    if status == kernels.STATUS_OPTIMAL:
        point = tuple(pi)
        dual = tuple(y)
        _check_optimal(system, c, point, dual, value)
        return LpResult(STATUS_OPTIMAL, value=value, point=point, dual=dual)

    if status == kernels.STATUS_UNBOUNDED:
        # The multiplier problem is unbounded along a ray with G^T ray = c*0
        # ... i.e. ray >= 0, ray^T G = 0, ray^T h < 0: a Farkas certificate
        # that no x satisfies G x <= h.
        farkas = tuple(y)
        _check_farkas(system, farkas)
        return LpResult(STATUS_INFEASIBLE, farkas=farkas)

    # Multiplier problem infeasible: the primal is either unbounded or
    # infeasible.  Decide with the homogeneous multiplier problem.
    status0, y0, _value0, _pi0 = _kernel_dual(system, zeros(P.ambient_dim))
    if status0 == kernels.STATUS_UNBOUNDED:
        farkas = tuple(y0)
        _check_farkas(system, farkas)
        return LpResult(STATUS_INFEASIBLE, farkas=farkas)
    if status0 != kernels.STATUS_OPTIMAL:
        raise AssertionError("homogeneous multiplier problem cannot be infeasible")
    return LpResult(STATUS_UNBOUNDED, ray=_improving_ray(P, c))


def _improving_ray(P: Polyhedron, c: Vector) -> Vector:
    """A recession direction r with G r <= 0 and <c, r> > 0, found by a
    bounded box LP over the recession cone."""
    k = P.ambient_dim
    system = OrientedSystem.from_polyhedron(P)
    rows = [LinearConstraint(row, "<=", Fraction(0)) for row in system.rows]
    cone = Polyhedron(0, k, tuple(rows) + tuple(box_constraints(k, -1, 1)))
    res = solve_lp(cone, c)
    if not res.is_optimal or res.value <= 0:
        raise AssertionError("unbounded LP must admit an improving recession direction")
    return res.point


def _check_optimal(system, c, point, dual, value):
    combo, combo_rhs = system.combine(dual)
    if combo != tuple(c) or combo_rhs != value:
        raise AssertionError("dual certificate algebra failed")
    for row, b in zip(system.rows, system.rhs):
        if dot(row, point) > b:
            raise AssertionError("optimal point violates a constraint")
    if dot(c, point) != value:
        raise AssertionError("optimal point value mismatch")


def _check_farkas(system, farkas):
    combo, combo_rhs = system.combine(farkas)
    if any(v != 0 for v in combo) or combo_rhs >= 0:
        raise AssertionError("Farkas certificate algebra failed")


def check_optimal_certificate(P: Polyhedron, c: Sequence[Fraction], res: LpResult) -> bool:
    """Re-verify an optimal result from scratch: feasibility, nonnegative
    multipliers, ``dual^T G = c`` and ``dual^T h = value``, all exact."""
    if not res.is_optimal or res.point is None or res.dual is None:
        return False
    system = OrientedSystem.from_polyhedron(P)
    try:
        combo, combo_rhs = system.combine(res.dual)
    except InputError:
        return False
    if combo != vec(c) or combo_rhs != res.value:
        return False
    if not P.contains(res.point):
        return False
    return dot(vec(c), res.point) == res.value


def check_infeasible_certificate(P: Polyhedron, res: LpResult) -> bool:
    """Re-verify a Farkas certificate: ``lam >= 0``, ``lam^T G = 0``,
    ``lam^T h < 0``."""
    if not res.is_infeasible or res.farkas is None:
        return False
    system = OrientedSystem.from_polyhedron(P)
    try:
        combo, combo_rhs = system.combine(res.farkas)
    except InputError:
        return False
    return all(v == 0 for v in combo) and combo_rhs < 0


def _solve_square(rows: list[Vector], rhs: list[Fraction]) -> Vector | None:
    """Solve a square rational system by Gaussian elimination; None if
    singular."""
    k = len(rows)
    M = [list(rows[i]) + [rhs[i]] for i in range(k)]
    for col in range(k):
        piv = next((r for r in range(col, k) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = Fraction(1) / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(k):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [a - factor * b for a, b in zip(M[r], M[col])]
    return tuple(M[i][k] for i in range(k))


def is_bounded(P: Polyhedron) -> bool:
    """Exact boundedness test via 2(n+d) coordinate LPs."""
    k = P.ambient_dim
    for i in range(k):
        e = [Fraction(0)] * k
        e[i] = Fraction(1)
        if solve_lp(P, e).is_unbounded:
            return False
        e[i] = Fraction(-1)
        if solve_lp(P, e).is_unbounded:
            return False
    return True


def enumerate_vertices(
    P: Polyhedron,
    subset_budget: int = 2_000_000,
    check_bounded: bool = True,
) -> set[Vector]:
    """All vertices of a bounded polyhedron, exactly, by brute force.

    Every ``ambient``-subset of constraints is solved as an equality system;
    solutions feasible for the whole system are vertices.  This is the
    independent oracle the LP solver is tested against, so it deliberately
    shares no machinery with ``solve_lp``.
    """
    k = P.ambient_dim
    m = len(P.constraints)
    if m >= k and comb(m, k) > subset_budget:
        raise BudgetError(
            f"vertex enumeration needs {comb(m, k)} subsets, budget {subset_budget}"
        )
    if check_bounded and not is_bounded(P):
        raise UnboundedPolyhedronError("polyhedron is unbounded")

    rows = [c.coeffs for c in P.constraints]
    rhs = [c.rhs for c in P.constraints]
    found: set[Vector] = set()
    for subset in combinations(range(m), k):
        point = _solve_square([rows[i] for i in subset], [rhs[i] for i in subset])
        if point is not None and P.contains(point):
            found.add(point)
    return found
