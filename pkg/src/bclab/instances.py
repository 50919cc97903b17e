"""Instance families: even-weight knapsack (Jeroslow), the Cook-Kannan-
Schrijver tetrahedron, thin triangles, and a seeded random LP corpus.

All generators emit exact H-representations with variable bounds as
ordinary constraints.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .core import (
    GOAL_BOUND,
    GOAL_INFEASIBLE,
    InputError,
    Instance,
    LinearConstraint,
    Polyhedron,
    Vector,
    box_constraints,
    con,
    dot,
    vec,
)


def _check_odd(n: int, minimum: int = 3) -> None:
    if n < minimum or n % 2 == 0:
        raise InputError(f"n must be an odd number >= {minimum}, got {n}")


def jeroslow_inequality(n: int) -> Instance:
    """Maximize sum(x) over ``{2 sum(x) <= n} n [0,1]^n``; the integer
    optimum is floor(n/2) while the LP relaxation reaches n/2."""
    _check_odd(n)
    rows = [con([2] * n, "<=", n)] + box_constraints(n)
    return Instance(
        Polyhedron(n, 0, tuple(rows)),
        vec([1] * n),
        Fraction(n // 2),
        GOAL_BOUND,
    )


def jeroslow_equality(n: int) -> Instance:
    """The equality variant ``2 sum(x) = n`` on the 0/1 box: LP-feasible at
    the all-halves point but integer-infeasible by parity."""
    _check_odd(n, minimum=1)
    rows = [con([2] * n, "=", n)] + box_constraints(n)
    return Instance(
        Polyhedron(n, 0, tuple(rows)),
        vec([1] * n),
        Fraction(n // 2),
        GOAL_INFEASIBLE,
    )


def jeroslow_partial_objective(n: int) -> Instance:
    """Same polytope as `jeroslow_inequality` but maximizing only the first
    ceil(n/2) coordinates; the bound floor(n/2) admits a linear-size
    variable-branching proof while every sparse cut is trivial."""
    _check_odd(n)
    half_up = (n + 1) // 2
    rows = [con([2] * n, "<=", n)] + box_constraints(n)
    objective = vec([1] * half_up + [0] * (n - half_up))
    return Instance(
        Polyhedron(n, 0, tuple(rows)),
        objective,
        Fraction(n // 2),
        GOAL_BOUND,
    )


def _nullspace_vector(rows: list[Vector], k: int) -> Vector | None:
    """One nonzero vector orthogonal to all rows (None if the rows span)."""
    M = [list(r) for r in rows]
    pivots: list[tuple[int, int]] = []  # (row, col)
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = Fraction(1) / M[r][col]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append((r, col))
        r += 1
    pivot_cols = {c for _, c in pivots}
    free = next((c for c in range(k) if c not in pivot_cols), None)
    if free is None:
        return None
    x = [Fraction(0)] * k
    x[free] = Fraction(1)
    for row_i, col in pivots:
        x[col] = -M[row_i][free]
    return tuple(x)


def simplex_facets(vertices: list[Vector]) -> list[LinearConstraint]:
    """Facet inequalities of a full-dimensional simplex, from its k+1
    affinely independent vertices, in primitive integer form."""
    k = len(vertices[0])
    if len(vertices) != k + 1:
        raise InputError("a k-simplex needs exactly k+1 vertices")
    facets = []
    for omit in range(k + 1):
        pts = [vertices[i] for i in range(k + 1) if i != omit]
        base = pts[0]
        diffs = [tuple(p[j] - base[j] for j in range(k)) for p in pts[1:]]
        normal = _nullspace_vector(diffs, k)
        if normal is None:
            raise InputError("vertices are affinely dependent")
        offset = dot(normal, base)
        inside = dot(normal, vertices[omit])
        if inside == offset:
            raise InputError("vertices are affinely dependent")
        if inside > offset:
            normal = tuple(-v for v in normal)
            offset = -offset
        facets.append(LinearConstraint(vec(normal), "<=", offset).primitive())
    return facets


def cks_tetrahedron(h: int, apex_integer: bool = True) -> Instance:
    """The Cook-Kannan-Schrijver tetrahedron
    ``conv{(0,0,0), (2,0,0), (0,2,0), (1/2, 1/2, h)}`` with objective x_3
    and bound 0.

    Facets are derived from the vertex list by exact hull computation.  The
    height coordinate is integer-constrained by default;
    ``apex_integer=False`` makes it continuous (both variants appear in the
    literature and the proofs work for either).
    """
    if h < 1:
        raise InputError(f"h must be a positive integer, got {h}")
    verts = [
        vec([0, 0, 0]),
        vec([2, 0, 0]),
        vec([0, 2, 0]),
        (Fraction(1, 2), Fraction(1, 2), Fraction(h)),
    ]
    facets = simplex_facets(verts)
    for v in verts:
        if not all(c.satisfied_by(v) for c in facets):
            raise AssertionError("hull self-test failed: vertex outside facets")
    dim_int = 3 if apex_integer else 2
    return Instance(
        Polyhedron(dim_int, 3 - dim_int, tuple(facets)),
        vec([0, 0, 1]),
        Fraction(0),
        GOAL_BOUND,
    )


def thin_triangle(h: int) -> Instance:
    """``conv{(0,0), (1,0), (1/2, h)}`` with objective x_2 and bound 0: one
    variable disjunction on x_1 proves it, while a single Chvatal-Gomory
    round cannot."""
    if h < 1:
        raise InputError(f"h must be a positive integer, got {h}")
    rows = [
        con([0, 1], ">=", 0),
        con([2 * h, -1], ">=", 0),
        con([2 * h, 1], "<=", 2 * h),
    ]
    return Instance(
        Polyhedron(2, 0, tuple(rows)),
        vec([0, 1]),
        Fraction(0),
        GOAL_BOUND,
    )


def random_lp_corpus(
    count: int, seed: int, max_dim: int = 4
) -> list[tuple[Polyhedron, Vector]]:
    """Seeded corpus of bounded low-dimensional LPs with integer data in
    [-5, 5] and explicit box bounds (possibly empty feasible sets)."""
    rng = random.Random(seed)
    out: list[tuple[Polyhedron, Vector]] = []
    for _ in range(count):
        k = rng.randint(1, max_dim)
        n_int = rng.randint(0, k)
        rows: list[LinearConstraint] = []
        for i in range(k):
            lo = rng.randint(-2, 0)
            hi = rng.randint(lo + 1, 2)
            e = [0] * k
            e[i] = 1
            rows.append(con(e, ">=", lo))
            rows.append(con(e, "<=", hi))
        for _ in range(rng.randint(1, 5)):
            coeffs = [rng.randint(-5, 5) for _ in range(k)]
            rows.append(con(coeffs, "<=", rng.randint(-6, 8)))
        c = vec([rng.randint(-5, 5) for _ in range(k)])
        out.append((Polyhedron(n_int, k - n_int, tuple(rows)), c))
    return out
