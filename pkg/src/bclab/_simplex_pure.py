"""Pure-Python exact simplex kernel.

Solves the standard-form problem

    minimize  f . y   subject to   A y = b,  y >= 0

over Fractions with the two-phase tableau method and Bland's pivot rule
(lowest eligible column enters, lowest basic index leaves), which makes the
kernel deterministic and cycle-free.

The tableau carries the initial artificial identity block throughout, so the
final simplex multipliers pi = f_B . B^-1 come out for free.  ``pi`` is the
load-bearing extra output: for the row-oriented dual LPs built by
``bclab.lp`` it *is* the primal optimal point.

This module is the reference twin of the compiled kernel
``bclab._simplex_cy``; the two must produce bit-identical results.
"""

from __future__ import annotations

from fractions import Fraction

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


def simplex_min(A, b, f):
    """Run two-phase simplex on ``min f.y : A y = b, y >= 0``.

    Returns one of
        ("optimal", y, value, pi)   y: list of length M, pi: list of length R
        ("infeasible", None, None, None)
        ("unbounded", ray, None, None)   ray: y-direction with A ray = 0,
                                         f.ray < 0, ray >= 0
    """
    R = len(A)
    M = len(f)
    for row in A:
        if len(row) != M:
            raise ValueError("ragged constraint matrix")
    if len(b) != R:
        raise ValueError("rhs length mismatch")

    # Sign-normalize rows so every rhs is nonnegative; remember the flips
    # to report pi in the caller's row convention.
    sign = [1] * R
    T = []
    rhs = []
    for i in range(R):
        if b[i] < 0:
            sign[i] = -1
            T.append([-x for x in A[i]] + [_ZERO] * R)
            rhs.append(-b[i])
        else:
            T.append(list(A[i]) + [_ZERO] * R)
            rhs.append(b[i])
        T[i][M + i] = _ONE

    width = M + R
    basis = [M + i for i in range(R)]
    alive = [True] * R  # rows not yet dropped as dependent

    def pivot(r, c):
        piv = T[r][c]
        if piv != 1:
            inv = _ONE / piv
            T[r] = [x * inv for x in T[r]]
            rhs[r] = rhs[r] * inv
        row_r = T[r]
        for i in range(R):
            if i == r or not alive[i]:
                continue
            factor = T[i][c]
            if factor == 0:
                continue
            row_i = T[i]
            for j in range(width):
                if row_r[j] != 0:
                    row_i[j] = row_i[j] - factor * row_r[j]
            rhs[i] = rhs[i] - factor * rhs[r]
        basis[r] = c

    def run(costs, phase_one):
        """Bland iterations; returns None on optimality, or the entering
        column index that certifies unboundedness."""
        while True:
            in_basis = set(basis[i] for i in range(R) if alive[i])
            entering = -1
            for j in range(M):
                if j in in_basis:
                    continue
                # reduced cost c_j - costs_B . T[.,j], computed lazily
                rc = costs[j]
                for i in range(R):
                    if alive[i]:
                        cb = costs[basis[i]]
                        if cb != 0 and T[i][j] != 0:
                            rc -= cb * T[i][j]
                if rc < 0:
                    entering = j
                    break
            if entering < 0:
                return None
            leave = -1
            best_ratio = None
            for i in range(R):
                if not alive[i]:
                    continue
                t = T[i][entering]
                if t > 0:
                    ratio = rhs[i] / t
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[leave])
                    ):
                        best_ratio = ratio
                        leave = i
            if leave < 0:
                if phase_one:
                    raise AssertionError("phase-one objective is bounded below")
                return entering
            pivot(leave, entering)

    # Phase I: minimize the artificial sum.
    costs1 = [_ZERO] * M + [_ONE] * R
    run(costs1, phase_one=True)
    phase1 = sum((rhs[i] for i in range(R) if alive[i] and basis[i] >= M), _ZERO)
    if phase1 > 0:
        return (STATUS_INFEASIBLE, None, None, None)

    # Drive lingering artificials out; rows that cannot pivot are dependent
    # (their transformed real entries are all zero) and get dropped.
    for i in range(R):
        if not alive[i] or basis[i] < M:
            continue
        col = -1
        for j in range(M):
            if T[i][j] != 0:
                col = j
                break
        if col >= 0:
            pivot(i, col)
        else:
            alive[i] = False

    # Phase II on the caller's objective.
    costs2 = list(f) + [_ZERO] * R
    entering = run(costs2, phase_one=False)
    if entering is not None:
        ray = [_ZERO] * M
        ray[entering] = _ONE
        for i in range(R):
            if alive[i] and basis[i] < M:
                ray[basis[i]] = -T[i][entering]
        return (STATUS_UNBOUNDED, ray, None, None)

    y = [_ZERO] * M
    value = _ZERO
    for i in range(R):
        if alive[i] and basis[i] < M:
            y[basis[i]] = rhs[i]
            if f[basis[i]] != 0:
                value += f[basis[i]] * rhs[i]

    # pi = f_B . B^-1 read off the artificial block, mapped back through the
    # row sign flips.
    pi = [_ZERO] * R
    for i in range(R):
        if not alive[i]:
            continue
        cb = costs2[basis[i]]
        if cb == 0:
            continue
        row_i = T[i]
        for k in range(R):
            if row_i[M + k] != 0:
                pi[k] += cb * row_i[M + k]
    for k in range(R):
        if sign[k] < 0:
            pi[k] = -pi[k]

    return (STATUS_OPTIMAL, y, value, pi)
