# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled exact simplex kernel.

Algorithmically identical to ``bclab._simplex_pure`` (two-phase tableau,
Bland's rule) and must produce bit-identical results.  Rationals are kept
as separate numerator/denominator Python ints (arbitrary precision, always
reduced, denominator > 0), which avoids per-operation ``Fraction`` dispatch
overhead while staying exact.
"""

from fractions import Fraction
from math import gcd

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"


cdef inline tuple q_reduce(object n, object d):
    # d > 0 guaranteed by construction
    if n == 0:
        return (0, 1)
    g = gcd(n, d)
    if g != 1:
        return (n // g, d // g)
    return (n, d)


cdef inline tuple q_sub_mul(object an, object ad, object fn, object fd, object bn, object bd):
    # a - (f * b), all reduced pairs with positive denominators
    cdef object pn = fn * bn
    cdef object pd = fd * bd
    return q_reduce(an * pd - pn * ad, ad * pd)


cdef _pivot(list Tn, list Td, list rhs_n, list rhs_d, list basis, list alive,
            Py_ssize_t R, Py_ssize_t width, Py_ssize_t pr, Py_ssize_t pc):
    cdef Py_ssize_t ii, jj
    cdef list rn = Tn[pr], rd = Td[pr]
    cdef object pn = rn[pc], pd = rd[pc]
    cdef object cn, cd
    cdef tuple t
    cdef list orow_n, orow_d
    if pn != pd:
        apn = pn if pn > 0 else -pn
        spd = pd if pn > 0 else -pd
        for jj in range(width):
            if rn[jj] != 0:
                t = q_reduce(rn[jj] * spd, rd[jj] * apn)
                rn[jj] = t[0]
                rd[jj] = t[1]
        t = q_reduce(rhs_n[pr] * spd, rhs_d[pr] * apn)
        rhs_n[pr] = t[0]
        rhs_d[pr] = t[1]
    for ii in range(R):
        if ii == pr or not alive[ii]:
            continue
        cn = (<list>Tn[ii])[pc]
        if cn == 0:
            continue
        cd = (<list>Td[ii])[pc]
        orow_n = <list>Tn[ii]
        orow_d = <list>Td[ii]
        for jj in range(width):
            if rn[jj] != 0:
                t = q_sub_mul(orow_n[jj], orow_d[jj], cn, cd, rn[jj], rd[jj])
                orow_n[jj] = t[0]
                orow_d[jj] = t[1]
        t = q_sub_mul(rhs_n[ii], rhs_d[ii], cn, cd, rhs_n[pr], rhs_d[pr])
        rhs_n[ii] = t[0]
        rhs_d[ii] = t[1]
    basis[pr] = pc


cdef Py_ssize_t _run(list Tn, list Td, list rhs_n, list rhs_d, list basis, list alive,
                     Py_ssize_t R, Py_ssize_t M, Py_ssize_t width,
                     list cost_n, list cost_d, bint phase_one) except -2:
    # Bland iterations; -1 means optimal, otherwise the entering column
    # certifying unboundedness.
    cdef Py_ssize_t ii, jj, lv, entering_col, bv
    cdef object rn, rd, tn, td, cbn, cand_n, cand_d, best_n, best_d
    cdef tuple t
    cdef set in_basis
    while True:
        in_basis = set()
        for ii in range(R):
            if alive[ii]:
                in_basis.add(basis[ii])
        entering_col = -1
        for jj in range(M):
            if jj in in_basis:
                continue
            rn = cost_n[jj]
            rd = cost_d[jj]
            for ii in range(R):
                if alive[ii]:
                    bv = basis[ii]
                    cbn = cost_n[bv]
                    if cbn != 0 and (<list>Tn[ii])[jj] != 0:
                        t = q_sub_mul(rn, rd, cbn, cost_d[bv],
                                      (<list>Tn[ii])[jj], (<list>Td[ii])[jj])
                        rn = t[0]
                        rd = t[1]
            if rn < 0:
                entering_col = jj
                break
        if entering_col < 0:
            return -1
        lv = -1
        best_n = None
        best_d = None
        for ii in range(R):
            if not alive[ii]:
                continue
            tn = (<list>Tn[ii])[entering_col]
            if tn > 0:
                td = (<list>Td[ii])[entering_col]
                # ratio rhs/t vs best: a/b < c/d  <=>  a*d < c*b  (b, d > 0)
                cand_n = rhs_n[ii] * td
                cand_d = rhs_d[ii] * tn
                if lv < 0 or cand_n * best_d < best_n * cand_d or (
                    cand_n * best_d == best_n * cand_d and basis[ii] < basis[lv]
                ):
                    best_n = cand_n
                    best_d = cand_d
                    lv = ii
        if lv < 0:
            if phase_one:
                raise AssertionError("phase-one objective is bounded below")
            return entering_col
        _pivot(Tn, Td, rhs_n, rhs_d, basis, alive, R, width, lv, entering_col)


def simplex_min(A, b, f):
    """Compiled twin of ``_simplex_pure.simplex_min``; same contract."""
    cdef Py_ssize_t R = len(A)
    cdef Py_ssize_t M = len(f)
    cdef Py_ssize_t width = M + R
    cdef Py_ssize_t i, j, k, entering, piv_col, bv
    for row in A:
        if len(row) != M:
            raise ValueError("ragged constraint matrix")
    if len(b) != R:
        raise ValueError("rhs length mismatch")

    cdef list sign = [1] * R
    cdef list Tn = [], Td = []
    cdef list rhs_n = [0] * R, rhs_d = [1] * R
    cdef list row_n, row_d
    for i in range(R):
        bi = b[i]
        row = A[i]
        row_n = [0] * width
        row_d = [1] * width
        if bi < 0:
            sign[i] = -1
            for j in range(M):
                q = -row[j]
                row_n[j] = q.numerator
                row_d[j] = q.denominator
            rhs_n[i] = (-bi).numerator
            rhs_d[i] = (-bi).denominator
        else:
            for j in range(M):
                q = row[j]
                row_n[j] = q.numerator
                row_d[j] = q.denominator
            rhs_n[i] = bi.numerator
            rhs_d[i] = bi.denominator
        row_n[M + i] = 1
        Tn.append(row_n)
        Td.append(row_d)

    cdef list basis = [M + i for i in range(R)]
    cdef list alive = [True] * R

    cdef list c1n = [0] * M + [1] * R
    cdef list c1d = [1] * width
    _run(Tn, Td, rhs_n, rhs_d, basis, alive, R, M, width, c1n, c1d, True)

    phase1_n = 0
    for i in range(R):
        if alive[i] and basis[i] >= M and rhs_n[i] != 0:
            phase1_n = 1
            break
    if phase1_n:
        return (STATUS_INFEASIBLE, None, None, None)

    for i in range(R):
        if not alive[i] or basis[i] < M:
            continue
        piv_col = -1
        for j in range(M):
            if (<list>Tn[i])[j] != 0:
                piv_col = j
                break
        if piv_col >= 0:
            _pivot(Tn, Td, rhs_n, rhs_d, basis, alive, R, width, i, piv_col)
        else:
            alive[i] = False

    cdef list c2n = [0] * width
    cdef list c2d = [1] * width
    for j in range(M):
        c2n[j] = f[j].numerator
        c2d[j] = f[j].denominator
    entering = _run(Tn, Td, rhs_n, rhs_d, basis, alive, R, M, width, c2n, c2d, False)
    if entering >= 0:
        ray = [Fraction(0)] * M
        ray[entering] = Fraction(1)
        for i in range(R):
            if alive[i] and basis[i] < M:
                ray[basis[i]] = Fraction(-(<list>Tn[i])[entering], (<list>Td[i])[entering])
        return (STATUS_UNBOUNDED, ray, None, None)

    y = [Fraction(0)] * M
    value_n, value_d = 0, 1
    for i in range(R):
        if alive[i] and basis[i] < M:
            bv = basis[i]
            y[bv] = Fraction(rhs_n[i], rhs_d[i])
            if c2n[bv] != 0:
                pn = c2n[bv] * rhs_n[i]
                pd = c2d[bv] * rhs_d[i]
                nn = value_n * pd + pn * value_d
                dd = value_d * pd
                g = gcd(nn, dd)
                if g > 1:
                    nn //= g
                    dd //= g
                value_n, value_d = nn, dd
    value = Fraction(value_n, value_d)

    pi_n = [0] * R
    pi_d = [1] * R
    for i in range(R):
        if not alive[i]:
            continue
        bv = basis[i]
        cbn = c2n[bv]
        if cbn == 0:
            continue
        cbd = c2d[bv]
        row_n = <list>Tn[i]
        row_d = <list>Td[i]
        for k in range(R):
            if row_n[M + k] != 0:
                pn = cbn * row_n[M + k]
                pd = cbd * row_d[M + k]
                nn = pi_n[k] * pd + pn * pi_d[k]
                dd = pi_d[k] * pd
                g = gcd(nn, dd)
                if g > 1:
                    nn //= g
                    dd //= g
                pi_n[k] = nn
                pi_d[k] = dd
    pi = [Fraction(0)] * R
    for k in range(R):
        if sign[k] < 0:
            pi[k] = Fraction(-pi_n[k], pi_d[k])
        else:
            pi[k] = Fraction(pi_n[k], pi_d[k])

    return (STATUS_OPTIMAL, y, value, pi)
