"""Disjunction families and certified cutting planes.

A disjunction is a finite union of polyhedral terms covering the integer
lattice.  Three checkable templates exist:

* split: ``{pi.x <= pi0} u {pi.x >= pi0+1}`` for integral pi supported on
  integer variables (unit pi gives a variable disjunction);
* interval partition: consecutive integer intervals on one variable tiling Z;
* split refinement: a split whose upper side is intersected with the terms
  of another checkable disjunction (coverage follows by induction).

A cutting plane is a ``<=`` halfspace together with a certificate that
makes validity a pure algebra check: either Chvatal-Gomory row multipliers
or, per disjunction term, a Farkas witness that the term's system dominates
the cut (or is infeasible outright).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import kernels
from .core import (
    InputError,
    LinearConstraint,
    OrientedSystem,
    Polyhedron,
    Vector,
    dot,
    primitive_vector,
    rat,
    vec,
)
from .lp import solve_lp


@dataclass(frozen=True)
class SplitTemplate:
    pi: tuple[int, ...]
    pi0: int


@dataclass(frozen=True)
class IntervalPartitionTemplate:
    index: int
    cuts: tuple[int, ...]  # ascending thresholds; k = len(cuts) + 1 terms


@dataclass(frozen=True)
class SplitRefinementTemplate:
    pi: tuple[int, ...]
    pi0: int
    inner: "Disjunction"


Template = SplitTemplate | IntervalPartitionTemplate | SplitRefinementTemplate


@dataclass(frozen=True)
class Disjunction:
    """A union of polyhedral terms covering ``Z^n x R^d``, by template."""

    n: int
    d: int
    template: Template

    @property
    def ambient(self) -> int:
        return self.n + self.d

    @property
    def terms(self) -> tuple[tuple[LinearConstraint, ...], ...]:
        t = self.template
        if isinstance(t, SplitTemplate):
            coeffs = vec(t.pi)
            return (
                (LinearConstraint(coeffs, "<=", rat(t.pi0)),),
                (LinearConstraint(coeffs, ">=", rat(t.pi0 + 1)),),
            )
        if isinstance(t, IntervalPartitionTemplate):
            e = tuple(
                Fraction(1 if j == t.index else 0) for j in range(self.ambient)
            )
            out: list[tuple[LinearConstraint, ...]] = []
            out.append((LinearConstraint(e, "<=", rat(t.cuts[0])),))
            for lo, hi in zip(t.cuts, t.cuts[1:]):
                out.append(
                    (
                        LinearConstraint(e, ">=", rat(lo + 1)),
                        LinearConstraint(e, "<=", rat(hi)),
                    )
                )
            out.append((LinearConstraint(e, ">=", rat(t.cuts[-1] + 1)),))
            return tuple(out)
        coeffs = vec(t.pi)
        lower = LinearConstraint(coeffs, "<=", rat(t.pi0))
        upper = LinearConstraint(coeffs, ">=", rat(t.pi0 + 1))
        out = [(lower,)]
        for term in t.inner.terms:
            out.append((upper,) + term)
        return tuple(out)

    @property
    def k(self) -> int:
        return len(self.terms)

    def sparsity(self) -> int:
        """Max primitive-form sparsity over all term inequalities."""
        return max(
            c.primitive().sparsity() for term in self.terms for c in term
        )

    @property
    def is_split(self) -> bool:
        return isinstance(self.template, SplitTemplate)

    @property
    def is_variable(self) -> bool:
        t = self.template
        return (
            isinstance(t, SplitTemplate)
            and sum(1 for v in t.pi if v != 0) == 1
            and all(v in (0, 1) for v in t.pi)
        )

    def term_containing(self, point: Sequence[Fraction]) -> int | None:
        for idx, term in enumerate(self.terms):
            if all(c.satisfied_by(point) for c in term):
                return idx
        return None

    def contains(self, point: Sequence[Fraction]) -> bool:
        return self.term_containing(point) is not None

    def sort_key(self):
        """Deterministic ordering key (used for tie-breaking in strategies)."""
        t = self.template
        if isinstance(t, SplitTemplate):
            return (0, t.pi, t.pi0)
        if isinstance(t, IntervalPartitionTemplate):
            return (1, t.index, t.cuts)
        return (2, t.pi, t.pi0, t.inner.sort_key())


def validate_disjunction(D: Disjunction) -> tuple[bool, str | None]:
    """Check the structural coverage guarantees of a disjunction's template."""
    t = D.template
    if isinstance(t, (SplitTemplate, SplitRefinementTemplate)):
        if len(t.pi) != D.ambient:
            return False, "split vector length mismatch"
        if any(not isinstance(v, int) for v in t.pi):
            return False, "split vector must be integral"
        if all(v == 0 for v in t.pi):
            return False, "split vector must be nonzero"
        if any(t.pi[j] != 0 for j in range(D.n, D.ambient)):
            return False, "split touches a continuous coordinate"
        if not isinstance(t.pi0, int):
            return False, "split threshold must be integral"
        if isinstance(t, SplitRefinementTemplate):
            if (t.inner.n, t.inner.d) != (D.n, D.d):
                return False, "refinement dimensions mismatch"
            ok, reason = validate_disjunction(t.inner)
            if not ok:
                return False, f"refinement: {reason}"
        return True, None
    if isinstance(t, IntervalPartitionTemplate):
        if not 0 <= t.index < D.n:
            return False, "interval partition must be on an integer variable"
        if not t.cuts:
            return False, "interval partition needs at least one threshold"
        if any(not isinstance(v, int) for v in t.cuts):
            return False, "interval thresholds must be integral"
        if any(a >= b for a, b in zip(t.cuts, t.cuts[1:])):
            return False, "interval thresholds must be strictly ascending"
        return True, None
    return False, f"unknown template {type(t).__name__}"


def _checked(D: Disjunction) -> Disjunction:
    ok, reason = validate_disjunction(D)
    if not ok:
        raise InputError(reason)
    return D


def make_split(pi: Sequence[int], pi0: int, n: int, d: int) -> Disjunction:
    """The split ``{pi.x <= pi0} u {pi.x >= pi0+1}``.

    pi must be integral, nonzero, and zero on the d continuous coordinates.
    """
    return _checked(Disjunction(n, d, SplitTemplate(tuple(pi), pi0)))


def make_variable_disjunction(i: int, pi0: int, n: int, d: int) -> Disjunction:
    """``{x_i <= pi0} u {x_i >= pi0+1}`` on integer variable i."""
    if not 0 <= i < n:
        raise InputError(f"variable index {i} out of the integer range")
    pi = tuple(1 if j == i else 0 for j in range(n + d))
    return make_split(pi, pi0, n, d)


def make_interval_partition(i: int, cuts: Sequence[int], n: int, d: int) -> Disjunction:
    """Axis-aligned partition of Z along variable i at the given thresholds."""
    return _checked(Disjunction(n, d, IntervalPartitionTemplate(i, tuple(cuts))))


def make_split_refinement(
    pi: Sequence[int], pi0: int, inner: Disjunction
) -> Disjunction:
    """Split on ``pi.x`` at pi0 with the upper side refined by ``inner``'s
    terms; covers the lattice whenever ``inner`` does."""
    return _checked(
        Disjunction(inner.n, inner.d, SplitRefinementTemplate(tuple(pi), pi0, inner))
    )


@dataclass(frozen=True)
class FarkasWitness:
    """Nonnegative multipliers over oriented(N) ++ oriented(term) rows.

    kind "dominates": the combination equals the cut coefficients with a
    rhs at most the cut's rhs.  kind "infeasible": the combination is
    ``0 <= negative``.
    """

    kind: str
    multipliers: Vector

    def __post_init__(self):
        if self.kind not in ("dominates", "infeasible"):
            raise InputError(f"unknown witness kind {self.kind!r}")


@dataclass(frozen=True)
class CgCertificate:
    multipliers: Vector


@dataclass(frozen=True)
class DisjunctiveCertificate:
    disjunction: Disjunction
    witnesses: tuple[FarkasWitness, ...]


Certificate = CgCertificate | DisjunctiveCertificate


@dataclass(frozen=True)
class CuttingPlane:
    halfspace: LinearConstraint
    certificate: Certificate

    def __post_init__(self):
        if self.halfspace.relation != "<=":
            raise InputError("cutting planes are <= halfspaces")

    def sparsity(self) -> int:
        return self.halfspace.primitive().sparsity()


@dataclass(frozen=True)
class CutCheck:
    """Result of certificate verification; falsy with a reason on failure."""

    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def term_system(N: Polyhedron, term: Sequence[LinearConstraint]) -> OrientedSystem:
    """Oriented rows of ``N`` intersected with a disjunction term; this row
    order is the indexing convention for Farkas witnesses."""
    return OrientedSystem.from_polyhedron(N.with_constraints(term))


def generate_cg_cut(P: Polyhedron, lam: Sequence[Fraction]) -> CuttingPlane:
    """The Chvatal-Gomory cut ``(lam G) x <= floor(lam h)``.

    ``lam`` indexes the ``<=``-oriented rows of P
    (``OrientedSystem.from_polyhedron``).  The combined coefficients must be
    integral on the integer coordinates and zero on the continuous ones.
    """
    system = OrientedSystem.from_polyhedron(P)
    lam = vec(lam)
    combo, combo_rhs = system.combine(lam)  # raises on negatives / bad length
    for j in range(P.dim_int):
        if combo[j].denominator != 1:
            raise InputError(
                f"combined coefficient on integer coordinate {j} is not integral"
            )
    for j in range(P.dim_int, P.ambient_dim):
        if combo[j] != 0:
            raise InputError(
                f"combined coefficient on continuous coordinate {j} is nonzero"
            )
    floor_rhs = Fraction(combo_rhs.numerator // combo_rhs.denominator)
    halfspace = LinearConstraint(combo, "<=", floor_rhs)
    return CuttingPlane(halfspace, CgCertificate(lam))


def best_cg_multipliers(
    P: Polyhedron, target: Sequence[Fraction]
) -> Vector | None:
    """Nonnegative row multipliers with ``lam G = target`` minimizing
    ``lam h`` (hence the strongest CG rhs for this coefficient vector), or
    None when the target is not a nonnegative row combination."""
    system = OrientedSystem.from_polyhedron(P)
    target = vec(target)
    if len(target) != P.ambient_dim:
        raise InputError("target length != ambient dimension")
    k = P.ambient_dim
    m = len(system)
    A = [[system.rows[j][i] for j in range(m)] for i in range(k)]
    status, y, _value, _pi = kernels.simplex_min(A, list(target), list(system.rhs))
    if status != kernels.STATUS_OPTIMAL:
        return None
    return tuple(y)


def generate_disjunctive_cut(
    P: Polyhedron, D: Disjunction, xstar: Sequence[Fraction]
) -> CuttingPlane | None:
    """Most-violated valid cut separating ``xstar`` from ``P n D``.

    Solves the cut-generating LP under the multiplier-sum-one
    normalization; every feasible term gets a dominance witness, every
    infeasible term a Farkas infeasibility witness.  Returns None when no
    separating valid inequality exists under the normalization.
    """
    xstar = vec(xstar)
    if D.ambient != P.ambient_dim or len(xstar) != P.ambient_dim:
        raise InputError("dimension mismatch between polyhedron, disjunction, point")
    if D.contains(xstar):
        raise InputError("point to separate lies in a disjunction term")

    terms = D.terms
    systems = [term_system(P, term) for term in terms]
    feasible: list[int] = []
    infeasible_witnesses: dict[int, FarkasWitness] = {}
    for idx, term in enumerate(terms):
        probe = solve_lp(P.with_constraints(term), [Fraction(0)] * P.ambient_dim)
        if probe.is_infeasible:
            infeasible_witnesses[idx] = FarkasWitness("infeasible", probe.farkas)
        else:
            feasible.append(idx)

    k = P.ambient_dim
    if not feasible:
        # P n D is empty; 0 <= -1 is a valid cut and all witnesses are
        # infeasibility certificates.
        halfspace = LinearConstraint(vec([0] * k), "<=", Fraction(-1))
        wits = tuple(infeasible_witnesses[i] for i in range(len(terms)))
        return CuttingPlane(halfspace, DisjunctiveCertificate(D, wits))

    # CGLP variables: a (k, free), delta (free), then u_t >= 0 per feasible
    # term over that term's oriented rows.
    sizes = [len(systems[i]) for i in feasible]
    total = k + 1 + sum(sizes)
    offs = []
    off = k + 1
    for s in sizes:
        offs.append(off)
        off += s

    rows: list[LinearConstraint] = []

    def row(coeffs: dict[int, Fraction], relation: str, rhs) -> None:
        full = [Fraction(0)] * total
        for idx2, v in coeffs.items():
            full[idx2] = v
        rows.append(LinearConstraint(tuple(full), relation, rat(rhs)))

    for pos, t_idx in enumerate(feasible):
        sysm = systems[t_idx]
        base = offs[pos]
        for j in range(k):
            coeffs = {j: Fraction(-1)}
            for r in range(len(sysm)):
                g = sysm.rows[r][j]
                if g != 0:
                    coeffs[base + r] = g
            row(coeffs, "=", 0)
        coeffs = {k: Fraction(-1)}
        for r in range(len(sysm)):
            if sysm.rhs[r] != 0:
                coeffs[base + r] = sysm.rhs[r]
        row(coeffs, "<=", 0)
    norm = {base + r: Fraction(1) for base, s in zip(offs, sizes) for r in range(s)}
    row(norm, "=", 1)
    for pos, s in enumerate(sizes):
        for r in range(s):
            row({offs[pos] + r: Fraction(1)}, ">=", 0)

    objective = [Fraction(0)] * total
    for j in range(k):
        objective[j] = xstar[j]
    objective[k] = Fraction(-1)

    cglp = Polyhedron(0, total, tuple(rows))
    res = solve_lp(cglp, objective)
    if not res.is_optimal:
        raise AssertionError("cut-generating LP must be solvable under normalization")
    if res.value <= 0:
        return None

    a = res.point[:k]
    delta = res.point[k]
    prim, scale = primitive_vector(a)
    if all(v == 0 for v in prim):
        scale = Fraction(1)
    halfspace = LinearConstraint(vec(prim), "<=", delta * scale)

    witnesses: list[FarkasWitness] = []
    for idx in range(len(terms)):
        if idx in infeasible_witnesses:
            witnesses.append(infeasible_witnesses[idx])
        else:
            pos = feasible.index(idx)
            base = offs[pos]
            mult = tuple(res.point[base + r] * scale for r in range(sizes[pos]))
            witnesses.append(FarkasWitness("dominates", mult))
    return CuttingPlane(halfspace, DisjunctiveCertificate(D, tuple(witnesses)))


def verify_cut(N: Polyhedron, cut: CuttingPlane) -> CutCheck:
    """Exact certificate check of a cutting plane against relaxation N.

    CG: multipliers are nonnegative, reproduce the cut coefficients exactly,
    satisfy the integrality conditions, and ``floor(lam h) <= rhs``.
    Disjunctive: every term's witness dominates the cut or proves the term
    infeasible.  Malformed certificates yield a falsy result with a reason.
    """
    cert = cut.certificate
    a, delta = cut.halfspace.coeffs, cut.halfspace.rhs
    if isinstance(cert, CgCertificate):
        system = OrientedSystem.from_polyhedron(N)
        try:
            combo, combo_rhs = system.combine(cert.multipliers)
        except InputError as exc:
            return CutCheck(False, f"cg-multipliers: {exc}")
        if combo != a:
            return CutCheck(False, "cg-coefficient-mismatch")
        for j in range(N.dim_int):
            if combo[j].denominator != 1:
                return CutCheck(False, "cg-nonintegral-coefficient")
        for j in range(N.dim_int, N.ambient_dim):
            if combo[j] != 0:
                return CutCheck(False, "cg-continuous-coefficient")
        floor_rhs = combo_rhs.numerator // combo_rhs.denominator
        if delta < floor_rhs:
            return CutCheck(False, "cg-rhs-too-strong")
        return CutCheck(True)

    if isinstance(cert, DisjunctiveCertificate):
        D = cert.disjunction
        ok, reason = validate_disjunction(D)
        if not ok:
            return CutCheck(False, f"disjunction: {reason}")
        if D.ambient != N.ambient_dim:
            return CutCheck(False, "disjunction-dimension-mismatch")
        terms = D.terms
        if len(cert.witnesses) != len(terms):
            return CutCheck(False, "witness-count-mismatch")
        for idx, (term, wit) in enumerate(zip(terms, cert.witnesses)):
            system = term_system(N, term)
            try:
                combo, combo_rhs = system.combine(wit.multipliers)
            except InputError as exc:
                return CutCheck(False, f"term {idx}: {exc}")
            if wit.kind == "dominates":
                if combo != a or combo_rhs > delta:
                    return CutCheck(False, f"term {idx}: domination fails")
            else:
                if any(v != 0 for v in combo) or combo_rhs >= 0:
                    return CutCheck(False, f"term {idx}: infeasibility fails")
        return CutCheck(True)

    return CutCheck(False, f"unknown certificate {type(cert).__name__}")


def cg_to_split_certified(N: Polyhedron, cut: CuttingPlane) -> CuttingPlane:
    """Re-certify a CG cut as a disjunctive cut over its defining split.

    The cut is first brought to primitive integral form ``pi x <= pi0``
    (coefficients coprime, rhs floored).  Over the split
    ``{pi x <= pi0} u {pi x >= pi0+1}`` the lower term contains the cut as
    its own row, and on the upper term the scaled CG multipliers plus one
    unit of the term row derive ``0 <= negative``.  The returned cut implies
    the input cut.
    """
    if not isinstance(cut.certificate, CgCertificate):
        raise InputError("expected a CG-certified cut")
    check = verify_cut(N, cut)
    if not check:
        raise InputError(f"cut does not verify against the relaxation: {check.reason}")
    ints, scale = primitive_vector(cut.halfspace.coeffs)
    if any(v == 0 for v in ints) and all(v == 0 for v in ints):
        raise InputError("cannot split on an all-zero cut")
    scaled_rhs = cut.halfspace.rhs * scale
    pi0 = scaled_rhs.numerator // scaled_rhs.denominator
    pi = tuple(ints)
    halfspace = LinearConstraint(vec(pi), "<=", Fraction(pi0))
    D = make_split(pi, pi0, N.dim_int, N.dim_cont)
    m = len(OrientedSystem.from_polyhedron(N))
    # lower term: one unit of the term row itself (row index m)
    lower = FarkasWitness("dominates", tuple([Fraction(0)] * m) + (Fraction(1),))
    # upper term: scaled CG multipliers plus one unit of the negated term row;
    # the combination is 0 <= scale*(lam h) - pi0 - 1 < 0 because the cut
    # coefficients are integral, so scale = 1/g <= 1.
    lam = tuple(v * scale for v in cut.certificate.multipliers)
    upper = FarkasWitness("infeasible", lam + (Fraction(1),))
    return CuttingPlane(halfspace, DisjunctiveCertificate(D, (lower, upper)))


def filter_by_sparsity(items, s: int, ambient: int):
    """Restrict a cut/disjunction family to max inequality sparsity <= s."""
    if not 1 <= s <= ambient:
        raise InputError(f"sparsity parameter {s} outside [1, {ambient}]")
    return [item for item in items if item.sparsity() <= s]
