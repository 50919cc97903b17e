"""Counting and classification machinery behind the size lower bounds.

Everything here is exact combinatorics at desk scale: true/false split
tagging against explicit 0/1 point sets, generation counting, the
closed-form census of optimal LP vertices inside a split set together with
its binomial bound, antichain-style solution counting, the sparse-cut
triviality test, and an exhaustive one-round Chvatal-Gomory search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb

from .core import (
    InputError,
    Instance,
    LinearConstraint,
    OrientedSystem,
    Polyhedron,
    Vector,
)
from .cuts import CuttingPlane, SplitTemplate, generate_cg_cut
from .lp import solve_lp
from .proofs import Cut, Leaf, ProofTree


def is_01_boxed(P: Polyhedron) -> bool:
    """True iff every coordinate is confined to [0, 1] by the constraints."""
    k = P.ambient_dim
    for i in range(k):
        e = [Fraction(0)] * k
        e[i] = Fraction(1)
        hi = solve_lp(P, e)
        if hi.is_unbounded or (hi.is_optimal and hi.value > 1):
            return False
        if hi.is_infeasible:
            return True  # empty set is vacuously boxed
        e[i] = Fraction(-1)
        lo = solve_lp(P, e)
        if lo.is_unbounded or (lo.is_optimal and lo.value > 0):
            return False
    return True


def binary_points(P: Polyhedron, max_enumeration: int = 1 << 20) -> list[Vector]:
    """All 0/1 points satisfying a pure-integer polyhedron's constraints."""
    if P.dim_cont != 0:
        raise InputError("binary enumeration needs a pure-integer polyhedron")
    n = P.dim_int
    if 1 << n > max_enumeration:
        raise InputError(f"2^{n} exceeds the enumeration guard")
    out = []
    for bits in product((Fraction(0), Fraction(1)), repeat=n):
        if P.contains(bits):
            out.append(bits)
    return out


@dataclass(frozen=True)
class SplitClassification:
    """Per-branch true/false tags and per-node generation data.

    ``tags[nid]`` is True when the disjunction applied at branch node
    ``nid`` splits that node's 0/1 point set into two nonempty parts.
    ``generation_sets[nid]`` is the union of the supports of the true splits
    on the root path (empty at the root); ``generations[nid]`` its count of
    true splits; ``point_counts[nid]`` the surviving 0/1 points.
    """

    tags: dict[int, bool]
    generation_sets: dict[int, frozenset[int]]
    generations: dict[int, int]
    point_counts: dict[int, int]


def classify_splits(tree: ProofTree, max_enumeration: int = 1 << 20) -> SplitClassification:
    """Tag every split on a pure-branching 0/1 proof tree as true or false
    against its parent's surviving integer points (Definition-style
    classification with explicit point sets)."""
    inst = tree.instance
    if inst.dim_cont != 0:
        raise InputError("classification needs a pure-integer instance")
    if not is_01_boxed(inst.polyhedron):
        raise InputError("classification needs a 0/1-boxed instance")
    root_points = binary_points(inst.polyhedron, max_enumeration)

    tags: dict[int, bool] = {}
    gen_sets: dict[int, frozenset[int]] = {}
    gens: dict[int, int] = {}
    counts: dict[int, int] = {}

    def walk(nid: int, points: tuple[Vector, ...], I: frozenset[int], m: int) -> None:
        node = tree.nodes[nid]
        gen_sets[nid] = I
        gens[nid] = m
        counts[nid] = len(points)
        kind = node.kind
        if isinstance(kind, Cut):
            raise InputError("classification needs a pure branch-and-bound tree")
        if isinstance(kind, Leaf) or kind is None:
            return
        D = kind.disjunction
        if not isinstance(D.template, SplitTemplate):
            raise InputError("classification needs split disjunctions")
        terms = D.terms
        parts = []
        for term in terms:
            parts.append(
                tuple(p for p in points if all(c.satisfied_by(p) for c in term))
            )
        true_split = all(part for part in parts)
        tags[nid] = true_split
        support = frozenset(
            j for j, v in enumerate(D.template.pi) if v != 0
        )
        child_I = I | support if true_split else I
        child_m = m + 1 if true_split else m
        for child, part in zip(kind.children, parts):
            walk(child, part, child_I, child_m)

    walk(tree.root_id, tuple(root_points), frozenset(), 0)
    return SplitClassification(tags, gen_sets, gens, counts)


def count_generation_nodes(
    tree: ProofTree, classification: SplitClassification, m: int
) -> int:
    """Nodes still containing an integer point whose root path used exactly
    m true splits."""
    return sum(
        1
        for nid in tree.nodes
        if classification.point_counts.get(nid, 0) >= 1
        and classification.generations.get(nid) == m
    )


def optimal_vertices(n: int):
    """The optimal LP vertices of the even-weight knapsack instance: one
    coordinate 1/2, floor(n/2) coordinates 1, the rest 0.  Yields exact
    vectors; there are n * C(n-1, floor(n/2)) of them."""
    if n < 3 or n % 2 == 0:
        raise InputError("n must be an odd number >= 3")
    half = Fraction(1, 2)
    k = n // 2
    for ell in range(n):
        rest = [j for j in range(n) if j != ell]
        for ones in combinations(rest, k):
            point = [Fraction(0)] * n
            point[ell] = half
            for j in ones:
                point[j] = Fraction(1)
            yield tuple(point)


def optimal_vertex_total(n: int) -> int:
    """Closed-form count of the optimal LP vertices, n * C(n-1, floor(n/2))."""
    return n * comb(n - 1, n // 2)


def count_vertices_in_split(n: int, D) -> int:
    """How many optimal LP vertices of the even-weight knapsack instance lie
    strictly inside the split set of D.

    For integral split data ``(a, b)`` the strict-interior condition is
    exactly ``<a, x> = b + 1/2``, tested here as ``2<a, x> = 2b + 1`` in
    integer arithmetic over the closed-form vertex family.
    """
    if not isinstance(D.template, SplitTemplate):
        raise InputError("expected an integral split disjunction")
    a = D.template.pi
    b = D.template.pi0
    if len(a) != n:
        raise InputError("split dimension mismatch")
    target = 2 * b + 1
    count = 0
    k = n // 2
    for ell in range(n):
        # contribution of the 1/2 coordinate
        base = a[ell]  # times 2 * (1/2) = a[ell]
        rest = [j for j in range(n) if j != ell]
        for ones in combinations(rest, k):
            s = base
            for j in ones:
                s += 2 * a[j]
            if s == target:
                count += 1
    return count


def split_vertex_bound(n: int, t: int) -> int:
    """The binomial bound ``t * C(t-1, floor(t/2)) * C(n-t, floor(n/2) -
    floor(t/2))`` on the number of optimal vertices a sparsity-t split can
    cover."""
    if not 1 <= t <= n // 2:
        raise InputError(f"t must lie in [1, {n // 2}], got {t}")
    return t * comb(t - 1, t // 2) * comb(n - t, n // 2 - t // 2)


def count_binary_solutions(w, W: int) -> int:
    """Exact number of 0/1 solutions of ``sum w_j x_j = W`` (all w_j
    nonzero); by Sperner's antichain theorem this never exceeds
    ``C(k, floor(k/2))``."""
    w = list(w)
    if any(v == 0 for v in w):
        raise InputError("weights must be nonzero")
    if len(w) > 24:
        raise InputError("enumeration guard: at most 24 weights")
    count = 0
    for bits in product((0, 1), repeat=len(w)):
        if sum(v * x for v, x in zip(w, bits)) == W:
            count += 1
    return count


def binary_solution_bound(k: int) -> int:
    return comb(k, k // 2)


def _knapsack_max(a: Vector, n: int) -> Fraction:
    """Max of <a, x> over the 0/1 points with at most floor(n/2) ones: the
    sum of the floor(n/2) largest positive coefficients."""
    positives = sorted((v for v in a if v > 0), reverse=True)
    return sum(positives[: n // 2], Fraction(0))


def sparse_cut_is_trivial(n: int, cut: LinearConstraint) -> bool:
    """Is a cut that is valid for the even-weight knapsack's integer points
    also valid for the whole 0/1 box?

    The caller-supplied cut is validity-checked first (exactly, via the
    closed-form knapsack maximum); then the ``2^support`` box patterns are
    tested.  Cuts with support at most floor(n/2) always come out trivial.
    """
    if cut.relation != "<=":
        raise InputError("expected a <= cut")
    if len(cut.coeffs) != n:
        raise InputError("cut dimension mismatch")
    if _knapsack_max(cut.coeffs, n) > cut.rhs:
        raise InputError("cut is not valid for the instance's integer points")
    support = cut.support()
    total = Fraction(0)
    for bits in product((0, 1), repeat=len(support)):
        s = sum(
            (cut.coeffs[j] for j, b in zip(support, bits) if b), Fraction(0)
        )
        if s > cut.rhs:
            return False
    return True


def proper_fractions(max_denominator: int) -> list[Fraction]:
    """All rationals in [0, 1) with denominator at most ``max_denominator``,
    ascending."""
    out = {Fraction(0)}
    for q in range(2, max_denominator + 1):
        for p in range(1, q):
            out.add(Fraction(p, q))
    return sorted(out)


def single_cg_round_search(
    inst: Instance, max_denominator: int, max_rows: int = 4
) -> CuttingPlane | None:
    """Exhaustive one-round Chvatal-Gomory search.

    Enumerates multiplier vectors over the instance's oriented rows with
    entries in [0, 1) and denominators at most ``max_denominator`` (the
    classical normalization for one CG round over integral rows), keeps
    those whose combination is integral on integer coordinates and zero on
    continuous ones, and returns the first generated cut under which the LP
    optimum certifies the instance's bound -- or None when no single cut
    does.
    """
    P = inst.polyhedron
    system = OrientedSystem.from_polyhedron(P)
    m = len(system)
    if m > max_rows:
        raise InputError(f"exhaustive search guard: {m} rows > {max_rows}")
    grid = proper_fractions(max_denominator)
    n = P.dim_int

    candidates = []
    for lam in product(grid, repeat=m):
        combo = [Fraction(0)] * P.ambient_dim
        ok = True
        for lv, row in zip(lam, system.rows):
            if lv == 0:
                continue
            for j, g in enumerate(row):
                if g != 0:
                    combo[j] += lv * g
        for j in range(n):
            if combo[j].denominator != 1:
                ok = False
                break
        if ok:
            for j in range(n, P.ambient_dim):
                if combo[j] != 0:
                    ok = False
                    break
        if not ok:
            continue
        candidates.append(lam)

    for lam in candidates:
        cut = generate_cg_cut(P, lam)
        after = solve_lp(
            P.with_constraints([cut.halfspace]), inst.objective
        )
        if after.is_infeasible or (after.is_optimal and after.value <= inst.bound):
            return cut
    return None
