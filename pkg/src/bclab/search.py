"""Exhaustive minimum-size proof search over bounded split families.

Enumerates every integral split with bounded sparsity, bounded coefficients
and thresholds derived from the 0/1 box, then finds the smallest
branch-and-bound tree (with the verifier's leaf rules) by depth-first
search with a transposition table.

States are keyed by the surviving 0/1 point set together with the exact LP
optimum of the relaxation; two relaxations with identical keys are treated
as interchangeable subproblems.  Reported minima are exact within the
enumerated family; the coefficient bound is an explicit, reported
limitation of every result.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .core import (
    GOAL_BOUND,
    BudgetError,
    InputError,
    Instance,
    LinearConstraint,
    Polyhedron,
    Vector,
    is_integral,
)
from .analysis import binary_points, is_01_boxed
from .cuts import Disjunction, make_split
from .lp import LpResult, solve_lp
from .proofs import (
    LEAF_BOUND,
    LEAF_INFEASIBLE,
    LEAF_INTEGRAL,
    MODE_UNRESTRICTED,
    ProofTree,
)


@dataclass(frozen=True)
class SearchSpace:
    """Finite split family: sparsity and max-norm bounds on the coefficient
    vector, thresholds from an explicit range or derived from the instance
    box, and an LP-solve budget for the search itself."""

    sparsity_limit: int
    coefficient_bound: int = 1
    pi0_range: tuple[int, int] | None = None
    lp_budget: int = 2_000_000
    root_symmetry: bool = True
    lattice_guard: int = 1 << 14


IntBox = list[tuple[int, int]]


def integer_box(P: Polyhedron) -> IntBox:
    """Per-coordinate integer ranges covering the polyhedron's lattice
    points, from exact coordinate LPs; raises on unbounded input."""
    from .core import UnboundedPolyhedronError

    from math import ceil, floor

    k = P.ambient_dim
    box: IntBox = []
    for i in range(k):
        e = [Fraction(0)] * k
        e[i] = Fraction(1)
        hi = solve_lp(P, e)
        if hi.is_infeasible:
            return [(0, -1)] * k  # empty
        e[i] = Fraction(-1)
        lo = solve_lp(P, e)
        if hi.is_unbounded or lo.is_unbounded:
            raise UnboundedPolyhedronError("search needs a bounded instance")
        box.append((ceil(-lo.value), floor(hi.value)))
    return box


def enumerate_splits(
    n: int, space: SearchSpace, box: IntBox | None = None
) -> list[Disjunction]:
    """All integral splits with nnz <= sparsity limit, coefficients within
    the bound, canonical sign (first nonzero positive; ``(pi, pi0)`` and
    ``(-pi, -pi0-1)`` describe the same disjunction), and thresholds for
    which both sides meet the instance box (unit box by default)."""
    s, B = space.sparsity_limit, space.coefficient_bound
    if not 1 <= s <= n:
        raise InputError(f"sparsity limit {s} outside [1, {n}]")
    if B < 1:
        raise InputError("coefficient bound must be at least 1")
    if box is None:
        box = [(0, 1)] * n
    values = [v for v in range(-B, B + 1) if v != 0]
    out: list[Disjunction] = []
    for t in range(1, s + 1):
        for support in combinations(range(n), t):
            for pattern in product(values, repeat=t):
                if pattern[0] < 0:
                    continue  # sign-canonical representative
                pi = [0] * n
                for idx, v in zip(support, pattern):
                    pi[idx] = v
                if space.pi0_range is not None:
                    lo, hi = space.pi0_range
                else:
                    lo = sum(
                        v * (box[j][0] if v > 0 else box[j][1])
                        for j, v in zip(support, pattern)
                    )
                    hi = (
                        sum(
                            v * (box[j][1] if v > 0 else box[j][0])
                            for j, v in zip(support, pattern)
                        )
                        - 1
                    )
                if hi < lo:
                    continue
                for pi0 in range(lo, hi + 1):
                    out.append(make_split(tuple(pi), pi0, n, 0))
    return out


def is_coordinate_symmetric(P: Polyhedron) -> bool:
    """True iff the constraint multiset is invariant under every adjacent
    coordinate transposition (hence under the full symmetric group)."""
    base = sorted(c.canonical_key() for c in P.constraints)
    k = P.ambient_dim
    for i in range(k - 1):
        swapped = []
        for c in P.constraints:
            coeffs = list(c.coeffs)
            coeffs[i], coeffs[i + 1] = coeffs[i + 1], coeffs[i]
            swapped.append(LinearConstraint(tuple(coeffs), c.relation, c.rhs))
        if sorted(c.canonical_key() for c in swapped) != base:
            return False
    return True


@dataclass(frozen=True)
class Bracket:
    """Sound two-sided bracket on the minimum proof size within a family:
    no proof smaller than ``lower`` exists (proved by exhaustion), ``upper``
    is the best witness found (None if none within the cap)."""

    lower: int
    upper: int | None


@dataclass
class SearchOutcome:
    size: int
    witness: ProofTree
    lp_solves: int
    splits_enumerated: int


class _Searcher:
    def __init__(self, inst: Instance, space: SearchSpace):
        if inst.dim_cont != 0:
            raise InputError("search needs a pure-integer instance")
        if not is_01_boxed(inst.polyhedron):
            raise InputError("search needs a 0/1-boxed instance")
        self.inst = inst
        self.space = space
        self.n = inst.dim_int
        self.splits = enumerate_splits(self.n, space)
        self.points = binary_points(inst.polyhedron)
        self.full_mask = (1 << len(self.points)) - 1
        # per split, per term: bitmask of surviving points
        self.term_masks: list[tuple[int, int]] = []
        for D in self.splits:
            pi = D.template.pi
            pi0 = D.template.pi0
            low = 0
            high = 0
            for idx, p in enumerate(self.points):
                v = sum(c * int(p[j]) for j, c in enumerate(pi) if c)
                if v <= pi0:
                    low |= 1 << idx
                else:
                    high |= 1 << idx
            self.term_masks.append((low, high))
        self.root_splits = self._root_split_indices()
        self.memo: dict = {}
        self.lp_solves = 0
        self.budget = space.lp_budget

    def _root_split_indices(self) -> list[int]:
        if not self.space.root_symmetry or not is_coordinate_symmetric(
            self.inst.polyhedron
        ):
            return list(range(len(self.splits)))
        keep = []
        for idx, D in enumerate(self.splits):
            pi = D.template.pi
            if tuple(sorted(pi, reverse=True)) == pi:
                keep.append(idx)
        return keep

    def _solve(self, constraints: tuple[LinearConstraint, ...]) -> LpResult:
        if self.lp_solves >= self.budget:
            raise BudgetError("search LP budget exceeded")
        self.lp_solves += 1
        relax = self.inst.polyhedron.with_constraints(constraints)
        return solve_lp(relax, self.inst.objective)

    def _leaf_reason(self, lp: LpResult) -> str | None:
        inst = self.inst
        if lp.is_infeasible:
            return LEAF_INFEASIBLE
        if inst.goal != GOAL_BOUND:
            return None
        if lp.is_optimal and lp.value <= inst.bound:
            if is_integral(lp.point, inst.dim_int):
                return LEAF_INTEGRAL
            return LEAF_BOUND
        return None

    @staticmethod
    def _key(mask: int, lp: LpResult):
        return (mask, lp.value if lp.is_optimal else lp.status)

    def search(
        self,
        constraints: tuple[LinearConstraint, ...],
        mask: int,
        lp: LpResult,
        cap: int,
        at_root: bool,
    ) -> int | None:
        """Exact minimum tree size at this state if it is <= cap, else None."""
        if self._leaf_reason(lp) is not None:
            return 1 if cap >= 1 else None
        if self.inst.goal == GOAL_BOUND and lp.is_optimal:
            if is_integral(lp.point, self.inst.dim_int) and lp.value > self.inst.bound:
                from .core import InvalidInstanceError

                raise InvalidInstanceError(
                    "integral optimum exceeds the claimed bound"
                )
        key = self._key(mask, lp)
        hit = self.memo.get(key)
        if hit is not None:
            kind, val, _choice = hit
            if kind == "exact":
                return val if val <= cap else None
            if val > cap:  # proven lower bound
                return None
        if cap < 3:
            self._remember_lb(key, cap + 1)
            return None

        best: int | None = None
        best_choice = None
        indices = self.root_splits if at_root else range(len(self.splits))
        limit = cap
        for idx in indices:
            low_mask, high_mask = self.term_masks[idx]
            child_masks = (mask & low_mask, mask & high_mask)
            D = self.splits[idx]
            terms = D.terms
            child_states = []
            degenerate = False
            for term, cmask in zip(terms, child_masks):
                c_constraints = constraints + term
                c_lp = self._solve(c_constraints)
                if self._key(cmask, c_lp) == key:
                    degenerate = True
                    break
                child_states.append((c_constraints, cmask, c_lp))
            if degenerate:
                continue
            remaining = limit - 1
            total = 1
            feasible = True
            sizes = []
            for pos, (c_constraints, cmask, c_lp) in enumerate(child_states):
                others = len(child_states) - pos - 1
                sub_cap = remaining - others
                sz = self.search(c_constraints, cmask, c_lp, sub_cap, False)
                if sz is None:
                    feasible = False
                    break
                sizes.append(sz)
                remaining -= sz
                total += sz
            if feasible and (best is None or total < best):
                best = total
                best_choice = idx
                limit = best - 1
        if best is not None:
            self.memo[key] = ("exact", best, best_choice)
            return best
        self._remember_lb(key, cap + 1)
        return None

    def _remember_lb(self, key, lb: int) -> None:
        hit = self.memo.get(key)
        if hit is not None and hit[0] == "exact":
            return
        if hit is None or hit[1] < lb:
            self.memo[key] = ("lb", lb, None)

    # -- witness reconstruction ---------------------------------------------

    def build_witness(self) -> ProofTree:
        tree = ProofTree(self.inst, mode=MODE_UNRESTRICTED)
        root = tree.add_root()
        root_lp = solve_lp(self.inst.polyhedron, self.inst.objective)
        self._replay(tree, root, (), self.full_mask, root_lp)
        return tree

    def _replay(self, tree, nid, constraints, mask, lp) -> None:
        reason = self._leaf_reason(lp)
        if reason is not None:
            tree.leaf(nid, reason)
            return
        key = self._key(mask, lp)
        hit = self.memo.get(key)
        if hit is None or hit[0] != "exact":
            raise AssertionError("witness replay left the memoized frontier")
        idx = hit[2]
        D = self.splits[idx]
        children = tree.branch(nid, D)
        low_mask, high_mask = self.term_masks[idx]
        for child, term, cmask in zip(
            children, D.terms, (mask & low_mask, mask & high_mask)
        ):
            c_constraints = constraints + term
            relax = self.inst.polyhedron.with_constraints(c_constraints)
            c_lp = solve_lp(relax, self.inst.objective)
            self._replay(tree, child, c_constraints, cmask, c_lp)


def minimum_tree_size(inst: Instance, space: SearchSpace) -> SearchOutcome:
    """Exact minimum branch-and-bound proof size over the enumerated split
    family, with a verifying witness tree."""
    searcher = _Searcher(inst, space)
    root_lp = solve_lp(inst.polyhedron, inst.objective)
    size = searcher.search((), searcher.full_mask, root_lp, 1 << 30, True)
    if size is None:
        raise BudgetError("search exhausted without a proof (family too weak?)")
    witness = searcher.build_witness()
    return SearchOutcome(size, witness, searcher.lp_solves, len(searcher.splits))


def proof_size_bracket(inst: Instance, space: SearchSpace, cap: int) -> Bracket:
    """Sound bracket under a size cap: exhaustion up to ``cap`` proves the
    lower bound; the upper bound comes from the best witness within it."""
    if cap < 1:
        raise InputError("cap must be at least 1")
    searcher = _Searcher(inst, space)
    root_lp = solve_lp(inst.polyhedron, inst.objective)
    size = searcher.search((), searcher.full_mask, root_lp, cap, True)
    if size is None:
        return Bracket(lower=cap + 1, upper=None)
    return Bracket(lower=size, upper=size)
