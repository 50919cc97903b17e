"""Branch-and-cut proof trees, their verifier, and a deterministic driver.

A proof tree hangs off an instance.  Each node stores only the constraints
it adds to its parent's relaxation; the full relaxation is materialized on
demand.  Node kinds:

* Branch: one child per term of a disjunction;
* Cut: a single child whose delta is the certified halfspace;
* Leaf: a reason the node needs no further work (lp-infeasible,
  bound-certified, or integral-optimum).

``verify_proof`` re-derives everything from scratch -- certificates, child
deltas, leaf reasons, and (in restricted mode) that every chosen disjunction
or cut excludes the node's LP optimum.  Acceptance of a tree is therefore a
machine-checkable proof of the instance's goal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .core import (
    GOAL_BOUND,
    GOAL_INFEASIBLE,
    Error,
    InputError,
    Instance,
    InvalidInstanceError,
    LinearConstraint,
    Polyhedron,
    Vector,
    is_integral,
    vec,
)
from .cuts import (
    CuttingPlane,
    Disjunction,
    generate_cg_cut,
    make_variable_disjunction,
    validate_disjunction,
    verify_cut,
)
from .instances import jeroslow_partial_objective
from .lp import LpResult, solve_lp

LEAF_INFEASIBLE = "lp-infeasible"
LEAF_BOUND = "bound-certified"
LEAF_INTEGRAL = "integral-optimum"
LEAF_REASONS = (LEAF_INFEASIBLE, LEAF_BOUND, LEAF_INTEGRAL)

MODE_RESTRICTED = "restricted"
MODE_UNRESTRICTED = "unrestricted"


class DriverError(Error):
    """The branch-and-cut driver hit a contract violation (non-separating
    strategy choice in restricted mode, unbounded relaxation, ...)."""


@dataclass(frozen=True)
class Branch:
    disjunction: Disjunction
    children: tuple[int, ...]


@dataclass(frozen=True)
class Cut:
    cut: CuttingPlane
    child: int


@dataclass(frozen=True)
class Leaf:
    reason: str


NodeKind = Branch | Cut | Leaf


@dataclass
class ProofNode:
    node_id: int
    parent: int | None
    added: tuple[LinearConstraint, ...]
    kind: NodeKind | None = None
    cached_lp: LpResult | None = None


class ProofTree:
    """Rooted tree of branch/cut/leaf nodes over an instance."""

    def __init__(self, instance: Instance, mode: str = MODE_UNRESTRICTED):
        if mode not in (MODE_RESTRICTED, MODE_UNRESTRICTED):
            raise InputError(f"unknown proof mode {mode!r}")
        self.instance = instance
        self.mode = mode
        self.nodes: dict[int, ProofNode] = {}
        self.root_id: int | None = None
        self._next_id = 0

    # -- construction ------------------------------------------------------

    def _new_node(self, parent: int | None, added: Sequence[LinearConstraint]) -> int:
        nid = self._next_id
        self._next_id = nid + 1
        self.nodes[nid] = ProofNode(nid, parent, tuple(added))
        return nid

    def add_root(self) -> int:
        if self.root_id is not None:
            raise InputError("tree already has a root")
        self.root_id = self._new_node(None, ())
        return self.root_id

    def branch(self, node_id: int, disjunction: Disjunction) -> tuple[int, ...]:
        """Turn a pending node into a branch; children are created with the
        term constraints as their deltas, in term order."""
        node = self._pending(node_id)
        children = tuple(
            self._new_node(node_id, term) for term in disjunction.terms
        )
        node.kind = Branch(disjunction, children)
        return children

    def cut(self, node_id: int, cutting_plane: CuttingPlane) -> int:
        node = self._pending(node_id)
        child = self._new_node(node_id, (cutting_plane.halfspace,))
        node.kind = Cut(cutting_plane, child)
        return child

    def leaf(self, node_id: int, reason: str) -> None:
        if reason not in LEAF_REASONS:
            raise InputError(f"unknown leaf reason {reason!r}")
        self._pending(node_id).kind = Leaf(reason)

    def _pending(self, node_id: int) -> ProofNode:
        node = self.nodes[node_id]
        if node.kind is not None:
            raise InputError(f"node {node_id} already has a kind")
        return node

    # -- structure ---------------------------------------------------------

    def size(self) -> int:
        return len(self.nodes)

    def children(self, node_id: int) -> tuple[int, ...]:
        kind = self.nodes[node_id].kind
        if isinstance(kind, Branch):
            return kind.children
        if isinstance(kind, Cut):
            return (kind.child,)
        return ()

    def preorder(self) -> Iterator[int]:
        if self.root_id is None:
            return
        stack = [self.root_id]
        while stack:
            nid = stack.pop()
            yield nid
            stack.extend(reversed(self.children(nid)))

    def depth(self, node_id: int) -> int:
        d = 0
        node = self.nodes[node_id]
        while node.parent is not None:
            node = self.nodes[node.parent]
            d += 1
        return d

    def leaves(self) -> list[int]:
        return [nid for nid in self.preorder() if isinstance(self.nodes[nid].kind, Leaf)]

    def path_constraints(self, node_id: int) -> list[LinearConstraint]:
        out: list[LinearConstraint] = []
        node = self.nodes[node_id]
        while node is not None:
            out.extend(reversed(node.added))
            node = self.nodes[node.parent] if node.parent is not None else None
        out.reverse()
        return out

    def relaxation(self, node_id: int) -> Polyhedron:
        """The node's LP relaxation: instance polyhedron plus the root-path
        deltas, materialized on demand."""
        return self.instance.polyhedron.with_constraints(self.path_constraints(node_id))

    def is_pure_branching(self) -> bool:
        return not any(isinstance(n.kind, Cut) for n in self.nodes.values())

    def copy(self) -> "ProofTree":
        dup = ProofTree(self.instance, self.mode)
        dup.root_id = self.root_id
        dup._next_id = self._next_id
        for nid, node in self.nodes.items():
            dup.nodes[nid] = ProofNode(
                node.node_id, node.parent, node.added, node.kind, node.cached_lp
            )
        return dup


@dataclass(frozen=True)
class TreeStats:
    size: int
    depth: int
    leaf_count: int
    max_sparsity: int


def tree_stats(tree: ProofTree) -> TreeStats:
    """Exact node/depth/leaf counts and the maximum primitive-form sparsity
    used by any disjunction inequality or cut in the tree."""
    size = tree.size()
    depth = max((tree.depth(nid) for nid in tree.nodes), default=0)
    leaf_count = len(tree.leaves())
    max_sparsity = 0
    for node in tree.nodes.values():
        if isinstance(node.kind, Branch):
            max_sparsity = max(max_sparsity, node.kind.disjunction.sparsity())
        elif isinstance(node.kind, Cut):
            max_sparsity = max(max_sparsity, node.kind.cut.sparsity())
    return TreeStats(size, depth, leaf_count, max_sparsity)


@dataclass(frozen=True)
class VerifyFailure:
    node_id: int
    code: str
    message: str


@dataclass(frozen=True)
class VerifyReport:
    accepted: bool
    failure: VerifyFailure | None = None
    nodes_checked: int = 0

    def __bool__(self) -> bool:
        return self.accepted


def _same_constraints(
    added: Sequence[LinearConstraint], expected: Sequence[LinearConstraint]
) -> bool:
    if len(added) != len(expected):
        return False
    return sorted(c.canonical_key() for c in added) == sorted(
        c.canonical_key() for c in expected
    )


def verify_proof(tree: ProofTree) -> VerifyReport:
    """Check every node-local condition of the proof tree, exactly.

    Accepts iff (a) branch children match the disjunction terms and the
    disjunction's coverage template validates, (b) cuts verify against their
    relaxation and the cut child adds exactly the halfspace, (c) in
    restricted mode every non-leaf's LP optimum is excluded by the chosen
    disjunction or cut, (d) every leaf reason re-checks, and (e) under the
    prove-infeasible goal all leaves are lp-infeasible.  The report carries
    the first failing node and condition.
    """
    inst = tree.instance
    goal = inst.goal
    n_checked = 0

    def fail(nid: int, code: str, message: str) -> VerifyReport:
        return VerifyReport(False, VerifyFailure(nid, code, message), n_checked)

    if tree.root_id is None or tree.root_id not in tree.nodes:
        return VerifyReport(False, VerifyFailure(-1, "no-root", "tree has no root"), 0)
    if tree.nodes[tree.root_id].added:
        return fail(tree.root_id, "root-delta", "root must not add constraints")

    seen: set[int] = set()
    for nid in tree.preorder():
        node = tree.nodes[nid]
        if nid in seen:
            return fail(nid, "not-a-tree", "node reachable twice")
        seen.add(nid)
        n_checked += 1
        kind = node.kind
        if kind is None:
            return fail(nid, "unfinished-node", "node has no kind")

        relax = tree.relaxation(nid)

        if isinstance(kind, (Branch, Cut)):
            lp = None
            if tree.mode == MODE_RESTRICTED:
                lp = solve_lp(relax, inst.objective)
                if not lp.is_optimal:
                    return fail(
                        nid,
                        "restricted-no-optimum",
                        f"relaxation is {lp.status}; restricted mode needs an LP optimum",
                    )

        if isinstance(kind, Branch):
            D = kind.disjunction
            ok, reason = validate_disjunction(D)
            if not ok:
                return fail(nid, "disjunction-invalid", reason or "invalid disjunction")
            if D.ambient != inst.polyhedron.ambient_dim or D.n != inst.dim_int:
                return fail(nid, "disjunction-invalid", "disjunction dimensions mismatch")
            terms = D.terms
            if len(kind.children) != len(terms):
                return fail(nid, "branch-arity", "one child per disjunction term required")
            for child_id, term in zip(kind.children, terms):
                child = tree.nodes.get(child_id)
                if child is None or child.parent != nid:
                    return fail(nid, "broken-link", f"child {child_id} missing or relinked")
                if not _same_constraints(child.added, term):
                    return fail(
                        child_id,
                        "branch-child-mismatch",
                        "child delta is not the disjunction term",
                    )
            if tree.mode == MODE_RESTRICTED and lp is not None:
                if D.contains(lp.point):
                    return fail(
                        nid,
                        "restricted-not-separating",
                        "LP optimum lies in a disjunction term",
                    )
        elif isinstance(kind, Cut):
            check = verify_cut(relax, kind.cut)
            if not check:
                return fail(nid, "cut-invalid", check.reason or "certificate failed")
            child = tree.nodes.get(kind.child)
            if child is None or child.parent != nid:
                return fail(nid, "broken-link", f"child {kind.child} missing or relinked")
            if not _same_constraints(child.added, (kind.cut.halfspace,)):
                return fail(
                    kind.child, "cut-child-mismatch", "child delta is not the cut halfspace"
                )
            if tree.mode == MODE_RESTRICTED and lp is not None:
                if kind.cut.halfspace.satisfied_by(lp.point):
                    return fail(
                        nid, "restricted-not-separating", "LP optimum satisfies the cut"
                    )
        else:
            lp = solve_lp(relax, inst.objective)
            reason = kind.reason
            if goal == GOAL_INFEASIBLE and reason != LEAF_INFEASIBLE:
                return fail(
                    nid,
                    "goal-leaf-mismatch",
                    "infeasibility proofs admit only lp-infeasible leaves",
                )
            if reason == LEAF_INFEASIBLE:
                if not lp.is_infeasible:
                    return fail(
                        nid, "leaf-not-infeasible", f"relaxation is {lp.status}"
                    )
            elif reason == LEAF_BOUND:
                if not lp.is_optimal:
                    return fail(nid, "leaf-no-optimum", f"relaxation is {lp.status}")
                if lp.value > inst.bound:
                    if is_integral(lp.point, inst.dim_int):
                        return fail(
                            nid,
                            "instance-invalid",
                            "integral optimum exceeds the claimed bound",
                        )
                    return fail(
                        nid,
                        "leaf-bound-not-certified",
                        f"LP value {lp.value} exceeds bound {inst.bound}",
                    )
            else:  # integral-optimum
                if not lp.is_optimal:
                    return fail(nid, "leaf-no-optimum", f"relaxation is {lp.status}")
                if not is_integral(lp.point, inst.dim_int):
                    return fail(nid, "leaf-not-integral", "LP optimum is fractional")
                if lp.value > inst.bound:
                    return fail(
                        nid,
                        "instance-invalid",
                        "integral optimum exceeds the claimed bound",
                    )
    return VerifyReport(True, None, n_checked)


# -- the Definition-style driver -------------------------------------------


@dataclass
class StrategyContext:
    instance: Instance
    node_id: int
    depth: int
    relaxation: Polyhedron
    lp: LpResult


Decision = tuple[str, Disjunction | CuttingPlane]
Decide = Callable[[StrategyContext], Decision]


@dataclass
class Strategy:
    """Deterministic, seed-free resolution of the driver's choices."""

    name: str
    decide: Decide
    node_selection: str = "dfs"
    budget: int = 100_000
    mode: str = MODE_RESTRICTED

    def __post_init__(self):
        if self.node_selection not in ("dfs", "bfs", "best-bound"):
            raise InputError(f"unknown node selection {self.node_selection!r}")


def variable_branching_strategy(budget: int = 100_000) -> Strategy:
    """Branch on the lowest-index integer variable with a fractional LP
    value, at that value's floor."""

    def decide(ctx: StrategyContext) -> Decision:
        point = ctx.lp.point
        n = ctx.instance.dim_int
        for i in range(n):
            if point[i].denominator != 1:
                pi0 = point[i].numerator // point[i].denominator
                return (
                    "branch",
                    make_variable_disjunction(i, pi0, n, ctx.instance.dim_cont),
                )
        raise DriverError(
            "no fractional integer coordinate at a node that is not a leaf"
        )

    return Strategy("variable-branching", decide, budget=budget)


def cg_cut_strategy(
    multipliers: Sequence[Fraction], budget: int = 100_000
) -> Strategy:
    """Always cut, with fixed CG row multipliers (indexed by the node
    relaxation's oriented rows, zero-extended as rows accumulate)."""

    base = vec(multipliers)

    def decide(ctx: StrategyContext) -> Decision:
        from .core import OrientedSystem

        m = len(OrientedSystem.from_polyhedron(ctx.relaxation))
        if m < len(base):
            raise DriverError("multiplier vector longer than the oriented system")
        lam = base + (Fraction(0),) * (m - len(base))
        return ("cut", generate_cg_cut(ctx.relaxation, lam))

    return Strategy("cg-cut", decide, budget=budget)


def run_branch_and_cut(instance: Instance, strategy: Strategy) -> ProofTree:
    """Drive a proof search: process relaxations, prune statically-certified
    leaves, otherwise branch or cut per the strategy.

    The lower bound starts (and, for valid instances, stays) at the claimed
    bound, so pruning is order-independent and every emitted leaf reason is
    statically re-checkable.  Raises BudgetError with the partial tree when
    the node budget is exhausted, InvalidInstanceError when an integral
    optimum refutes the instance, and DriverError for strategy violations.
    """
    from .core import BudgetError

    tree = ProofTree(instance, mode=strategy.mode)
    root = tree.add_root()
    agenda: list[int] = [root]
    goal = instance.goal

    while agenda:
        if strategy.node_selection == "dfs":
            nid = agenda.pop()
        elif strategy.node_selection == "bfs":
            nid = agenda.pop(0)
        else:  # best-bound: largest cached LP value first, ties to low id
            def key(x: int):
                lp = tree.nodes[x].cached_lp
                has_value = lp is not None and lp.value is not None
                return (
                    0 if has_value else 1,
                    -(lp.value if has_value else 0),
                    x,
                )

            nid = min(agenda, key=key)
            agenda.remove(nid)

        relax = tree.relaxation(nid)
        lp = solve_lp(relax, instance.objective)
        tree.nodes[nid].cached_lp = lp

        if lp.is_infeasible:
            tree.leaf(nid, LEAF_INFEASIBLE)
            continue
        if lp.is_unbounded:
            raise DriverError(
                f"relaxation at node {nid} is unbounded; no leaf rule applies"
            )
        if goal == GOAL_BOUND:
            if lp.value <= instance.bound:
                if is_integral(lp.point, instance.dim_int):
                    tree.leaf(nid, LEAF_INTEGRAL)
                else:
                    tree.leaf(nid, LEAF_BOUND)
                continue
            if is_integral(lp.point, instance.dim_int):
                raise InvalidInstanceError(
                    f"integral optimum {lp.value} exceeds claimed bound {instance.bound}"
                )
        else:
            if is_integral(lp.point, instance.dim_int):
                raise InvalidInstanceError(
                    "integral point found in a claimed-infeasible instance"
                )

        action, payload = strategy.decide(
            StrategyContext(instance, nid, tree.depth(nid), relax, lp)
        )
        if action == "branch":
            D: Disjunction = payload
            if strategy.mode == MODE_RESTRICTED and D.contains(lp.point):
                raise DriverError(
                    "strategy chose a non-separating disjunction in restricted mode"
                )
            if tree.size() + D.k > strategy.budget:
                raise BudgetError("node budget exceeded", partial=tree)
            agenda.extend(tree.branch(nid, D))
        elif action == "cut":
            cut: CuttingPlane = payload
            if strategy.mode == MODE_RESTRICTED and cut.halfspace.satisfied_by(lp.point):
                raise DriverError(
                    "strategy chose a non-separating cut in restricted mode"
                )
            if tree.size() + 1 > strategy.budget:
                raise BudgetError("node budget exceeded", partial=tree)
            agenda.append(tree.cut(nid, cut))
        else:
            raise DriverError(f"unknown strategy action {action!r}")
    return tree


def build_staircase_tree(n: int) -> ProofTree:
    """The explicit n+2-node variable-branching proof for the partial-sum
    objective on the even-weight knapsack polytope.

    Branch on x_1; the 0-side leaf is bound-certified, the 1-side branches
    on x_2, and so on; after ceil(n/2) ones the relaxation is infeasible.
    Every disjunction has sparsity 1.
    """
    if n < 3 or n % 2 == 0:
        raise InputError("n must be an odd number >= 3")
    inst = jeroslow_partial_objective(n)
    tree = ProofTree(inst, mode=MODE_UNRESTRICTED)
    node = tree.add_root()
    for j in range((n + 1) // 2):
        zero_side, one_side = tree.branch(
            node, make_variable_disjunction(j, 0, n, 0)
        )
        tree.leaf(zero_side, LEAF_BOUND)
        node = one_side
    tree.leaf(node, LEAF_INFEASIBLE)
    return tree
