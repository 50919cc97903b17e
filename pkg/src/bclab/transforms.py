"""Constructive conversions between proof systems.

* ``cut_proof_to_bb``: a certified cutting-plane proof becomes a pure
  branch-and-bound proof.  Each cut ``a x <= delta`` (primitive integral,
  rhs floored) turns into the split ``{a x <= d} u {a x >= d+1}``; the upper
  side is either LP-infeasible outright (always for CG cuts) or is refined
  by the certificate's disjunction into LP-infeasible leaves.  The output
  adds at most k+1 nodes per cut, where k is the certificate disjunction's
  term count.
* ``bc_proof_to_bb``: a mixed branch-and-cut proof becomes pure
  branch-and-bound, given an oracle producing a branching proof of each
  cut's validity on its relaxation; the oracle's tree is grafted onto the
  split's upper side, where all its leaves become infeasible.
* ``compose_complementary``: glues two bounded instances into one whose
  target inequality restricts to either input's target on the two fibers of
  a new 0/1 selector variable, via the exact two-block hull formulation.
* ``embed_instance`` / ``add_objective_variable``: the closure operations
  (zero-fixed dummy coordinates, objective as a tracked variable), each with
  a size-preserving proof lift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    GOAL_BOUND,
    GOAL_INFEASIBLE,
    Error,
    InputError,
    Instance,
    LinearConstraint,
    OrientedSystem,
    Polyhedron,
    UnboundedPolyhedronError,
    Vector,
    is_integral,
    primitive_vector,
    vec,
    zeros,
)
from .cuts import (
    CgCertificate,
    CuttingPlane,
    Disjunction,
    DisjunctiveCertificate,
    IntervalPartitionTemplate,
    SplitRefinementTemplate,
    SplitTemplate,
    best_cg_multipliers,
    cg_to_split_certified,
    generate_cg_cut,
    make_split,
    make_split_refinement,
    make_variable_disjunction,
    verify_cut,
)
from .lp import is_bounded, solve_lp
from .proofs import (
    Branch,
    Cut,
    Leaf,
    LEAF_BOUND,
    LEAF_INFEASIBLE,
    LEAF_INTEGRAL,
    MODE_UNRESTRICTED,
    ProofTree,
    run_branch_and_cut,
    variable_branching_strategy,
    verify_proof,
)


class TransformError(Error):
    """A proof transformation met an input outside its contract."""


def _leaf_reason(tree: ProofTree, nid: int) -> str:
    """Re-derive the strongest statically-checkable leaf reason at a node."""
    inst = tree.instance
    lp = solve_lp(tree.relaxation(nid), inst.objective)
    if lp.is_infeasible:
        return LEAF_INFEASIBLE
    if inst.goal == GOAL_INFEASIBLE:
        raise TransformError(f"node {nid} is LP-feasible in an infeasibility proof")
    if lp.is_optimal and lp.value <= inst.bound:
        if is_integral(lp.point, inst.dim_int):
            return LEAF_INTEGRAL
        return LEAF_BOUND
    raise TransformError(f"node {nid} admits no valid leaf reason ({lp.status})")


def graft(out: ProofTree, at_id: int, sub: ProofTree) -> None:
    """Copy ``sub``'s structure onto the pending node ``at_id`` of ``out``,
    re-deriving every leaf reason against ``out``'s (possibly stronger)
    relaxations."""
    mapping = {sub.root_id: at_id}
    for nid in sub.preorder():
        node = sub.nodes[nid]
        tgt = mapping[nid]
        kind = node.kind
        if isinstance(kind, Branch):
            children = out.branch(tgt, kind.disjunction)
            mapping.update(zip(kind.children, children))
        elif isinstance(kind, Cut):
            mapping[kind.child] = out.cut(tgt, kind.cut)
        elif isinstance(kind, Leaf):
            out.leaf(tgt, _leaf_reason(out, tgt))
        else:
            raise TransformError(f"unfinished node {nid} in grafted tree")


def _integral_split_of(cut: CuttingPlane) -> tuple[tuple[int, ...], int]:
    """Primitive integral coefficients and floored rhs of a cut; this is the
    canonical split threshold (integral data assumed rational)."""
    ints, scale = primitive_vector(cut.halfspace.coeffs)
    if all(v == 0 for v in ints):
        raise TransformError("cannot branch on an all-zero cut")
    scaled_rhs = cut.halfspace.rhs * scale
    return tuple(int(v) for v in ints), scaled_rhs.numerator // scaled_rhs.denominator


def cut_proof_to_bb(tree: ProofTree) -> ProofTree:
    """Convert a pure cutting-plane proof into a pure branch-and-bound proof.

    Every cut must verify against its relaxation; CG certificates are
    re-certified over their defining split.  Output size is at most
    (k+1) per cut plus the input's non-cut nodes, and the sparsity used is
    bounded by the max of the input cut and certificate sparsities.
    """
    inst = tree.instance
    steps: list[CuttingPlane] = []
    nid = tree.root_id
    while True:
        kind = tree.nodes[nid].kind
        if isinstance(kind, Cut):
            steps.append(kind.cut)
            nid = kind.child
        elif isinstance(kind, Leaf):
            break
        else:
            raise InputError("input is not a pure cutting-plane proof")

    out = ProofTree(inst, mode=MODE_UNRESTRICTED)
    node = out.add_root()
    orig_relax = inst.polyhedron
    for cut in steps:
        check = verify_cut(orig_relax, cut)
        if not check:
            raise TransformError(f"input cut does not verify: {check.reason}")
        if isinstance(cut.certificate, CgCertificate):
            cut = cg_to_split_certified(orig_relax, cut)
        pi, pi0 = _integral_split_of(cut)
        n, d = inst.dim_int, inst.dim_cont
        upper_row = LinearConstraint(vec(pi), ">=", Fraction(pi0 + 1))
        out_relax = out.relaxation(node)
        complement_lp = solve_lp(
            out_relax.with_constraints([upper_row]), inst.objective
        )
        if complement_lp.is_infeasible:
            lower, upper = out.branch(node, make_split(pi, pi0, n, d))
            out.leaf(upper, LEAF_INFEASIBLE)
        else:
            inner = cut.certificate.disjunction
            refined = make_split_refinement(pi, pi0, inner)
            children = out.branch(node, refined)
            lower = children[0]
            for child in children[1:]:
                out.leaf(child, _leaf_reason(out, child))
        node = lower
        orig_relax = orig_relax.with_constraints([cut.halfspace])
    out.leaf(node, _leaf_reason(out, node))
    return out


def single_cut_bb_oracle(N: Polyhedron, cut: CuttingPlane) -> ProofTree:
    """A branch-and-bound proof that ``cut`` is valid on relaxation N,
    obtained by converting the one-cut cutting-plane proof.  This is the
    canonical oracle for `bc_proof_to_bb` whenever cuts carry certificates.
    """
    target = Instance(N, cut.halfspace.coeffs, cut.halfspace.rhs, GOAL_BOUND)
    cp = ProofTree(target, mode=MODE_UNRESTRICTED)
    root = cp.add_root()
    child = cp.cut(root, cut)
    cp.leaf(child, LEAF_BOUND)
    return cut_proof_to_bb(cp)


def bc_proof_to_bb(tree: ProofTree, cut_oracle=single_cut_bb_oracle) -> ProofTree:
    """Convert a branch-and-cut proof on a pure-integer instance into pure
    branch-and-bound.

    ``cut_oracle(N, cut)`` must return a verified pure-branching proof of
    the instance ``(N, cut.coeffs, cut.rhs, prove-bound)``.  Each cut node
    becomes a split; the oracle tree proves the upper side infeasible.
    """
    inst = tree.instance
    if inst.dim_cont != 0:
        raise InputError("branch-and-cut conversion requires a pure-integer instance")
    out = ProofTree(inst, mode=MODE_UNRESTRICTED)
    out_root = out.add_root()
    stack = [(tree.root_id, out_root)]
    while stack:
        src_id, tgt = stack.pop()
        kind = tree.nodes[src_id].kind
        if isinstance(kind, Leaf):
            out.leaf(tgt, _leaf_reason(out, tgt))
        elif isinstance(kind, Branch):
            children = out.branch(tgt, kind.disjunction)
            stack.extend(zip(kind.children, children))
        elif isinstance(kind, Cut):
            cut = kind.cut
            N = tree.relaxation(src_id)
            oracle_tree = cut_oracle(N, cut)
            if not oracle_tree.is_pure_branching():
                raise TransformError("oracle proof is not pure branch-and-bound")
            target = oracle_tree.instance
            if (
                target.polyhedron != N
                or target.objective != cut.halfspace.coeffs
                or target.bound != cut.halfspace.rhs
                or target.goal != GOAL_BOUND
            ):
                raise TransformError("oracle proof is for a different obligation")
            report = verify_proof(oracle_tree)
            if not report:
                raise TransformError(
                    f"oracle proof rejected at node {report.failure.node_id}: "
                    f"{report.failure.code}"
                )
            pi, pi0 = _integral_split_of(cut)
            lower, upper = out.branch(
                tgt, make_split(pi, pi0, inst.dim_int, inst.dim_cont)
            )
            stack.append((kind.child, lower))
            graft(out, upper, oracle_tree)
        else:
            raise InputError(f"unfinished node {src_id} in input proof")
    return out


# -- embeddings and the composition gadget ----------------------------------


def _lift_constraint(c: LinearConstraint, pos: list[int], new_dim: int) -> LinearConstraint:
    coeffs = [Fraction(0)] * new_dim
    for j, v in enumerate(c.coeffs):
        coeffs[pos[j]] = v
    return LinearConstraint(tuple(coeffs), c.relation, c.rhs)


def _lift_template(t, pos: list[int], new_dim: int):
    if isinstance(t, SplitTemplate):
        pi = [0] * new_dim
        for j, v in enumerate(t.pi):
            pi[pos[j]] = v
        return SplitTemplate(tuple(pi), t.pi0)
    if isinstance(t, IntervalPartitionTemplate):
        return IntervalPartitionTemplate(pos[t.index], t.cuts)
    if isinstance(t, SplitRefinementTemplate):
        raise TransformError("cannot lift a split-refinement disjunction")
    raise TransformError(f"unknown template {type(t).__name__}")


def _lift_multipliers(mult: Vector, m_root: int, inserted: int) -> Vector:
    """Insert zero multipliers for the oriented rows of newly appended root
    constraints (which sit right after the original root rows)."""
    return tuple(mult[:m_root]) + zeros(inserted) + tuple(mult[m_root:])


def _lift_tree(tree: ProofTree, new_inst: Instance, pos: list[int], inserted_rows: int) -> ProofTree:
    old_dim = tree.instance.polyhedron.ambient_dim
    new_dim = new_inst.polyhedron.ambient_dim
    m_root = len(OrientedSystem.from_polyhedron(tree.instance.polyhedron))
    out = ProofTree(new_inst, mode=tree.mode)
    out.add_root()
    mapping = {tree.root_id: out.root_id}
    for nid in tree.preorder():
        node = tree.nodes[nid]
        tgt = mapping[nid]
        kind = node.kind
        if isinstance(kind, Branch):
            D = kind.disjunction
            lifted = Disjunction(
                new_inst.dim_int,
                new_inst.dim_cont,
                _lift_template(D.template, pos, new_dim),
            )
            children = out.branch(tgt, lifted)
            mapping.update(zip(kind.children, children))
        elif isinstance(kind, Cut):
            cut = kind.cut
            halfspace = _lift_constraint(cut.halfspace, pos, new_dim)
            cert = cut.certificate
            if isinstance(cert, CgCertificate):
                new_cert = CgCertificate(
                    _lift_multipliers(cert.multipliers, m_root, inserted_rows)
                )
            else:
                lifted_D = Disjunction(
                    new_inst.dim_int,
                    new_inst.dim_cont,
                    _lift_template(cert.disjunction.template, pos, new_dim),
                )
                wits = tuple(
                    type(w)(w.kind, _lift_multipliers(w.multipliers, m_root, inserted_rows))
                    for w in cert.witnesses
                )
                new_cert = DisjunctiveCertificate(lifted_D, wits)
            mapping[kind.child] = out.cut(tgt, CuttingPlane(halfspace, new_cert))
        elif isinstance(kind, Leaf):
            out.leaf(tgt, kind.reason)
        else:
            raise TransformError(f"unfinished node {nid}")
    assert old_dim == len(pos)
    return out


def embed_instance(inst: Instance, extra_int: int, extra_cont: int) -> Instance:
    """Append zero-fixed integer/continuous coordinates.

    Original constraints are lifted in order, then one equality per new
    coordinate pins it to zero.  Proofs transfer verbatim in both directions
    (`embed_proof`)."""
    if extra_int < 0 or extra_cont < 0:
        raise InputError("coordinate counts must be nonnegative")
    if extra_int == 0 and extra_cont == 0:
        return inst
    n, d = inst.dim_int, inst.dim_cont
    new_n, new_d = n + extra_int, d + extra_cont
    new_dim = new_n + new_d
    pos = [j if j < n else j + extra_int for j in range(n + d)]
    rows = [_lift_constraint(c, pos, new_dim) for c in inst.polyhedron.constraints]
    for j in list(range(n, new_n)) + list(range(new_n + d, new_dim)):
        e = [Fraction(0)] * new_dim
        e[j] = Fraction(1)
        rows.append(LinearConstraint(tuple(e), "=", Fraction(0)))
    objective = [Fraction(0)] * new_dim
    for j, v in enumerate(inst.objective):
        objective[pos[j]] = v
    return Instance(
        Polyhedron(new_n, new_d, tuple(rows)), tuple(objective), inst.bound, inst.goal
    )


def embed_proof(tree: ProofTree, extra_int: int, extra_cont: int) -> ProofTree:
    """Lift a proof verbatim onto the embedded instance (equal size)."""
    if extra_int == 0 and extra_cont == 0:
        return tree.copy()
    inst = tree.instance
    new_inst = embed_instance(inst, extra_int, extra_cont)
    n, d = inst.dim_int, inst.dim_cont
    pos = [j if j < n else j + extra_int for j in range(n + d)]
    return _lift_tree(tree, new_inst, pos, inserted_rows=2 * (extra_int + extra_cont))


def add_objective_variable(inst: Instance) -> Instance:
    """Track the objective in a new continuous variable t: constraints gain
    ``t = <c, x>``, the objective becomes t, the bound is unchanged."""
    n, d = inst.dim_int, inst.dim_cont
    new_dim = n + d + 1
    pos = list(range(n + d))
    rows = [_lift_constraint(c, pos, new_dim) for c in inst.polyhedron.constraints]
    tie = tuple(-v for v in inst.objective) + (Fraction(1),)
    rows.append(LinearConstraint(tie, "=", Fraction(0)))
    objective = zeros(n + d) + (Fraction(1),)
    return Instance(Polyhedron(n, d + 1, tuple(rows)), objective, inst.bound, inst.goal)


def lift_proof_to_objective_variable(tree: ProofTree) -> ProofTree:
    """Replay a proof verbatim on the objective-variable lift (equal size)."""
    inst = tree.instance
    new_inst = add_objective_variable(inst)
    pos = list(range(inst.polyhedron.ambient_dim))
    return _lift_tree(tree, new_inst, pos, inserted_rows=2)


@dataclass(frozen=True)
class CompositionGadget:
    """Two instances glued along a 0/1 selector y via the exact two-block
    hull formulation; the target inequality restricts to either input's
    target on the corresponding fiber."""

    instance_a: Instance
    instance_b: Instance
    composed: Instance
    y_index: int
    t_index: int

    def fiber(self, y_value: int) -> Polyhedron:
        P = self.composed.polyhedron
        e = [Fraction(0)] * P.ambient_dim
        e[self.y_index] = Fraction(1)
        return P.with_constraints(
            [LinearConstraint(tuple(e), "=", Fraction(y_value))]
        )

    def t_objective(self) -> Vector:
        k = self.composed.polyhedron.ambient_dim
        e = [Fraction(0)] * k
        e[self.t_index] = Fraction(1)
        return tuple(e)


def compose_complementary(a: Instance, b: Instance) -> CompositionGadget:
    """Build the composed instance over ``(x, y; t, u, v)``.

    Both inputs are embedded into common dimensions, given objective
    variables t, and joined by ``z = u + v`` with ``u`` in ``(1-y)`` times
    the first feasible set and ``v`` in ``y`` times the second.  The target
    is ``t + (bound_a - bound_b) y <= bound_a``, which reads ``t <= bound_a``
    at y=0 and ``t <= bound_b`` at y=1.
    """
    if a.goal != GOAL_BOUND or b.goal != GOAL_BOUND:
        raise InputError("composition needs prove-bound instances")
    for inst in (a, b):
        if not is_bounded(inst.polyhedron):
            raise UnboundedPolyhedronError("hull formulation requires bounded inputs")
    n_bar = max(a.dim_int, b.dim_int)
    d_bar = max(a.dim_cont, b.dim_cont)
    a3 = add_objective_variable(
        embed_instance(a, n_bar - a.dim_int, d_bar - a.dim_cont)
    )
    b3 = add_objective_variable(
        embed_instance(b, n_bar - b.dim_int, d_bar - b.dim_cont)
    )
    k = n_bar + d_bar + 1  # z = (x, t) block size

    new_n = n_bar + 1  # x ints, then y
    new_d = (d_bar + 1) + 2 * k
    new_dim = new_n + new_d
    y_pos = n_bar
    z_pos = [j if j < n_bar else j + 1 for j in range(k)]  # skip y slot
    u_base = new_n + d_bar + 1
    v_base = u_base + k
    t_index = z_pos[n_bar + d_bar]

    rows: list[LinearConstraint] = []
    # z = u + v, coordinate by coordinate
    for j in range(k):
        coeffs = [Fraction(0)] * new_dim
        coeffs[z_pos[j]] = Fraction(1)
        coeffs[u_base + j] = Fraction(-1)
        coeffs[v_base + j] = Fraction(-1)
        rows.append(LinearConstraint(tuple(coeffs), "=", Fraction(0)))
    # u in (1-y) * A, homogenized:  g.u + h*y (rel) h
    for c in a3.polyhedron.constraints:
        coeffs = [Fraction(0)] * new_dim
        for j, v in enumerate(c.coeffs):
            coeffs[u_base + j] = v
        coeffs[y_pos] = c.rhs
        rows.append(LinearConstraint(tuple(coeffs), c.relation, c.rhs))
    # v in y * B, homogenized:  g.v - h*y (rel) 0
    for c in b3.polyhedron.constraints:
        coeffs = [Fraction(0)] * new_dim
        for j, v in enumerate(c.coeffs):
            coeffs[v_base + j] = v
        coeffs[y_pos] = -c.rhs
        rows.append(LinearConstraint(tuple(coeffs), c.relation, Fraction(0)))
    # 0 <= y <= 1
    e = [Fraction(0)] * new_dim
    e[y_pos] = Fraction(1)
    rows.append(LinearConstraint(tuple(e), ">=", Fraction(0)))
    rows.append(LinearConstraint(tuple(e), "<=", Fraction(1)))

    objective = [Fraction(0)] * new_dim
    objective[t_index] = Fraction(1)
    objective[y_pos] = a.bound - b.bound
    composed = Instance(
        Polyhedron(new_n, new_d, tuple(rows)),
        tuple(objective),
        a.bound,
        GOAL_BOUND,
    )
    return CompositionGadget(a, b, composed, y_pos, t_index)


def build_composed_proof(gadget: CompositionGadget) -> ProofTree:
    """The canonical branch-and-cut proof of the composed target: branch on
    the selector first, close the y=0 fiber with one CG cut derived from the
    first instance's (integral, integer-supported) objective, and run
    variable branching on the y=1 fiber."""
    composed = gadget.composed
    a = gadget.instance_a
    if any(v.denominator != 1 for v in a.objective) or any(
        v != 0 for v in a.objective[a.dim_int :]
    ):
        raise TransformError(
            "fiber cut needs an integral, integer-supported objective on the first instance"
        )
    tree = ProofTree(composed, mode=MODE_UNRESTRICTED)
    root = tree.add_root()
    n, d = composed.dim_int, composed.dim_cont
    fiber0, fiber1 = tree.branch(
        root, make_variable_disjunction(gadget.y_index, 0, n, d)
    )

    # y = 0 fiber: one CG round from the embedded objective direction.
    target = [Fraction(0)] * composed.polyhedron.ambient_dim
    for j in range(a.dim_int):
        target[j] = a.objective[j]
    relax0 = tree.relaxation(fiber0)
    lam = best_cg_multipliers(relax0, target)
    if lam is None:
        raise TransformError("objective direction is not a row combination on the fiber")
    cut = generate_cg_cut(relax0, lam)
    after = tree.cut(fiber0, cut)
    tree.leaf(after, _leaf_reason(tree, after))

    # y = 1 fiber: variable branching, grafted in place.
    sub_inst = Instance(
        tree.relaxation(fiber1), composed.objective, composed.bound, GOAL_BOUND
    )
    sub = run_branch_and_cut(sub_inst, variable_branching_strategy())
    graft(tree, fiber1, sub)
    return tree
