"""
Networks of n identical-dimension agents, x(t+1) = Ax(t) over F_p, and the
algebraic synchronisation and consensus criteria built on the agreement subspace.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
from collections import abc as collections_abc

import numpy as np

from fieldsync import dynamics, fp_core, linalg

logger = logging.getLogger(__name__)

@dataclasses.dataclass(frozen=True)
class NetworkSystem:
    """
    A network of `num_agents` agents with `agent_dim`-dimensional states. Block
    (i, j) of `matrix` (zero-indexed) is the coupling A_ij from agent j to agent i.
    """

    field: fp_core.PrimeField
    num_agents: int
    agent_dim: int
    matrix: linalg.Matrix

    def __post_init__(self) -> None:
        if self.num_agents < 1 or self.agent_dim < 1:
            raise ValueError("A network needs at least one agent of dimension >= 1")
        self.field.require_same(self.matrix.field)
        if self.matrix.shape != (self.total_dim, self.total_dim):
            raise linalg.DimensionMismatchError(
                f"Expected a {self.total_dim}x{self.total_dim} matrix for "
                f"n={self.num_agents}, m={self.agent_dim}, got {self.matrix.shape}"
            )

    @classmethod
    def from_rows(
        cls,
        p: int,
        num_agents: int,
        agent_dim: int,
        rows: collections_abc.Sequence[collections_abc.Sequence[int]],
    ) -> NetworkSystem:
        field = fp_core.PrimeField(p)
        return cls(field, num_agents, agent_dim, linalg.Matrix(field, rows))

    @classmethod
    def from_kronecker(cls, coupling: linalg.Matrix, agent_dim: int) -> NetworkSystem:
        """Builds the network x(t+1) = (M ⊗ I_m) x(t) from an n x n coupling."""
        if not coupling.is_square:
            raise linalg.DimensionMismatchError("Coupling matrix must be square")
        field = coupling.field
        matrix = np.kron(coupling.array, np.eye(agent_dim, dtype=np.int64))
        return cls(field, coupling.rows, agent_dim, linalg.Matrix(field, matrix))

    @property
    def total_dim(self) -> int:
        return self.num_agents * self.agent_dim

    @property
    def state_space_size(self) -> int:
        return int(self.field.p**self.total_dim)

    def block(self, i: int, j: int) -> linalg.Matrix:
        m = self.agent_dim
        return self.matrix.block(i * m, (i + 1) * m, j * m, (j + 1) * m)

    def stack_agents(self, vector: linalg.Matrix) -> linalg.Matrix:
        """Returns 1_n ⊗ vector for an m x k matrix of agent states."""
        return linalg.vstack(self.field, vector.cols, [vector] * self.num_agents)


class Criterion(enum.Enum):
    """Which synchronisation criterion decided; the values are the report tags."""

    INVARIANT_SYNC_SET = "thm1"
    GENERAL = "thm2"


@dataclasses.dataclass(frozen=True)
class SyncStructure:
    block_row_sums: tuple[linalg.Matrix, ...]
    sync_set_invariant: bool
    agreement_basis: linalg.Matrix
    """Columns alpha_1..alpha_d spanning the agreement subspace, as used for Q."""
    agreement_dim: int
    restriction_matrix: linalg.Matrix
    char_poly_network: fp_core.Polynomial
    char_poly_restriction: fp_core.Polynomial
    min_poly_restriction: fp_core.Polynomial


@dataclasses.dataclass(frozen=True)
class Verdicts:
    synchronizes: bool
    consensus: bool
    criterion: Criterion
    nilpotent_consensus: bool
    """Consensus reached only in the degenerate form where every state dies out to 0."""


@dataclasses.dataclass(frozen=True)
class CrossChecks:
    reduction_nilpotent: bool
    oracle_agrees: bool | None
    dimension_formula_ok: bool
    invariant_case_agrees: bool | None


@dataclasses.dataclass(frozen=True)
class TerminalBehaviour:
    generator: str
    """Name of the matrix driving the synchronised motion: "A1" or "Q"."""
    period: int | None


@dataclasses.dataclass(frozen=True)
class AnalysisReport:
    p: int
    num_agents: int
    agent_dim: int
    structure: SyncStructure
    verdicts: Verdicts
    cross_checks: CrossChecks
    terminal: TerminalBehaviour | None


@dataclasses.dataclass(frozen=True)
class BlockReduction:
    """
    The network in coordinates adapted to the agreement subspace. `conjugated` is
    T^-1 A T, block upper triangular with `top_left` = Q.
    """

    transform: linalg.Matrix
    conjugated: linalg.Matrix
    top_left: linalg.Matrix
    top_right: linalg.Matrix
    bottom_right: linalg.Matrix


def block_row_sums(sys: NetworkSystem) -> tuple[linalg.Matrix, ...]:
    """A_i = A_i1 + ... + A_in for every agent i."""
    sums = []
    for i in range(sys.num_agents):
        total = linalg.Matrix.zeros(sys.field, sys.agent_dim, sys.agent_dim)
        for j in range(sys.num_agents):
            total = total + sys.block(i, j)
        sums.append(total)
    return tuple(sums)


def sync_set_is_invariant(sys: NetworkSystem) -> bool:
    """The set of fully synchronised states is A-invariant iff all A_i are equal."""
    first, *rest = block_row_sums(sys)
    return all(other == first for other in rest)


def agreement_constraints(sys: NetworkSystem) -> linalg.Matrix:
    """Stack of (A_i - A_1) A_1^t for i = 2..n, t = 0..m-1."""
    first, *rest = block_row_sums(sys)
    powers = [first**t for t in range(sys.agent_dim)]
    blocks = [(other - first) @ power for power in powers for other in rest]
    return linalg.vstack(sys.field, sys.agent_dim, blocks)


def agreement_subspace(sys: NetworkSystem) -> linalg.SubspaceBasis:
    """
    The largest subspace of agent states on which every agent's iterated response to
    a synchronised state agrees with agent 1's.
    """
    return linalg.kernel_basis(agreement_constraints(sys))


def agreement_subspace_by_powers(sys: NetworkSystem) -> linalg.SubspaceBasis:
    """The same subspace described as {α : A_1^t α = A_i^t α, t = 1..m}."""
    first, *rest = block_row_sums(sys)
    blocks = [
        other**t - first**t for t in range(1, sys.agent_dim + 1) for other in rest
    ]
    return linalg.kernel_basis(linalg.vstack(sys.field, sys.agent_dim, blocks))


def resolve_agreement_basis(
    sys: NetworkSystem, supplied: linalg.Matrix | None = None
) -> linalg.Matrix:
    """
    Returns the basis columns to build Q from: the canonical kernel basis, or a
    supplied basis once it is checked to be a basis of the same subspace.
    """
    canonical = agreement_subspace(sys)
    if supplied is None:
        return canonical.vectors

    if supplied.rows != sys.agent_dim:
        raise BasisMismatchError(
            f"Basis vectors must have length {sys.agent_dim}, got {supplied.rows}"
        )
    if linalg.rank(supplied) != supplied.cols:
        raise BasisMismatchError("Supplied basis vectors are linearly dependent")
    if linalg.SubspaceBasis.spanned_by(supplied) != canonical:
        raise BasisMismatchError(
            "Supplied basis does not span the agreement subspace "
            f"(dimension {canonical.dim})"
        )
    return supplied


def restriction_matrix(
    sys: NetworkSystem, basis: linalg.SubspaceBasis | linalg.Matrix
) -> linalg.Matrix:
    """
    The unique d x d matrix Q with A_1 B = B Q, where B holds the basis columns.

    Raises:
        ConsistencyViolationError: The basis does not span an A_1-invariant subspace,
            which cannot happen for the agreement subspace.
    """
    columns = basis.vectors if isinstance(basis, linalg.SubspaceBasis) else basis
    first = block_row_sums(sys)[0]
    try:
        q = linalg.solve_right(columns, first @ columns)
    except linalg.InconsistentSystemError as e:
        raise linalg.ConsistencyViolationError(
            "Agreement subspace is not invariant under A_1"
        ) from e

    if first @ columns != columns @ q:
        raise linalg.ConsistencyViolationError("A_1 B - B Q is not zero")
    return q


def check_invariant_case_sync(sys: NetworkSystem) -> bool:
    """
    For an A-invariant synchronisation set: the network synchronises iff
    P_A = λ^(nm-m) P_A1.

    Raises:
        CriterionNotApplicableError: The synchronisation set is not A-invariant.
    """
    _require_invariant_sync_set(sys)
    first = block_row_sums(sys)[0]
    expected = fp_core.Polynomial.monomial(
        sys.field, sys.total_dim - sys.agent_dim
    ) * linalg.char_poly(first)
    return linalg.char_poly(sys.matrix) == expected


def check_general_sync(
    sys: NetworkSystem, basis: linalg.Matrix | None = None
) -> bool:
    """The network synchronises iff P_A = λ^(nm-d) P_Q."""
    columns = resolve_agreement_basis(sys, basis)
    q = restriction_matrix(sys, columns)
    expected = fp_core.Polynomial.monomial(
        sys.field, sys.total_dim - q.rows
    ) * linalg.char_poly(q)
    return linalg.char_poly(sys.matrix) == expected


def check_consensus(sys: NetworkSystem, basis: linalg.Matrix | None = None) -> bool:
    """
    The network reaches consensus iff it synchronises and Q has a minimal
    polynomial λ^s (λ - 1). A nilpotent (or empty) Q also counts: every trajectory
    then stops at the fixed point 0.
    """
    if not check_general_sync(sys, basis):
        return False
    q = restriction_matrix(sys, resolve_agreement_basis(sys, basis))
    return linalg.has_fixed_point_form(linalg.min_poly(q))


def check_scalar_sync(sys: NetworkSystem) -> bool:
    """
    Scalar agents (m = 1) with A 1_n = α 1_n: the network synchronises iff
    P_A = λ^(n-1) (λ - α).

    Raises:
        CriterionNotApplicableError: m != 1 or the row sums differ.
    """
    if sys.agent_dim != 1:
        raise CriterionNotApplicableError("Scalar criterion requires m = 1")
    row_sums = {sys.field.reduce(int(s)) for s in sys.matrix.array.sum(axis=1)}
    if len(row_sums) != 1:
        raise CriterionNotApplicableError("Row sums of A are not all equal")
    (alpha,) = row_sums
    expected = fp_core.Polynomial.monomial(
        sys.field, sys.num_agents - 1
    ) * fp_core.Polynomial.from_roots(sys.field, [alpha])
    return linalg.char_poly(sys.matrix) == expected


def check_invariant_case_consensus(sys: NetworkSystem) -> bool:
    """
    For an A-invariant synchronisation set: consensus iff the network synchronises
    and A_1 has the fixed-point minimal polynomial form.
    """
    if not check_invariant_case_sync(sys):
        return False
    first = block_row_sums(sys)[0]
    return linalg.has_fixed_point_form(linalg.min_poly(first))


def invariant_case_reduction(sys: NetworkSystem) -> linalg.Matrix:
    """
    Changes coordinates to z_1 = x_1, z_i = x_i - x_1 and returns the block driving
    the differences z_2..z_n. The network synchronises iff that block is nilpotent.
    """
    _require_invariant_sync_set(sys)
    field = sys.field
    m = sys.agent_dim
    rest = sys.total_dim - m
    ones_kron = np.kron(
        np.ones((sys.num_agents - 1, 1), dtype=np.int64), np.eye(m, dtype=np.int64)
    )
    transform = np.eye(sys.total_dim, dtype=np.int64)
    transform[m:, :m] = -ones_kron
    transform_inverse = np.eye(sys.total_dim, dtype=np.int64)
    transform_inverse[m:, :m] = ones_kron

    conjugated = (
        linalg.Matrix(field, transform)
        @ sys.matrix
        @ linalg.Matrix(field, transform_inverse)
    )
    if not conjugated.block(m, sys.total_dim, 0, m).is_zero():
        raise linalg.ConsistencyViolationError(
            "Difference coordinates are driven by the synchronised component"
        )
    if conjugated.block(0, m, 0, m) != block_row_sums(sys)[0]:
        raise linalg.ConsistencyViolationError("Top-left block differs from A_1")
    return conjugated.block(m, m + rest, m, m + rest)


def block_reduction(
    sys: NetworkSystem, basis: linalg.Matrix | None = None
) -> BlockReduction:
    """
    Extends the basis 1_n ⊗ α_i of the lifted agreement subspace to a basis T of the
    whole state space and returns T^-1 A T.

    Raises:
        ConsistencyViolationError: The lifted subspace is not A-invariant.
    """
    columns = resolve_agreement_basis(sys, basis)
    d = columns.cols
    lifted = sys.stack_agents(columns)
    transform = linalg.extend_to_full_basis(lifted)
    conjugated = linalg.inverse(transform) @ sys.matrix @ transform

    total = sys.total_dim
    if not conjugated.block(d, total, 0, d).is_zero():
        raise linalg.ConsistencyViolationError(
            "Lifted agreement subspace is not A-invariant"
        )
    top_left = conjugated.block(0, d, 0, d)
    if top_left != restriction_matrix(sys, columns):
        raise linalg.ConsistencyViolationError(
            "Top-left block differs from the restriction matrix"
        )
    return BlockReduction(
        transform=transform,
        conjugated=conjugated,
        top_left=top_left,
        top_right=conjugated.block(0, d, d, total),
        bottom_right=conjugated.block(d, total, d, total),
    )


def reduction_crosscheck(
    sys: NetworkSystem, basis: linalg.Matrix | None = None
) -> bool:
    """Synchronisation decided through the block reduction: is Â_22 nilpotent?"""
    return linalg.is_nilpotent(block_reduction(sys, basis).bottom_right)


def analyze(
    sys: NetworkSystem,
    basis: linalg.Matrix | None = None,
    period_limit: int = linalg.DEFAULT_PERIOD_LIMIT,
) -> AnalysisReport:
    """
    Runs every criterion on the network and cross-checks them against each other and
    against the algebraic oracles.

    Raises:
        ConsistencyViolationError: Any two routes to the same verdict disagree.
        BasisMismatchError: The supplied basis does not span the agreement subspace.
    """
    logger.debug(
        "Analysing network p=%d n=%d m=%d", sys.field.p, sys.num_agents, sys.agent_dim
    )
    sums = block_row_sums(sys)
    invariant = sync_set_is_invariant(sys)
    columns = resolve_agreement_basis(sys, basis)
    q = restriction_matrix(sys, columns)
    structure = SyncStructure(
        block_row_sums=sums,
        sync_set_invariant=invariant,
        agreement_basis=columns,
        agreement_dim=columns.cols,
        restriction_matrix=q,
        char_poly_network=linalg.char_poly(sys.matrix),
        char_poly_restriction=linalg.char_poly(q),
        min_poly_restriction=linalg.min_poly(q),
    )
    logger.debug("Agreement subspace has dimension %d", structure.agreement_dim)

    if invariant and structure.agreement_dim != sys.agent_dim:
        raise linalg.ConsistencyViolationError(
            "Invariant synchronisation set but agreement subspace is not everything"
        )

    synchronizes = check_general_sync(sys, columns)
    reduction_nilpotent = reduction_crosscheck(sys, columns)
    if reduction_nilpotent != synchronizes:
        raise linalg.ConsistencyViolationError(
            f"Block reduction says {reduction_nilpotent}, criterion says {synchronizes}"
        )

    invariant_case_agrees = None
    if invariant:
        by_invariant_case = check_invariant_case_sync(sys)
        reduced_nilpotent = linalg.is_nilpotent(invariant_case_reduction(sys))
        invariant_case_agrees = by_invariant_case == synchronizes == reduced_nilpotent
        if not invariant_case_agrees:
            raise linalg.ConsistencyViolationError(
                "Invariant-case criterion disagrees with the general criterion"
            )

    consensus = synchronizes and linalg.has_fixed_point_form(
        structure.min_poly_restriction
    )
    _, cofactor = fp_core.split_nilpotent_part(structure.min_poly_restriction)
    nilpotent_consensus = consensus and cofactor == fp_core.Polynomial.one(sys.field)

    oracle_sync = dynamics.oracle_sync_algebraic(sys)
    oracle_consensus = dynamics.oracle_consensus_algebraic(sys)
    oracle_agrees = oracle_sync == synchronizes and oracle_consensus == consensus
    if not oracle_agrees:
        raise linalg.ConsistencyViolationError(
            f"Oracle verdicts (sync={oracle_sync}, consensus={oracle_consensus}) "
            f"disagree with criteria (sync={synchronizes}, consensus={consensus})"
        )

    cycles = dynamics.cycle_set(sys)

    terminal = None
    if synchronizes:
        generator = "A1" if invariant else "Q"
        terminal = TerminalBehaviour(
            generator=generator,
            period=linalg.terminal_period(q, period_limit),
        )

    return AnalysisReport(
        p=sys.field.p,
        num_agents=sys.num_agents,
        agent_dim=sys.agent_dim,
        structure=structure,
        verdicts=Verdicts(
            synchronizes=synchronizes,
            consensus=consensus,
            criterion=Criterion.INVARIANT_SYNC_SET if invariant else Criterion.GENERAL,
            nilpotent_consensus=nilpotent_consensus,
        ),
        cross_checks=CrossChecks(
            reduction_nilpotent=reduction_nilpotent,
            oracle_agrees=oracle_agrees,
            dimension_formula_ok=cycles.satisfies_dimension_formula,
            invariant_case_agrees=invariant_case_agrees,
        ),
        terminal=terminal,
    )


def _require_invariant_sync_set(sys: NetworkSystem) -> None:
    if not sync_set_is_invariant(sys):
        raise CriterionNotApplicableError(
            "The synchronisation set is not A-invariant (block row sums differ)"
        )


class CriterionNotApplicableError(Exception):
    pass


class BasisMismatchError(ValueError):
    pass
