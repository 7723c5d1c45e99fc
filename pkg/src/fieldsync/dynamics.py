"""
Trajectories of x(t+1) = Ax(t), the cycle set, and definitional oracles for
synchronisation and consensus that do not go through the characteristic polynomial
criteria.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import functools
import logging
from collections import abc as collections_abc
from typing import TYPE_CHECKING, Final

import numpy as np
import numpy.typing as npt

from fieldsync import fp_core, linalg

if TYPE_CHECKING:
    from fieldsync import netmodel

logger = logging.getLogger(__name__)

DEFAULT_STATE_LIMIT: Final = 2_000_000
DEFAULT_CHUNK_SIZE: Final = 1 << 16


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """
    States x(0), x(1), ..., x(steps). `cycle_start` is the first t with x(t) on its
    eventual cycle and `period` the length of that cycle, or None when it is longer
    than the search limit. `sync_time` is the first t from which every later state
    has all agent blocks equal, or None if the cycle leaves the synchronisation set.
    """

    states: tuple[tuple[int, ...], ...]
    cycle_start: int
    period: int | None
    sync_time: int | None

    @property
    def cycle(self) -> tuple[tuple[int, ...], ...]:
        """The recorded states of the first full pass around the eventual cycle."""
        if self.period is None:
            return ()
        return self.states[self.cycle_start : self.cycle_start + self.period]


@dataclasses.dataclass(frozen=True)
class CycleSet:
    basis: linalg.SubspaceBasis
    expected_dim: int
    """Degree of f_A in P_A = λ^k f_A, which the dimension must equal."""

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def satisfies_dimension_formula(self) -> bool:
        return self.dim == self.expected_dim


def _is_synchronized(state: collections_abc.Sequence[int], agent_dim: int) -> bool:
    first = state[:agent_dim]
    return all(
        state[start : start + agent_dim] == first
        for start in range(agent_dim, len(state), agent_dim)
    )


def _cycle_period(
    matrix: linalg.IntArray, start: linalg.IntArray, p: int, limit: int
) -> int | None:
    state = linalg.matmul_mod(matrix, start, p)
    for period in range(1, limit + 1):
        if np.array_equal(state, start):
            return period
        state = linalg.matmul_mod(matrix, state, p)
    return None


def simulate(
    sys: netmodel.NetworkSystem,
    x0: collections_abc.Sequence[int],
    steps: int,
    *,
    period_limit: int = linalg.DEFAULT_PERIOD_LIMIT,
) -> Trajectory:
    """
    Iterates the network from x0 for `steps` steps. Every state from t = nm on lies
    on a cycle, so `cycle_start` and `sync_time` are read off the first 2nm states;
    only the period needs a search, bounded by `period_limit`.

    Raises:
        InitialStateError: x0 has the wrong length or entries outside [0, p), or
            `steps` is negative.
    """
    if len(x0) != sys.total_dim:
        raise InitialStateError(
            f"Initial state has length {len(x0)}, expected {sys.total_dim}"
        )
    if steps < 0:
        raise InitialStateError("Number of steps must be non-negative")
    if any(not 0 <= v < sys.field.p for v in x0):
        raise InitialStateError(
            f"Initial state entries must lie in [0, {sys.field.p - 1}]"
        )

    p = sys.field.p
    nm = sys.total_dim
    matrix = sys.matrix.array
    state = np.array(x0, dtype=np.int64)
    history: list[tuple[int, ...]] = []
    for _ in range(max(steps + 1, 2 * nm)):
        history.append(tuple(int(v) for v in state))
        state = linalg.matmul_mod(matrix, state, p)

    cycles = cycle_set(sys, strict=False).basis
    cycle_start = next(
        t
        for t in range(nm + 1)
        if cycles.contains(linalg.Matrix.column_vector(sys.field, history[t]))
    )
    period = _cycle_period(
        matrix, np.array(history[cycle_start], dtype=np.int64), p, period_limit
    )

    # x(t) stays synchronised iff x(t), ..., x(t + nm - 1) all are
    synchronized = [_is_synchronized(s, sys.agent_dim) for s in history[: 2 * nm]]
    sync_time = next(
        (t for t in range(nm + 1) if all(synchronized[t : t + nm])), None
    )

    logger.debug(
        "Trajectory reaches its cycle at t=%d, period=%s, sync_time=%s",
        cycle_start,
        period,
        sync_time,
    )
    return Trajectory(
        states=tuple(history[: steps + 1]),
        cycle_start=cycle_start,
        period=period,
        sync_time=sync_time,
    )


def cycle_set(sys: netmodel.NetworkSystem, *, strict: bool = True) -> CycleSet:
    """
    The union of all cycles of the state graph, as the image of A^(nm). Every
    trajectory is inside it after nm steps.

    Raises:
        ConsistencyViolationError: With `strict`, if the dimension is not deg f_A.
    """
    basis = linalg.image_basis(sys.matrix**sys.total_dim)
    _, cofactor = fp_core.split_nilpotent_part(linalg.char_poly(sys.matrix))
    cycles = CycleSet(basis=basis, expected_dim=int(cofactor.degree))
    if strict and not cycles.satisfies_dimension_formula:
        raise linalg.ConsistencyViolationError(
            f"Cycle set has dimension {cycles.dim}, expected {cycles.expected_dim}"
        )
    return cycles


def block_difference_operator(sys: netmodel.NetworkSystem) -> linalg.Matrix:
    """The (n-1)m x nm matrix mapping x to (x_2 - x_1, ..., x_n - x_1)."""
    m = sys.agent_dim
    rest = sys.total_dim - m
    operator = np.zeros((rest, sys.total_dim), dtype=np.int64)
    operator[:, :m] = -np.kron(
        np.ones((sys.num_agents - 1, 1), dtype=np.int64), np.eye(m, dtype=np.int64)
    )
    operator[:, m:] = np.eye(rest, dtype=np.int64)
    return linalg.Matrix(sys.field, operator, shape=(rest, sys.total_dim))


def oracle_sync_algebraic(sys: netmodel.NetworkSystem) -> bool:
    """Synchronisation iff every cycle lies in the synchronisation set: E A^(nm) = 0."""
    return (block_difference_operator(sys) @ sys.matrix**sys.total_dim).is_zero()


def oracle_consensus_algebraic(sys: netmodel.NetworkSystem) -> bool:
    """
    Consensus iff the network synchronises and the cycle set is exactly the set of
    fixed points of A.
    """
    if not oracle_sync_algebraic(sys):
        return False
    identity = linalg.Matrix.identity(sys.field, sys.total_dim)
    fixed_points = linalg.kernel_basis(sys.matrix - identity)
    return cycle_set(sys).basis == fixed_points


def initial_states(
    field: fp_core.PrimeField, dim: int, start: int, stop: int
) -> linalg.IntArray:
    """
    Columns are the states with indices start..stop-1, decoded little-endian in base
    p (digit i of the index is component i of the state).
    """
    indices = np.arange(start, stop, dtype=np.int64)
    powers = np.array([field.p**i for i in range(dim)], dtype=np.int64)
    digits = (indices[np.newaxis, :] // powers[:, np.newaxis]) % field.p
    return np.asarray(digits, dtype=np.int64)


def _synchronized_columns(
    states: linalg.IntArray, num_agents: int, agent_dim: int
) -> npt.NDArray[np.bool_]:
    blocks = states.reshape(num_agents, agent_dim, states.shape[1])
    return np.asarray(np.all(blocks == blocks[0], axis=(0, 1)), dtype=np.bool_)


def _advance(sys: netmodel.NetworkSystem, states: linalg.IntArray) -> linalg.IntArray:
    """Moves every state onto its cycle."""
    for _ in range(sys.total_dim):
        states = linalg.matmul_mod(sys.matrix.array, states, sys.field.p)
    return states


def _chunk_synchronizes(sys: netmodel.NetworkSystem, start: int, stop: int) -> bool:
    entry = _advance(sys, initial_states(sys.field, sys.total_dim, start, stop))
    current = entry
    while current.shape[1]:
        if not _synchronized_columns(current, sys.num_agents, sys.agent_dim).all():
            return False
        current = linalg.matmul_mod(sys.matrix.array, current, sys.field.p)
        still_open = np.any(current != entry, axis=0)
        current, entry = current[:, still_open], entry[:, still_open]
    return True


def _chunk_reaches_consensus(
    sys: netmodel.NetworkSystem, start: int, stop: int
) -> bool:
    entry = _advance(sys, initial_states(sys.field, sys.total_dim, start, stop))
    successor = linalg.matmul_mod(sys.matrix.array, entry, sys.field.p)
    fixed = np.all(successor == entry, axis=0)
    synchronized = _synchronized_columns(entry, sys.num_agents, sys.agent_dim)
    return bool(np.all(fixed & synchronized))


def _check_all_states(
    sys: netmodel.NetworkSystem,
    chunk_check: collections_abc.Callable[[netmodel.NetworkSystem, int, int], bool],
    state_limit: int,
    chunk_size: int,
    workers: int,
) -> bool:
    total = sys.state_space_size
    if total > state_limit:
        raise StateLimitExceededError(
            f"State space has {sys.field.p}^{sys.total_dim} = {total} states, "
            f"exceeding the limit of {state_limit}"
        )
    bounds = [
        (start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)
    ]
    logger.debug("Checking %d states in %d chunks", total, len(bounds))

    check = functools.partial(chunk_check, sys)
    if workers <= 1:
        return all(check(start, stop) for start, stop in bounds)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return all(executor.map(lambda bound: check(*bound), bounds))


def oracle_sync_exhaustive(
    sys: netmodel.NetworkSystem,
    state_limit: int = DEFAULT_STATE_LIMIT,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> bool:
    """
    Synchronisation straight from the definition: every initial state is run nm
    steps onto its cycle, and the whole cycle must have equal agent blocks.

    Raises:
        StateLimitExceededError: p^(nm) exceeds `state_limit`.
    """
    return _check_all_states(sys, _chunk_synchronizes, state_limit, chunk_size, workers)


def oracle_consensus_exhaustive(
    sys: netmodel.NetworkSystem,
    state_limit: int = DEFAULT_STATE_LIMIT,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> bool:
    """
    Consensus straight from the definition: every trajectory ends in a fixed point
    with equal agent blocks.

    Raises:
        StateLimitExceededError: p^(nm) exceeds `state_limit`.
    """
    return _check_all_states(
        sys, _chunk_reaches_consensus, state_limit, chunk_size, workers
    )


class StateLimitExceededError(Exception):
    pass


class InitialStateError(ValueError):
    pass
