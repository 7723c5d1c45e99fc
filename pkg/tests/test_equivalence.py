"""
Randomised cross-checks: every algebraic criterion against brute-force enumeration of
the state space, on families small enough to enumerate.
"""

import numpy as np
import pytest

from fieldsync import dynamics, fp_core, linalg, netmodel
from tests.systems import random_invertible, random_matrix

FAMILIES = [(2, 2, 1), (2, 2, 2), (2, 3, 1), (3, 2, 2), (3, 3, 1), (5, 2, 2)]
SAMPLES = 500


def _random_network(
    rng: np.random.Generator, p: int, n: int, m: int
) -> netmodel.NetworkSystem:
    field = fp_core.PrimeField(p)
    return netmodel.NetworkSystem(field, n, m, random_matrix(rng, field, n * m, n * m))


def _difference_transform(field: fp_core.PrimeField, n: int, m: int) -> linalg.Matrix:
    """Maps x to (x_1, x_2 - x_1, ..., x_n - x_1)."""
    transform = np.eye(n * m, dtype=np.int64)
    ones = np.ones((n - 1, 1), dtype=np.int64)
    transform[m:, :m] = -np.kron(ones, np.eye(m, dtype=np.int64))
    return linalg.Matrix(field, transform)


def _synchronizing_network(
    rng: np.random.Generator,
    p: int,
    n: int,
    m: int,
    first: linalg.Matrix | None = None,
) -> netmodel.NetworkSystem:
    """
    A network whose agent differences are driven by a nilpotent block, so it
    synchronises by construction. `first` fixes the block driving agent 1.
    """
    field = fp_core.PrimeField(p)
    rest = (n - 1) * m
    strictly_upper = np.triu(rng.integers(0, p, size=(rest, rest)), k=1)
    mixing = random_invertible(rng, field, rest)
    nilpotent = mixing @ linalg.Matrix(field, strictly_upper) @ linalg.inverse(mixing)

    if first is None:
        first = random_matrix(rng, field, m, m)
    coupling = random_matrix(rng, field, m, rest)
    in_differences = linalg.hstack(field, m, [first, coupling])
    lower = linalg.hstack(field, rest, [linalg.Matrix.zeros(field, rest, m), nilpotent])
    block_triangular = linalg.vstack(field, n * m, [in_differences, lower])

    transform = _difference_transform(field, n, m)
    matrix = linalg.inverse(transform) @ block_triangular @ transform
    return netmodel.NetworkSystem(field, n, m, matrix)


def _equal_row_sum_network(
    rng: np.random.Generator, p: int, n: int, m: int
) -> netmodel.NetworkSystem:
    """A random network whose last block column is set so every A_i is the same."""
    field = fp_core.PrimeField(p)
    blocks = rng.integers(0, p, size=(n, n, m, m))
    target = rng.integers(0, p, size=(m, m))
    blocks[:, -1] = (target - blocks[:, :-1].sum(axis=1)) % p
    matrix = blocks.transpose(0, 2, 1, 3).reshape(n * m, n * m)
    return netmodel.NetworkSystem(field, n, m, linalg.Matrix(field, matrix))


def _assert_criteria_match_enumeration(system: netmodel.NetworkSystem) -> None:
    synchronizes = netmodel.check_general_sync(system)
    assert synchronizes == dynamics.oracle_sync_exhaustive(system)
    assert synchronizes == dynamics.oracle_sync_algebraic(system)
    assert synchronizes == netmodel.reduction_crosscheck(system)

    consensus = netmodel.check_consensus(system)
    assert consensus == dynamics.oracle_consensus_exhaustive(system)
    assert consensus == dynamics.oracle_consensus_algebraic(system)

    if netmodel.sync_set_is_invariant(system):
        assert netmodel.check_invariant_case_sync(system) == synchronizes
        assert netmodel.check_invariant_case_consensus(system) == consensus
        reduced = netmodel.invariant_case_reduction(system)
        assert linalg.is_nilpotent(reduced) == synchronizes


class TestRandomFamilies:
    @pytest.mark.parametrize(("p", "n", "m"), FAMILIES)
    def test_criteria_match_enumeration(
        self, p: int, n: int, m: int, rng: np.random.Generator
    ) -> None:
        for _ in range(SAMPLES):
            _assert_criteria_match_enumeration(_random_network(rng, p, n, m))

    @pytest.mark.parametrize(("p", "n", "m"), FAMILIES)
    def test_structure(self, p: int, n: int, m: int, rng: np.random.Generator) -> None:
        for _ in range(SAMPLES):
            system = _random_network(rng, p, n, m)
            subspace = netmodel.agreement_subspace(system)
            assert subspace == netmodel.agreement_subspace_by_powers(system)
            if netmodel.sync_set_is_invariant(system):
                assert subspace.dim == m

            q = netmodel.restriction_matrix(system, subspace)
            first = netmodel.block_row_sums(system)[0]
            assert first @ subspace.vectors == subspace.vectors @ q

            assert dynamics.cycle_set(system, strict=False).satisfies_dimension_formula

    @pytest.mark.parametrize(("p", "n", "m"), FAMILIES)
    def test_analysis_never_contradicts_itself(
        self, p: int, n: int, m: int, rng: np.random.Generator
    ) -> None:
        for _ in range(SAMPLES // 5):
            report = netmodel.analyze(_random_network(rng, p, n, m))
            assert report.cross_checks.oracle_agrees
            assert report.cross_checks.dimension_formula_ok
            assert report.cross_checks.reduction_nilpotent == (
                report.verdicts.synchronizes
            )

    @pytest.mark.parametrize(("p", "n", "m"), FAMILIES)
    def test_simulation_agrees_with_verdict(
        self, p: int, n: int, m: int, rng: np.random.Generator
    ) -> None:
        for _ in range(SAMPLES // 5):
            system = _random_network(rng, p, n, m)
            x0 = rng.integers(0, p, size=n * m).tolist()
            trajectory = dynamics.simulate(system, x0, n * m)
            if netmodel.check_general_sync(system):
                assert trajectory.sync_time is not None
                assert trajectory.sync_time <= n * m


class TestSynchronizingByConstruction:
    @pytest.mark.parametrize(("p", "n", "m"), FAMILIES)
    def test_synchronizes(
        self, p: int, n: int, m: int, rng: np.random.Generator
    ) -> None:
        for _ in range(SAMPLES // 5):
            system = _synchronizing_network(rng, p, n, m)
            assert netmodel.sync_set_is_invariant(system)
            assert netmodel.check_general_sync(system)
            assert netmodel.check_invariant_case_sync(system)
            _assert_criteria_match_enumeration(system)

    @pytest.mark.parametrize(("p", "n", "m"), FAMILIES)
    def test_consensus(self, p: int, n: int, m: int, rng: np.random.Generator) -> None:
        field = fp_core.PrimeField(p)
        # Projection onto the first coordinate: every synchronised motion stops
        projection = np.zeros((m, m), dtype=np.int64)
        projection[0, 0] = 1
        first = linalg.Matrix(field, projection)
        for _ in range(SAMPLES // 5):
            system = _synchronizing_network(rng, p, n, m, first=first)
            assert netmodel.check_consensus(system)
            assert netmodel.check_invariant_case_consensus(system)
            _assert_criteria_match_enumeration(system)


class TestEqualBlockRowSums:
    @pytest.mark.parametrize(("p", "n", "m"), FAMILIES)
    def test_invariant_case_matches_general(
        self, p: int, n: int, m: int, rng: np.random.Generator
    ) -> None:
        outcomes = []
        for sample in range(200):
            # Alternate so both outcomes occur in every family
            if sample % 2:
                system = _synchronizing_network(rng, p, n, m)
            else:
                system = _equal_row_sum_network(rng, p, n, m)
            sums = netmodel.block_row_sums(system)
            assert all(block == sums[0] for block in sums)
            assert netmodel.sync_set_is_invariant(system)
            assert netmodel.agreement_subspace(system).dim == m

            synchronizes = netmodel.check_general_sync(system)
            assert netmodel.check_invariant_case_sync(system) == synchronizes
            assert synchronizes == dynamics.oracle_sync_exhaustive(system)
            outcomes.append(synchronizes)

        assert any(outcomes)
        assert not all(outcomes)


class TestScalarAgents:
    @pytest.mark.parametrize(("p", "n"), [(2, 3), (3, 3), (5, 2), (3, 4)])
    def test_equal_row_sums(self, p: int, n: int, rng: np.random.Generator) -> None:
        field = fp_core.PrimeField(p)
        for _ in range(200):
            rows = rng.integers(0, p, size=(n, n))
            alpha = int(rng.integers(0, p))
            rows[:, -1] = (alpha - rows[:, :-1].sum(axis=1)) % p
            system = netmodel.NetworkSystem(field, n, 1, linalg.Matrix(field, rows))

            by_scalar = netmodel.check_scalar_sync(system)
            assert by_scalar == netmodel.check_invariant_case_sync(system)
            assert by_scalar == netmodel.check_general_sync(system)
            assert by_scalar == dynamics.oracle_sync_exhaustive(system)

    @pytest.mark.parametrize(("p", "n"), [(2, 2), (2, 3), (3, 3), (5, 3)])
    def test_synchronizing_implies_invariant_unless_nilpotent(
        self, p: int, n: int, rng: np.random.Generator
    ) -> None:
        for _ in range(SAMPLES):
            system = _random_network(rng, p, n, 1)
            if netmodel.check_general_sync(system) and not linalg.is_nilpotent(
                system.matrix
            ):
                assert netmodel.sync_set_is_invariant(system)
