import numpy as np
import pytest

from fieldsync import fp_core, linalg, netmodel
from tests.systems import (
    FIXED_POINT_BASIS,
    FIXED_POINT_ROWS,
    FOUR_CYCLE_BASIS,
    FOUR_CYCLE_ROWS,
    THREE_AGENT_CYCLE_ROWS,
)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def f2() -> fp_core.PrimeField:
    return fp_core.PrimeField(2)


@pytest.fixture
def f3() -> fp_core.PrimeField:
    return fp_core.PrimeField(3)


@pytest.fixture
def f5() -> fp_core.PrimeField:
    return fp_core.PrimeField(5)


@pytest.fixture
def three_agent_cycle() -> netmodel.NetworkSystem:
    """Invariant synchronisation set, synchronises onto a 3-cycle, no consensus."""
    return netmodel.NetworkSystem.from_rows(5, 3, 2, THREE_AGENT_CYCLE_ROWS)


@pytest.fixture
def four_cycle() -> netmodel.NetworkSystem:
    """Non-invariant synchronisation set, synchronises onto a 4-cycle."""
    return netmodel.NetworkSystem.from_rows(3, 3, 3, FOUR_CYCLE_ROWS)


@pytest.fixture
def four_cycle_basis(f3: fp_core.PrimeField) -> linalg.Matrix:
    return linalg.Matrix(f3, FOUR_CYCLE_BASIS)


@pytest.fixture
def fixed_point() -> netmodel.NetworkSystem:
    """Reaches consensus."""
    return netmodel.NetworkSystem.from_rows(5, 3, 3, FIXED_POINT_ROWS)


@pytest.fixture
def fixed_point_basis(f5: fp_core.PrimeField) -> linalg.Matrix:
    return linalg.Matrix(f5, FIXED_POINT_BASIS)


@pytest.fixture
def swap_network() -> netmodel.NetworkSystem:
    """Two scalar agents swapping states forever."""
    return netmodel.NetworkSystem.from_rows(2, 2, 1, [[0, 1], [1, 0]])


@pytest.fixture
def identity_network() -> netmodel.NetworkSystem:
    return netmodel.NetworkSystem.from_rows(3, 3, 1, np.eye(3, dtype=int).tolist())
