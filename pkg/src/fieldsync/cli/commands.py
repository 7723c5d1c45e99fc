"""
The three subcommands. Each loads a system file and returns the text for stdout with
the exit code it implies; exceptions are left for the app to map.
"""

from __future__ import annotations

import enum
import logging
import pathlib
from collections import abc as collections_abc
from typing import NamedTuple

from fieldsync import dynamics, netmodel
from fieldsync.cli import reports, system_files

logger = logging.getLogger(__name__)


class ExitCode(enum.IntEnum):
    SYNCHRONIZES = 0
    DOES_NOT_SYNCHRONIZE = 1
    INPUT_ERROR = 2
    CONSISTENCY_VIOLATION = 3

    @classmethod
    def for_verdict(cls, synchronizes: bool) -> ExitCode:  # noqa: FBT001
        return cls.SYNCHRONIZES if synchronizes else cls.DOES_NOT_SYNCHRONIZE


class BasisSource(enum.Enum):
    PAPER = "paper"
    """The basis block written in the system file."""
    CANONICAL = "canonical"

    @classmethod
    def _missing_(cls, value: object) -> BasisSource | None:
        return cls.PAPER if value == "supplied" else None


class CommandOutput(NamedTuple):
    text: str
    exit_code: ExitCode


def _load(path: pathlib.Path) -> system_files.SystemDocument:
    document = system_files.SystemFileLoader(path).load()
    system = document.system
    logger.info(
        "Loaded %s: p=%d n=%d m=%d",
        path,
        system.field.p,
        system.num_agents,
        system.agent_dim,
    )
    return document


def cmd_analyze(
    path: pathlib.Path, basis_source: BasisSource = BasisSource.CANONICAL
) -> CommandOutput:
    """
    Runs the full analysis and renders the report.

    Raises:
        SystemFileError: The file is invalid, or a supplied basis was requested but
            the file has no basis block.
    """
    document = _load(path)
    basis = None
    if basis_source is BasisSource.PAPER:
        if document.basis is None:
            raise system_files.SystemFileError(
                str(path), None, "--basis paper needs a basis block in the file"
            )
        basis = document.basis

    report = netmodel.analyze(document.system, basis)
    text = reports.render_document(
        reports.analysis_document(report, basis_source.value)
    )
    return CommandOutput(text, ExitCode.for_verdict(report.verdicts.synchronizes))


def cmd_simulate(
    path: pathlib.Path, x0: collections_abc.Sequence[int], steps: int
) -> CommandOutput:
    document = _load(path)
    system = document.system
    trajectory = dynamics.simulate(system, x0, steps)
    text = reports.trajectory_table(trajectory, system.agent_dim)
    return CommandOutput(
        text, ExitCode.for_verdict(trajectory.sync_time is not None)
    )


def cmd_oracle(
    path: pathlib.Path,
    *,
    state_limit: int = dynamics.DEFAULT_STATE_LIMIT,
    algebraic_only: bool = False,
    workers: int = 1,
) -> CommandOutput:
    """
    Evaluates the definitional oracles and compares them with the criteria. A
    disagreement still renders the document, with exit code 3.

    Raises:
        StateLimitExceededError: Exhaustive mode was requested for a state space
            larger than `state_limit`.
    """
    system = _load(path).system
    analysis = netmodel.analyze(system)

    algebraic = reports.OracleVerdicts(
        synchronizes=dynamics.oracle_sync_algebraic(system),
        consensus=dynamics.oracle_consensus_algebraic(system),
    )
    exhaustive = None
    if not algebraic_only:
        logger.info("Enumerating %d states", system.state_space_size)
        exhaustive = reports.OracleVerdicts(
            synchronizes=dynamics.oracle_sync_exhaustive(
                system, state_limit, workers=workers
            ),
            consensus=dynamics.oracle_consensus_exhaustive(
                system, state_limit, workers=workers
            ),
        )

    report = reports.OracleReport(
        p=system.field.p,
        num_agents=system.num_agents,
        agent_dim=system.agent_dim,
        algebraic=algebraic,
        exhaustive=exhaustive,
        criteria=reports.OracleVerdicts(
            synchronizes=analysis.verdicts.synchronizes,
            consensus=analysis.verdicts.consensus,
        ),
    )
    text = reports.render_document(reports.oracle_document(report))
    if not report.agree:
        logger.error("Oracle verdicts disagree with the criteria")
        return CommandOutput(text, ExitCode.CONSISTENCY_VIOLATION)
    return CommandOutput(text, ExitCode.for_verdict(report.criteria.synchronizes))
