"""JSON documents written to stdout by the analyze and oracle commands."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from typing import Any

from fieldsync import dynamics, fp_core, linalg, netmodel


@dataclasses.dataclass(frozen=True)
class OracleVerdicts:
    synchronizes: bool
    consensus: bool


@dataclasses.dataclass(frozen=True)
class OracleReport:
    p: int
    num_agents: int
    agent_dim: int
    algebraic: OracleVerdicts
    exhaustive: OracleVerdicts | None
    criteria: OracleVerdicts

    @property
    def agree(self) -> bool:
        verdicts = [self.algebraic, self.criteria]
        if self.exhaustive is not None:
            verdicts.append(self.exhaustive)
        return all(v == verdicts[0] for v in verdicts)


def _coefficients(polynomial: fp_core.Polynomial) -> list[int]:
    return list(polynomial.coeffs)


def _columns(matrix: linalg.Matrix) -> list[list[int]]:
    return [list(column.flat()) for column in matrix.columns()]


def analysis_document(
    report: netmodel.AnalysisReport, basis_source: str
) -> dict[str, Any]:
    structure = report.structure
    verdicts = report.verdicts
    checks = report.cross_checks
    terminal = report.terminal
    return {
        "p": report.p,
        "n": report.num_agents,
        "m": report.agent_dim,
        "sync_set_invariant": structure.sync_set_invariant,
        "block_row_sums": [m.to_lists() for m in structure.block_row_sums],
        "agreement_subspace": {
            "basis_source": basis_source,
            "basis_columns": _columns(structure.agreement_basis),
            "dim": structure.agreement_dim,
        },
        # Q only means something next to the basis that produced it
        "restriction_matrix": {
            "matrix": structure.restriction_matrix.to_lists(),
            "basis_columns": _columns(structure.agreement_basis),
        },
        "polynomials": {
            "char_poly_network": _coefficients(structure.char_poly_network),
            "char_poly_restriction": _coefficients(structure.char_poly_restriction),
            "min_poly_restriction": _coefficients(structure.min_poly_restriction),
        },
        "verdicts": {
            "synchronizes": verdicts.synchronizes,
            "consensus": verdicts.consensus,
            "theorem_used": verdicts.criterion.value,
            "nilpotent_consensus": verdicts.nilpotent_consensus,
        },
        "cross_checks": {
            "reduction_nilpotent": checks.reduction_nilpotent,
            "oracle_agrees": checks.oracle_agrees,
            "lemma1_dim_ok": checks.dimension_formula_ok,
            "invariant_case_agrees": checks.invariant_case_agrees,
        },
        "terminal": None
        if terminal is None
        else {"generator": terminal.generator, "period": terminal.period},
    }


def _verdicts(verdicts: OracleVerdicts | None) -> dict[str, bool] | None:
    if verdicts is None:
        return None
    return {"synchronizes": verdicts.synchronizes, "consensus": verdicts.consensus}


def oracle_document(report: OracleReport) -> dict[str, Any]:
    return {
        "p": report.p,
        "n": report.num_agents,
        "m": report.agent_dim,
        "algebraic": _verdicts(report.algebraic),
        "exhaustive": _verdicts(report.exhaustive),
        "criteria": _verdicts(report.criteria),
        "agree": report.agree,
    }


def render_document(document: dict[str, Any]) -> str:
    return json.dumps(document, indent=2) + "\n"


def _or_none(value: int | None) -> str:
    return "none" if value is None else str(value)


def trajectory_table(trajectory: dynamics.Trajectory, agent_dim: int) -> str:
    """
    Comma-separated table with a header row, one row per time step, then comment rows
    describing the eventual cycle.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    width = len(trajectory.states[0])
    header = [
        f"x{i // agent_dim + 1}_{i % agent_dim + 1}" for i in range(width)
    ]
    writer.writerow(["t", *header])
    writer.writerows([t, *state] for t, state in enumerate(trajectory.states))

    buffer.write(f"# sync_time={_or_none(trajectory.sync_time)}\n")
    buffer.write(
        f"# cycle_start={trajectory.cycle_start} "
        f"period={_or_none(trajectory.period)}\n"
    )
    return buffer.getvalue()
