"""
Plain-text network description files.

    # comments run to the end of the line
    p=5
    n=3
    m=2
    4 3 4 1 0 4        <- n*m rows of n*m integers
    ...
    basis=             <- optional: m rows, one column per basis vector
    1 1
    ...

Entries are reduced mod p on load; negative entries are rejected.
"""

from __future__ import annotations

import dataclasses
import pathlib
from collections import abc as collections_abc

from fieldsync import fp_core, linalg, netmodel

HEADER_KEYS = ("p", "n", "m")
BASIS_MARKER = "basis"


@dataclasses.dataclass(frozen=True)
class SystemDocument:
    system: netmodel.NetworkSystem
    basis: linalg.Matrix | None
    """Basis of the agreement subspace given in the file, as columns, if any."""


class SystemFileLoader:
    """Loads a network description from a file on disk."""

    def __init__(
        self, system_file_path: pathlib.Path, encoding: str | None = None
    ) -> None:
        self.system_file_path = system_file_path
        self.encoding = encoding

    def load(self) -> SystemDocument:
        """
        Raises:
            SystemFileError: The file cannot be read or does not parse.
        """
        source = str(self.system_file_path)
        try:
            with self.system_file_path.open(encoding=self.encoding) as system_file:
                text = system_file.read()
        except (OSError, UnicodeDecodeError) as e:
            raise SystemFileError(source, None, f"cannot read file: {e}") from e
        return parse_system(text, source=source)


@dataclasses.dataclass
class _NumberedRow:
    line_number: int
    values: list[int]


def parse_system(text: str, source: str = "<string>") -> SystemDocument:
    """
    Parses and validates a network description.

    Raises:
        SystemFileError: The text is malformed or inconsistent; the message names the
            offending line where there is one.
    """
    header: dict[str, int] = {}
    matrix_rows: list[_NumberedRow] = []
    basis_rows: list[_NumberedRow] | None = None

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue

        if "=" in line:
            key, _, value = (part.strip() for part in line.partition("="))
            if key == BASIS_MARKER:
                if basis_rows is not None:
                    raise SystemFileError(source, line_number, "duplicate basis block")
                if value:
                    raise SystemFileError(
                        source, line_number, "basis rows must start on the next line"
                    )
                basis_rows = []
                continue
            if key not in HEADER_KEYS:
                raise SystemFileError(source, line_number, f"unknown key {key!r}")
            if key in header:
                raise SystemFileError(source, line_number, f"duplicate key {key!r}")
            if matrix_rows or basis_rows is not None:
                raise SystemFileError(
                    source, line_number, f"key {key!r} must precede the matrix rows"
                )
            header[key] = _parse_integer(value, source, line_number, key)
            continue

        row = _NumberedRow(line_number, _parse_row(line, source, line_number))
        if basis_rows is None:
            matrix_rows.append(row)
        else:
            basis_rows.append(row)

    for key in HEADER_KEYS:
        if key not in header:
            raise SystemFileError(source, None, f"missing key {key!r}")

    try:
        field = fp_core.PrimeField(header["p"])
    except fp_core.NotPrimeError as e:
        raise SystemFileError(source, None, f"{e} (p={header['p']})") from e

    num_agents, agent_dim = header["n"], header["m"]
    if num_agents < 1 or agent_dim < 1:
        raise SystemFileError(source, None, "n and m must both be at least 1")

    size = num_agents * agent_dim
    _check_shape(matrix_rows, size, size, source, "matrix")
    matrix = linalg.Matrix(field, _reduced(field, matrix_rows), shape=(size, size))
    system = netmodel.NetworkSystem(field, num_agents, agent_dim, matrix)

    basis = None
    if basis_rows is not None:
        width = len(basis_rows[0].values) if basis_rows else 0
        _check_shape(basis_rows, agent_dim, width, source, "basis")
        basis = linalg.Matrix(
            field, _reduced(field, basis_rows), shape=(agent_dim, width)
        )

    return SystemDocument(system=system, basis=basis)


def _reduced(
    field: fp_core.PrimeField, rows: collections_abc.Sequence[_NumberedRow]
) -> list[list[int]]:
    # Reduce before numpy sees the values; file entries may exceed int64
    return [[field.reduce(value) for value in row.values] for row in rows]


def _parse_integer(token: str, source: str, line_number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise SystemFileError(
            source, line_number, f"malformed {what}: {token!r} is not an integer"
        ) from None


def _parse_row(line: str, source: str, line_number: int) -> list[int]:
    values = [
        _parse_integer(token, source, line_number, "entry") for token in line.split()
    ]
    if any(value < 0 for value in values):
        raise SystemFileError(source, line_number, "negative entries are not allowed")
    return values


def _check_shape(
    rows: collections_abc.Sequence[_NumberedRow],
    expected_rows: int,
    expected_cols: int,
    source: str,
    what: str,
) -> None:
    if len(rows) != expected_rows:
        raise SystemFileError(
            source,
            rows[-1].line_number if rows else None,
            f"{what} has {len(rows)} rows, expected {expected_rows}",
        )
    for row in rows:
        if len(row.values) != expected_cols:
            raise SystemFileError(
                source,
                row.line_number,
                f"{what} row has {len(row.values)} entries, expected {expected_cols}",
            )


class SystemFileError(Exception):
    def __init__(self, source: str, line_number: int | None, message: str) -> None:
        location = source if line_number is None else f"{source}:{line_number}"
        super().__init__(f"{location}: {message}")
        self.source = source
        self.line_number = line_number
        self.message = message
