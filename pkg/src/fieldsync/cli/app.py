from __future__ import annotations

import argparse
import logging
import pathlib
import sys
from collections import abc as collections_abc

from rich import console as rich_console
from rich import logging as rich_logging
from rich import markup

from fieldsync import dynamics, linalg, netmodel
from fieldsync.cli import commands, system_files

logger = logging.getLogger(__name__)

INPUT_ERRORS = (
    system_files.SystemFileError,
    netmodel.BasisMismatchError,
    dynamics.InitialStateError,
    dynamics.StateLimitExceededError,
)

error_console = rich_console.Console(stderr=True, soft_wrap=True)


def parse_state(text: str) -> list[int]:
    """Parses a comma-separated initial state such as "1,0,2"."""
    try:
        return [int(token) for token in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _run_analyze(args: argparse.Namespace) -> commands.CommandOutput:
    return commands.cmd_analyze(args.file, commands.BasisSource(args.basis))


def _run_simulate(args: argparse.Namespace) -> commands.CommandOutput:
    return commands.cmd_simulate(args.file, args.x0, args.steps)


def _run_oracle(args: argparse.Namespace) -> commands.CommandOutput:
    return commands.cmd_oracle(
        args.file,
        state_limit=args.state_limit,
        algebraic_only=args.algebraic_only,
        workers=args.workers,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fieldsync",
        description="Synchronisation and consensus of linear networks over F_p",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log pipeline steps to stderr"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    analyze = subparsers.add_parser("analyze", help="run every criterion")
    analyze.add_argument("file", type=pathlib.Path)
    analyze.add_argument(
        "--basis",
        choices=[*(source.value for source in commands.BasisSource), "supplied"],
        default=commands.BasisSource.CANONICAL.value,
        help="agreement subspace basis: the file's basis block (paper, or its alias "
        "supplied) or the canonical one",
    )
    analyze.set_defaults(handler=_run_analyze)

    simulate = subparsers.add_parser("simulate", help="print a trajectory as CSV")
    simulate.add_argument("file", type=pathlib.Path)
    simulate.add_argument("--x0", type=parse_state, required=True)
    simulate.add_argument("--steps", type=int, required=True)
    simulate.set_defaults(handler=_run_simulate)

    oracle = subparsers.add_parser("oracle", help="check the definitional oracles")
    oracle.add_argument("file", type=pathlib.Path)
    oracle.add_argument(
        "--state-limit", type=positive_int, default=dynamics.DEFAULT_STATE_LIMIT
    )
    oracle.add_argument("--algebraic-only", action="store_true")
    oracle.add_argument("--workers", type=positive_int, default=1)
    oracle.set_defaults(handler=_run_oracle)

    return parser


def configure_logging(*, verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[
            rich_logging.RichHandler(console=error_console, show_path=False)
        ],
        force=True,
    )


def main(argv: collections_abc.Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(verbose=args.verbose)

    try:
        output: commands.CommandOutput = args.handler(args)
    except linalg.ConsistencyViolationError as e:
        error_console.print(
            f"[bold red]internal consistency violation:[/] {markup.escape(str(e))}"
        )
        return commands.ExitCode.CONSISTENCY_VIOLATION
    except INPUT_ERRORS as e:
        error_console.print(f"[bold red]error:[/] {markup.escape(str(e))}")
        return commands.ExitCode.INPUT_ERROR

    sys.stdout.write(output.text)
    return output.exit_code
