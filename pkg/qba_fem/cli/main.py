# This code is part of qba-fem.
#
# (C) Copyright qba-fem developers 2026.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
#
# Any modifications or derivative works of this code must retain this
# copyright notice, and modified files need to carry a notice indicating
# that they have been altered from the originals.

"""Command line entry point of the quasi-best approximation benchmarks."""

from __future__ import annotations

import logging
import sys
from argparse import ArgumentParser, Namespace
from collections.abc import Callable, Mapping, Sequence
from math import sqrt
from pathlib import Path
from typing import Any

from numpy import diag, eye
from pandas import DataFrame

from ..analysis import asymptotic_checks, constants_bundle
from ..exceptions import (
    AsymmetricSystemError,
    ConfigError,
    InvariantViolation,
    NotPositiveDefiniteError,
    SolverError,
    ZeroDofError,
)
from ..linalg import inf_sup_constant
from ..mesh import dump_mesh, interior_dof_map, mesh_hierarchy
from ..optsys import assemble_reduced_system
from ..studies import ConstrainedStudy, ConvergenceStudy
from ..utils.serialization import ReportEncoder
from .config import COMMANDS, RunConfig, read_config_file

logger = logging.getLogger(__name__)

EXIT_OK: int = 0
EXIT_INVARIANT: int = 1
EXIT_NUMERICAL: int = 2
EXIT_CONFIG: int = 3

LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"
FLOAT_FORMAT: str = "%.12g"
INF_SUP_TOL: float = 1e-12
CONSTRAINED_LEVELS: tuple[int, ...] = (3, 4, 5)
DEFAULT_BOX: tuple[float, float] = (-0.2, 0.2)


################################################################################
## COMMANDS
################################################################################
def cmd_convergence(config: RunConfig) -> int:
    """Unconstrained convergence table with quasi-best constants per level."""
    study = ConvergenceStudy(
        config.alpha,
        config.variant,
        zero_data=config.zero_data,
        tol=config.tol,
        linear_solver=config.linear_solver,
        assert_rates=config.assert_rates,
    )
    result = study.run(config.levels)
    write_table(result.table, result.rates, config.out)
    if config.dump_mesh or config.dump_system:
        mesh, _ = study.finest
        if config.dump_mesh:
            dump_mesh(mesh, config.dump_mesh)
        if config.dump_system:
            system = assemble_reduced_system(mesh, interior_dof_map(mesh), study.problem)
            system.dump(config.dump_system)
    write_summary(config, result.table, result.rates, result.violations, result.summary)
    return _finish(result.violations)


def cmd_infsup_demo(config: RunConfig) -> int:
    """Inf-sup constants of the four-dimensional example against ``√(α/2)``."""
    rows = []
    for alpha in config.alphas:
        value = inf_sup_constant(*infsup_demo_matrices(alpha))
        bound = sqrt(alpha / 2)
        rows.append(
            {
                "alpha": alpha,
                "inf_sup": value,
                "bound": bound,
                "ratio_sqrt_alpha": value / sqrt(alpha),
                "passed": value <= bound + INF_SUP_TOL,
            }
        )
    table = DataFrame(rows)
    violations = tuple(
        f"infsup_bound: alpha {row.alpha:g} has inf-sup `{row.inf_sup:.6e}` "
        f"> bound `{row.bound:.6e}`"
        for row in table.itertuples()
        if not row.passed
    )
    write_table(table, {}, config.out)
    write_summary(config, table, {}, violations, {})
    return _finish(violations)


def cmd_constants(config: RunConfig) -> int:
    """Stability constants per Tikhonov parameter and their limiting behavior."""
    columns = ("alpha", "M", "L", "gamma", "kappa", "kappa_h", "kappa_alpha_example")
    table = DataFrame(
        [
            {name: constants_bundle(alpha).asdict()[name] for name in columns}
            for alpha in config.alphas
        ]
    )
    checks = DataFrame([check._asdict() for check in asymptotic_checks()])
    violations = tuple(
        f"{row.name}: value `{row.value:.6g}` does not match target `{row.target:.6g}`"
        for row in checks.itertuples()
        if not row.passed
    )
    write_table(table, {}, config.out)
    if config.out is None:
        sys.stdout.write(format_checks(checks))
    else:
        print(checks.to_string(index=False))
    write_summary(config, table, {}, violations, {"asymptotic_checks": checks})
    return _finish(violations)


def cmd_constrained(config: RunConfig) -> int:
    """Box-constrained convergence table against an overkill reference."""
    box = DEFAULT_BOX if config.box is None else config.box
    levels = config.levels if "levels" in config.explicit() else CONSTRAINED_LEVELS
    study = ConstrainedStudy(
        config.alpha,
        box,
        config.method,
        tol=config.tol,
        max_iter=config.max_iter,
        linear_solver=config.linear_solver,
        trials=config.trials,
        seed=config.seed,
        assert_rates=config.assert_rates,
    )
    result = study.run(levels)
    write_table(result.table, result.rates, config.out)
    if config.dump_mesh:
        dump_mesh(mesh_hierarchy(max(levels))[-1], config.dump_mesh)
    write_summary(config, result.table, result.rates, result.violations, result.summary)
    return _finish(result.violations)


HANDLERS: dict[str, Callable[[RunConfig], int]] = {
    "convergence": cmd_convergence,
    "infsup-demo": cmd_infsup_demo,
    "constants": cmd_constants,
    "constrained": cmd_constrained,
}


################################################################################
## ENTRY POINT
################################################################################
def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code.

    Exit codes: ``0`` pass, ``1`` acceptance check failed, ``2`` numerical failure,
    ``3`` invalid configuration.
    """
    argv = normalize_argv(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as error:
        return EXIT_OK if error.code in (0, None) else EXIT_CONFIG
    configure_logging(args.verbose, args.quiet)
    try:
        config = load_config(args)
        return HANDLERS[config.command](config)
    except InvariantViolation as error:
        logger.error("Acceptance check failed: %s", error)
        return EXIT_INVARIANT
    except (
        SolverError,
        ZeroDofError,
        NotPositiveDefiniteError,
        AsymmetricSystemError,
    ) as error:
        logger.error("Numerical failure: %s", error)
        return EXIT_NUMERICAL
    except (ConfigError, TypeError, ValueError) as error:
        logger.error("Invalid configuration: %s", error)
        return EXIT_CONFIG


def build_parser() -> ArgumentParser:
    """Argument parser with one subcommand per benchmark."""
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value configuration file")
    common.add_argument("--seed", help="random seed (default 42)")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--summary", help="JSON run summary path")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    common.add_argument("-q", "--quiet", action="store_true", help="errors only")

    parser = ArgumentParser(prog="qba", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    convergence = subparsers.add_parser(
        "convergence", parents=[common], help=cmd_convergence.__doc__
    )
    _add_alpha_and_levels(convergence)
    convergence.add_argument("--variant", help="control action: full or p0")
    convergence.add_argument("--zero-data", action="store_true", default=None)
    convergence.add_argument("--dump-system", help="MatrixMarket path of the finest system")

    for name in ("infsup-demo", "constants"):
        subparser = subparsers.add_parser(name, parents=[common], help=HANDLERS[name].__doc__)
        subparser.add_argument("--alphas", help="comma-separated Tikhonov parameters")

    constrained = subparsers.add_parser(
        "constrained", parents=[common], help=cmd_constrained.__doc__
    )
    _add_alpha_and_levels(constrained)
    constrained.add_argument("--box", help="control bounds LO:HI (inf allowed)")
    constrained.add_argument("--method", help="ssn (default) or fixed-point")
    constrained.add_argument("--max-iter", help="nonlinear iteration budget")
    constrained.add_argument("--trials", help="monotonicity trials (0 skips)")
    return parser


def normalize_argv(argv: Sequence[str]) -> list[str]:
    """Join ``--box LO:HI`` into ``--box=LO:HI`` so negative bounds parse as values."""
    argv = list(argv)
    normalized = []
    index = 0
    while index < len(argv):
        if argv[index] == "--box" and index + 1 < len(argv):
            normalized.append(f"--box={argv[index + 1]}")
            index += 2
        else:
            normalized.append(argv[index])
            index += 1
    return normalized


def configure_logging(verbose: int = 0, quiet: bool = False) -> None:
    """Configure the root logger once."""
    if quiet:
        level = logging.ERROR
    else:
        level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)


def load_config(args: Namespace) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    config = RunConfig()
    if args.config:
        config.update(read_config_file(args.config))
    flags = {
        name: value
        for name, value in vars(args).items()
        if name in RunConfig.FIELDS and value is not None
    }
    config.update(flags)
    if config.command not in COMMANDS:
        raise ConfigError(f"Unknown command `{config.command}`.")
    logger.info("Running %r", config)
    return config


################################################################################
## OUTPUT
################################################################################
def infsup_demo_matrices(alpha: float) -> tuple[Any, Any, Any]:
    """Operator, trial Gram and test Gram of the four-dimensional inf-sup example."""
    eps = 1 / sqrt(alpha)
    B = [
        [-eps, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, eps],
    ]
    return B, eye(4), eye(4) + diag([1.0, 0.0, 0.0, 1.0]) / alpha


def format_footer(rates: Mapping[str, float]) -> str:
    """Footer comment with fitted rates, e.g. ``# rate_err_combined=1.0012``."""
    return "# " + ",".join(f"{name}={value:.6g}" for name, value in rates.items())


def format_checks(checks: DataFrame) -> str:
    """Comment lines with one check each, e.g. ``# check pure_constraint: value=1, ...``."""
    return "".join(
        f"# check {row.name}: value={row.value:.6g}, target={row.target:.6g}, passed={row.passed}\n"
        for row in checks.itertuples()
    )


def write_table(table: DataFrame, rates: Mapping[str, float], out: Path | None) -> None:
    """Write the CSV (with rate footer) to ``out`` and echo a readable table, or CSV to stdout."""
    text = table.to_csv(index=False, float_format=FLOAT_FORMAT)
    if rates:
        text += format_footer(rates) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf8")
    print(table.to_string(index=False, float_format=lambda value: f"{value:.6g}"))
    if rates:
        print(format_footer(rates))


def write_summary(
    config: RunConfig,
    table: DataFrame,
    rates: Mapping[str, float],
    violations: Sequence[str],
    summary: Mapping[str, Any],
) -> None:
    """Dump the JSON run summary if requested."""
    if config.summary is None:
        return
    extra = {
        key: value.to_dict(orient="records") if isinstance(value, DataFrame) else value
        for key, value in summary.items()
    }
    ReportEncoder.dump(
        {
            "config": config.asdict(),
            "rows": table.to_dict(orient="records"),
            "rates": dict(rates),
            "violations": list(violations),
            "summary": extra,
        },
        str(config.summary),
        indent=2,
    )


################################################################################
## AUXILIARY
################################################################################
def _add_alpha_and_levels(parser: ArgumentParser) -> None:
    parser.add_argument("--alpha", help="Tikhonov parameter (default 1)")
    parser.add_argument("--levels", help="refinement levels, e.g. 3:6")
    parser.add_argument("--tol", help="solver tolerance")
    parser.add_argument("--linear-solver", help="minres, dense or direct")
    parser.add_argument("--assert-rates", action="store_true", default=None)
    parser.add_argument("--dump-mesh", help="plain-text path of the finest mesh")


def _finish(violations: Sequence[str]) -> int:
    if violations:
        raise InvariantViolation("; ".join(violations))
    return EXIT_OK

