"""
Shared option sets, parsing and output helpers for the command-line scripts.
"""
from __future__ import annotations

import functools
import logging
import math
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

import click

from wignerwalk.catalog import named_state, parse_complex
from wignerwalk.coin import CoinOperator, wigner_coin, wigner_coin_euler
from wignerwalk.config import LOG_LEVEL_ENV, ORIENTATIONS, RunConfig
from wignerwalk.errors import ParameterRangeError, SpinValueError, UnsupportedSpinError, WalkError
from wignerwalk.halfint import HalfInt
from wignerwalk.states import CoinStateVector

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_UNSUPPORTED = 3


def configure_logging(quiet: bool, verbose: bool) -> None:
    """WARNING by default, DEBUG with -v, ERROR with -q; WIGNERWALK_LOG_LEVEL wins."""
    level = logging.WARNING
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.ERROR
    override = os.environ.get(LOG_LEVEL_ENV)
    named = logging.getLevelName(override.upper()) if override else None
    if isinstance(named, int):
        level = named
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)
    if override and not isinstance(named, int):
        logger.warning("ignoring %s=%r (not a logging level)", LOG_LEVEL_ENV, override)


def parse_spin(j: Optional[str], j2: Optional[int]) -> HalfInt:
    """--j '3/2' or --j2 3."""
    if j is not None and j2 is not None:
        raise SpinValueError("Spin requires exactly one of --j and --j2 (got both).")
    if j2 is not None:
        return HalfInt(j2)
    return HalfInt.parse(j if j is not None else "1")


def parse_euler(text: Optional[str]) -> Optional[Tuple[float, float, float]]:
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 3:
        raise ParameterRangeError(f"--euler requires 'alpha,beta,gamma' (got {text!r}).")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise ParameterRangeError(f"--euler requires three numbers (got {text!r}).") from None


def parse_rho_range(text: str) -> List[float]:
    """'start:stop:step' with an inclusive stop."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ParameterRangeError(f"--rho requires 'start:stop:step' (got {text!r}).") from None
    if step <= 0 or stop < start:
        raise ParameterRangeError(f"--rho range requires step > 0 and stop >= start (got {text!r}).")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def build_coin(config: RunConfig) -> Tuple[CoinOperator, float]:
    """Coin plus the rho that names states: cos(beta/2) when Euler angles are given."""
    if config.euler is not None:
        alpha, beta, gamma = config.euler
        coin = wigner_coin_euler(config.j, alpha, beta, gamma)
        return coin, math.cos(coin.beta / 2)
    if config.rho is None:
        raise ParameterRangeError("The coin requires --rho or --euler.")
    return wigner_coin(config.j, config.rho), config.rho


def resolve_state(config: RunConfig, rho: float, h1p: Optional[str], h1m: Optional[str]) -> CoinStateVector:
    extra: Dict[str, complex] = {}
    if h1p is not None:
        extra["h1p"] = parse_complex(h1p)
    if h1m is not None:
        extra["h1m"] = parse_complex(h1m)
    return named_state(config.j, config.state, rho, **extra)


def orientation_name(sign: int) -> str:
    return next(name for name, value in ORIENTATIONS.items() if value == sign)


def run_header(config: RunConfig, rho: Optional[float]) -> Dict[str, Any]:
    header: Dict[str, Any] = {"j": str(config.j)}
    if config.euler is not None:
        header["euler"] = ",".join("%.17g" % a for a in config.euler)
    elif rho is not None:
        header["rho"] = rho
    header["t"] = config.t
    header["state"] = config.state
    header["orientation"] = orientation_name(config.displacement_sign)
    return header


def emit(text: str, output: Optional[str]) -> None:
    """Write to --output, or stdout when unset."""
    if output is None or output == "-":
        click.echo(text, nl=False)
        return
    with click.open_file(output, "w") as handle:
        handle.write(text)
    logger.debug("wrote %d bytes to %s", len(text), output)


def exit_on_error(func: Callable) -> Callable:
    """Map library errors to exit codes: 3 for unsupported spins, 2 for the rest."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except UnsupportedSpinError as exc:
            click.echo(f"Error: {exc}", err=True)
            sys.exit(EXIT_UNSUPPORTED)
        except (WalkError, TypeError) as exc:
            click.echo(f"Error: {exc}", err=True)
            sys.exit(EXIT_USAGE)

    return wrapper


def output_options(formats: Tuple[str, ...] = ("csv", "json"), default: str = "csv") -> Callable:
    """--output/-o, --format/-f, --quiet/-q, --verbose/-v, --orientation."""

    def decorate(func: Callable) -> Callable:
        for option in reversed(
            [
                click.option("--output", "-o", default=None, help="Output file (default: stdout)"),
                click.option("--format", "-f", "fmt", type=click.Choice(list(formats)), default=default,
                             help="Output format"),
                click.option("--quiet", "-q", is_flag=True, help="Quiet mode: errors only on stderr"),
                click.option("--verbose", "-v", is_flag=True, help="Debug logging"),
                click.option("--orientation", type=click.Choice(sorted(ORIENTATIONS)), default="analytic",
                             help="Sign convention of the shift: analytic (m moves by -2m) or literal (+2m)"),
            ]
        ):
            func = option(func)
        return func

    return decorate


def walk_options(func: Callable) -> Callable:
    """--j/--j2, --rho, --euler, --state, --h1p, --h1m."""
    for option in reversed(
        [
            click.option("--j", "j", default=None, help="Spin: 1/2, 1, 3/2, 2, ..."),
            click.option("--j2", type=int, default=None, help="Spin as the doubled integer 2j"),
            click.option("--rho", type=float, default=None, help="Coin parameter rho = cos(beta/2)"),
            click.option("--euler", default=None, help="Full coin angles 'alpha,beta,gamma' instead of --rho"),
            click.option("--state", "-s", default="chi0",
                         help="Initial coin state: chi0, chi+, chi1-, lambda+, j2_single_peak, std:1,0,0, ..."),
            click.option("--h1p", default=None, help="h1+ amplitude for inner_free / outer_free"),
            click.option("--h1m", default=None, help="h1- amplitude for inner_free / outer_free"),
        ]
    ):
        func = option(func)
    return func
