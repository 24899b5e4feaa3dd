"""
Write the asymptotic trapped profile near the origin for j = 1 and j = 2
Optionally compares it with a time-averaged simulation
"""
from typing import Optional

import click

from cli.utils import (
    configure_logging,
    emit,
    exit_on_error,
    output_options,
    parse_spin,
    resolve_state,
    run_header,
    walk_options,
)
from wignerwalk.config import LITERAL_ORIENTATION, RunConfig, orientation_sign
from wignerwalk.errors import ParameterRangeError, UnsupportedSpinError
from wignerwalk.evolution import time_averaged_distribution
from wignerwalk.serialization import trapping_to_csv, trapping_to_json
from wignerwalk.trapping import trapping_model, trapping_profile


def trapping(
    config: RunConfig,
    window: int,
    compare_t: Optional[int] = None,
    average: int = 50,
    h1p: Optional[str] = None,
    h1m: Optional[str] = None,
) -> str:
    """Rendered (x, p_inf[, p_sim]) table"""
    if config.rho is None:
        raise ParameterRangeError("The trapped profile requires --rho.")
    if config.j.twice not in (2, 4):
        raise UnsupportedSpinError(f"Trapping exists for j = 1 and j = 2 only (got j={config.j}).")
    psi = resolve_state(config, config.rho, h1p, h1m)
    model = trapping_model(config.j, config.rho, psi)
    rows = trapping_profile(model, window)
    if config.displacement_sign == LITERAL_ORIENTATION:
        rows = [(-x, p) for x, p in reversed(rows)]
    simulated = None
    if compare_t is not None:
        averaged = time_averaged_distribution(
            config.j, config.rho, psi, compare_t, average, config.displacement_sign
        )
        simulated = [averaged.probability_at(x) for x, _ in rows]
    header = run_header(config, config.rho)
    header.pop("t")
    header["window"] = window
    if compare_t is not None:
        header["t"] = compare_t
        header["average"] = average
    if config.fmt == "json":
        return trapping_to_json(rows, header, simulated)
    return trapping_to_csv(rows, header, simulated)


@click.command(name="trapping")
@walk_options
@click.option("--window", "-w", type=int, default=10, help="Sites 2x for x in [-window, window]")
@click.option("--compare-t", type=int, default=None, help="Also simulate to this t and add a p_sim column")
@click.option("--average", type=int, default=50, help="Number of even time steps averaged for p_sim")
@output_options()
@exit_on_error
def main(j, j2, rho, euler, state, h1p, h1m, window, compare_t, average, output, fmt, quiet, verbose, orientation):
    """Write the trapped probability p_inf(2x)"""
    configure_logging(quiet, verbose)
    if euler is not None:
        raise ParameterRangeError("The trapped profile depends on rho only; use --rho instead of --euler.")
    config = RunConfig.from_env(
        command="trapping",
        j=parse_spin(j, j2),
        rho=rho,
        state=state,
        output=output,
        fmt=fmt,
        displacement_sign=orientation_sign(orientation),
    )
    emit(trapping(config, window, compare_t, average, h1p, h1m), config.output)


if __name__ == "__main__":
    main()
