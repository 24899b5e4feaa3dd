"""
Run the walk for t steps and write the position distribution
"""
from typing import Optional

import click

from cli.utils import (
    build_coin,
    configure_logging,
    emit,
    exit_on_error,
    output_options,
    parse_euler,
    parse_spin,
    resolve_state,
    run_header,
    walk_options,
)
from wignerwalk.config import RunConfig, orientation_sign
from wignerwalk.evolution import evolve, position_distribution
from wignerwalk.serialization import profile_to_csv, profile_to_json


def simulate(config: RunConfig, h1p: Optional[str] = None, h1m: Optional[str] = None) -> str:
    """Rendered profile for one configuration"""
    coin, rho = build_coin(config)
    psi = resolve_state(config, rho, h1p, h1m)
    profile = position_distribution(evolve(config.j, coin, psi, config.t, config.displacement_sign))
    header = run_header(config, config.rho)
    if config.fmt == "json":
        return profile_to_json(profile, header)
    return profile_to_csv(profile, header)


@click.command(name="simulate")
@walk_options
@click.option("--t", "-t", "steps", type=int, default=100, help="Number of steps")
@output_options()
@exit_on_error
def main(j, j2, rho, euler, state, h1p, h1m, steps, output, fmt, quiet, verbose, orientation):
    """Simulate the spin-j Wigner walk and write p(x, t)"""
    configure_logging(quiet, verbose)
    config = RunConfig.from_env(
        command="simulate",
        j=parse_spin(j, j2),
        rho=rho,
        euler=parse_euler(euler),
        state=state,
        t=steps,
        output=output,
        fmt=fmt,
        displacement_sign=orientation_sign(orientation),
    )
    emit(simulate(config, h1p, h1m), config.output)


if __name__ == "__main__":
    main()
