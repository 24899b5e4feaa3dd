"""
Evaluate the weak-limit density of x/t on a grid
"""
from typing import Optional

import click
import numpy as np

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
from wignerwalk.limitlaw import WEIGHT_LIMIT, density_curve, limit_density_model
from wignerwalk.serialization import density_to_csv, density_to_json


def density(config: RunConfig, points: int, h1p: Optional[str] = None, h1m: Optional[str] = None) -> str:
    """Rendered (v, nu) table; caustics are skipped"""
    if config.rho is None:
        raise ParameterRangeError("The density requires --rho.")
    if config.j.twice > WEIGHT_LIMIT:
        raise UnsupportedSpinError(f"The limit density has closed forms for j <= 2 only (got j={config.j}).")
    psi = resolve_state(config, config.rho, h1p, h1m)
    model = limit_density_model(config.j, config.rho, psi)
    v, nu = density_curve(model, points)
    if config.displacement_sign == LITERAL_ORIENTATION:
        # the literal walk is the mirror image
        nu = model(-v)
    header = run_header(config, config.rho)
    header.pop("t")
    header["points"] = int(v.size)
    if config.fmt == "json":
        return density_to_json(v, np.asarray(nu), header)
    return density_to_csv(v, np.asarray(nu), header)


@click.command(name="density")
@walk_options
@click.option("--points", "-n", type=int, default=401, help="Grid points across the support")
@output_options()
@exit_on_error
def main(j, j2, rho, euler, state, h1p, h1m, points, output, fmt, quiet, verbose, orientation):
    """Write the limit density nu(v) for j <= 2"""
    configure_logging(quiet, verbose)
    if euler is not None:
        raise ParameterRangeError("The density depends on rho only; use --rho instead of --euler.")
    config = RunConfig.from_env(
        command="density",
        j=parse_spin(j, j2),
        rho=rho,
        state=state,
        output=output,
        fmt=fmt,
        displacement_sign=orientation_sign(orientation),
    )
    emit(density(config, points, h1p, h1m), config.output)


if __name__ == "__main__":
    main()
