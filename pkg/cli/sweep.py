"""
Sweep the coin parameter over a range for several initial states
One CSV row per (rho, state), computed concurrently and written in input order
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import click

from cli.utils import (
    configure_logging,
    emit,
    exit_on_error,
    output_options,
    parse_rho_range,
    parse_spin,
    resolve_state,
    run_header,
)
from wignerwalk.config import RunConfig, orientation_sign
from wignerwalk.evolution import empirical_moment, evolve, position_distribution
from wignerwalk.limitlaw import WEIGHT_LIMIT, density_moment, limit_density_model
from wignerwalk.serialization import sweep_to_csv, sweep_to_json

logger = logging.getLogger(__name__)


def sweep_row(config: RunConfig, rho: float, state: str, h1p: Optional[str], h1m: Optional[str]) -> Tuple:
    """(rho, state, mean, second_moment, p_origin, limit_mean) for one run"""
    run = config.with_overrides(rho=rho, state=state)
    psi = resolve_state(run, rho, h1p, h1m)
    profile = position_distribution(evolve(run.j, rho, psi, run.t, run.displacement_sign))
    limit_mean = None
    if run.j.twice <= WEIGHT_LIMIT and 0.0 < rho < 1.0:
        # the limit density is written for the analytic orientation
        limit_mean = -run.displacement_sign * density_moment(limit_density_model(run.j, rho, psi), 1)
    return (
        rho,
        state,
        empirical_moment(profile, 1),
        empirical_moment(profile, 2),
        profile.probability_at(0),
        limit_mean,
    )


def sweep(
    config: RunConfig, rhos: Sequence[float], states: Sequence[str], h1p: Optional[str] = None, h1m: Optional[str] = None
) -> str:
    """Rendered sweep table; rows ordered by (rho index, state index)"""
    jobs = [(rho, state) for rho in rhos for state in states]
    logger.debug("sweep: %d runs on %d workers", len(jobs), config.workers)
    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        futures = [pool.submit(sweep_row, config, rho, state, h1p, h1m) for rho, state in jobs]
        rows: List[Tuple] = [future.result() for future in futures]
    header = run_header(config, None)
    header.pop("state")
    header["rho"] = ",".join("%.12g" % r for r in rhos)
    if config.fmt == "json":
        return sweep_to_json(rows, header)
    return sweep_to_csv(rows, header)


@click.command(name="sweep")
@click.option("--j", "j", default=None, help="Spin: 1/2, 1, 3/2, 2, ...")
@click.option("--j2", type=int, default=None, help="Spin as the doubled integer 2j")
@click.option("--rho", "rho_range", required=True, help="Range 'start:stop:step' (inclusive stop) or one value")
@click.option("--state", "-s", "states", multiple=True, default=("chi0",), help="Initial state; repeat for several")
@click.option("--h1p", default=None, help="h1+ amplitude for inner_free / outer_free")
@click.option("--h1m", default=None, help="h1- amplitude for inner_free / outer_free")
@click.option("--t", "-t", "steps", type=int, default=100, help="Number of steps")
@click.option("--workers", type=int, default=None, help="Worker threads (default: WIGNERWALK_WORKERS)")
@output_options()
@exit_on_error
def main(j, j2, rho_range, states, h1p, h1m, steps, workers, output, fmt, quiet, verbose, orientation):
    """Moments and return probability across a range of rho"""
    configure_logging(quiet, verbose)
    config = RunConfig.from_env(
        command="sweep",
        j=parse_spin(j, j2),
        t=steps,
        output=output,
        fmt=fmt,
        workers=workers,
        displacement_sign=orientation_sign(orientation),
    )
    emit(sweep(config, parse_rho_range(rho_range), list(states), h1p, h1m), config.output)


if __name__ == "__main__":
    main()
