"""
Run a verification suite and write the merged report
"""
import click

from cli.utils import configure_logging, emit, exit_on_error, output_options
from wignerwalk.config import RunConfig, Tolerances, orientation_sign
from wignerwalk.halfint import HalfInt
from wignerwalk.serialization import reports_to_csv, reports_to_json
from wignerwalk.verify import SUITES, run_suite


def verify(config: RunConfig, suite: str) -> str:
    """Rendered report for one suite"""
    reports = run_suite(suite, config)
    if config.fmt == "csv":
        return reports_to_csv(reports)
    return reports_to_json(reports, suite)


@click.command(name="verify")
@click.option("--suite", type=click.Choice(list(SUITES) + ["all"]), default="figures", help="Suite to run")
@click.option("--t", "-t", "steps", type=int, default=100, help="Steps for the density comparisons")
@click.option("--rho", type=float, default=None, help="Coin parameter for the gauge suite")
@click.option("--workers", type=int, default=None, help="Worker threads (default: WIGNERWALK_WORKERS)")
@click.option("--density-l1", type=float, default=None, help="Override the density tolerance")
@output_options(formats=("json", "csv"), default="json")
@exit_on_error
def main(suite, steps, rho, workers, density_l1, output, fmt, quiet, verbose, orientation):
    """Check simulations against the asymptotic results"""
    configure_logging(quiet, verbose)
    tolerances = Tolerances() if density_l1 is None else Tolerances(density_l1=density_l1)
    config = RunConfig.from_env(
        command="verify",
        j=HalfInt(1),
        rho=rho,
        t=steps,
        output=output,
        fmt=fmt,
        tolerances=tolerances,
        workers=workers,
        displacement_sign=orientation_sign(orientation),
    )
    emit(verify(config, suite), config.output)


if __name__ == "__main__":
    main()
