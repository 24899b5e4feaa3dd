"""
Write the suitable or lambda coin basis for one (j, rho) as JSON
"""
import click

from cli.utils import configure_logging, emit, exit_on_error, parse_spin
from wignerwalk.bases import lambda_basis, suitable_basis
from wignerwalk.errors import ParameterRangeError
from wignerwalk.serialization import basis_to_json
from wignerwalk.states import LAMBDA, SUITABLE


@click.command(name="basis")
@click.option("--j", "j", default=None, help="Spin: 1/2, 1, 3/2, 2, ...")
@click.option("--j2", type=int, default=None, help="Spin as the doubled integer 2j")
@click.option("--rho", type=float, required=True, help="Coin parameter rho = cos(beta/2)")
@click.option("--kind", type=click.Choice([SUITABLE, LAMBDA]), default=SUITABLE, help="Which basis to write")
@click.option("--method", type=click.Choice(["closed", "recipe"]), default="closed",
              help="Eigensystem source for the suitable basis")
@click.option("--output", "-o", default=None, help="Output file (default: stdout)")
@click.option("--quiet", "-q", is_flag=True, help="Quiet mode: errors only on stderr")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@exit_on_error
def main(j, j2, rho, kind, method, output, quiet, verbose):
    """Basis vectors in the standard basis, one [re, im] pair per component"""
    configure_logging(quiet, verbose)
    spin = parse_spin(j, j2)
    if kind == LAMBDA:
        if method != "closed":
            raise ParameterRangeError("The lambda basis has closed forms only (got --method recipe).")
        basis = lambda_basis(spin, rho)
    else:
        basis = suitable_basis(spin, rho, method)
    emit(basis_to_json(basis), output)


if __name__ == "__main__":
    main()
