"""
Command-line entry points. Each command also runs on its own:
python -m cli.simulate --j 1 --rho 0.5 --state chi0 -t 100
"""
import click

from cli import basis, density, simulate, sweep, trapping, verify

wignerwalk = click.Group(name="wignerwalk", help="Spin-j Wigner-coin quantum walk lab")
wignerwalk.add_command(simulate.main, "simulate")
wignerwalk.add_command(density.main, "density")
wignerwalk.add_command(trapping.main, "trapping")
wignerwalk.add_command(verify.main, "verify")
wignerwalk.add_command(sweep.main, "sweep")
wignerwalk.add_command(basis.main, "basis")
