import math

import numpy as np
import pytest

from wignerwalk.bases import lambda_basis, suitable_basis
from wignerwalk.coin import wigner_coin
from wignerwalk.halfint import HalfInt
from wignerwalk.states import STANDARD, CoinStateVector

SPINS = ("1/2", "1", "3/2", "2")


@pytest.fixture
def rng():
    """Seeded generator so random states are reproducible."""
    return np.random.default_rng(20240607)


@pytest.fixture(params=[0.3, 0.5, 0.8])
def rho(request):
    """Representative interior coin parameters."""
    return request.param


@pytest.fixture(params=SPINS)
def spin(request):
    """Spins with closed-form results."""
    return HalfInt.parse(request.param)


@pytest.fixture
def j_half():
    return HalfInt.parse("1/2")


@pytest.fixture
def j_one():
    return HalfInt(2)


@pytest.fixture
def j_three_halves():
    return HalfInt.parse("3/2")


@pytest.fixture
def j_two():
    return HalfInt(4)


@pytest.fixture
def coin(spin, rho):
    return wigner_coin(spin, rho)


@pytest.fixture
def chi_state():
    """Suitable-basis vector `label` for (j, rho)."""

    def build(j, label, rho):
        basis = suitable_basis(j, rho)
        amps = np.zeros(basis.j.dimension, dtype=np.complex128)
        amps[basis.index(label)] = 1.0
        return CoinStateVector(basis.j, "suitable", amps, rho)

    return build


@pytest.fixture
def lambda_state():
    def build(j, label, rho):
        basis = lambda_basis(j, rho)
        amps = np.zeros(basis.j.dimension, dtype=np.complex128)
        amps[basis.index(label)] = 1.0
        return CoinStateVector(basis.j, "lambda", amps, rho)

    return build


@pytest.fixture
def random_standard_state(rng):
    def build(j):
        spin = HalfInt.coerce(j)
        raw = rng.normal(size=spin.dimension) + 1j * rng.normal(size=spin.dimension)
        return CoinStateVector(spin, STANDARD, raw / np.linalg.norm(raw))

    return build


def beta_of(rho):
    return 2.0 * math.acos(rho)
