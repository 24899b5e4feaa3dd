"""
Localisation of integer-spin walks.

For j = 1 and j = 2 the Fourier-space walk operator has an eigenvalue 1 for
every k. The component of the initial state along that flat band never
spreads, and its probability decays as Q^{|x|} away from the origin with

    Q = (1 - sqrt(1 - rho^2)) / (1 + sqrt(1 - rho^2)).

Site labels: the argument x of the functions below stands for the even
lattice site 2x.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from wignerwalk.bases import basis_for, express, require_open_rho
from wignerwalk.coin import wigner_coin
from wignerwalk.errors import BasisMismatchError, ParameterRangeError, UnsupportedSpinError
from wignerwalk.halfint import HalfInt, HalfIntLike, require_spin
from wignerwalk.states import LAMBDA, STANDARD, SUITABLE, CoinStateVector

logger = logging.getLogger(__name__)

QUADRATURE_NODES = 2**16
TAIL_CUTOFF = 1e-15
MAX_TAIL_SITES = 100_000


def decay_base(rho: float) -> float:
    """Q = (2 - rho^2 - 2 sqrt(1 - rho^2)) / rho^2."""
    value = require_open_rho(rho, "decay_base")
    s = math.sqrt(1 - value * value)
    return (1 - s) / (1 + s)


def _require_trapping_spin(j: HalfIntLike) -> HalfInt:
    spin = require_spin(j)
    if spin.twice not in (2, 4):
        raise UnsupportedSpinError(f"Trapping is available for j in {{1, 2}} (got j={spin}).")
    return spin


def fourier_matrix(j: HalfIntLike, rho: float, k: float) -> NDArray[np.complex128]:
    """U(k) = Diag(e^{2imk}) R(rho), m = +j ... -j."""
    spin = require_spin(j)
    m_values = np.array([m.value for m in HalfInt.indices(spin)])
    return np.exp(2j * m_values * k)[:, None] * wigner_coin(spin, rho).entries


def laurent_coefficients(j: HalfIntLike, rho: float) -> Dict[int, NDArray[np.float64]]:
    """W_n with v(k) = sum_n W_n e^{2ink} the unnormalised flat-band vector."""
    spin = _require_trapping_spin(j)
    value = require_open_rho(rho, "laurent_coefficients")
    s = math.sqrt(1 - value * value)
    r2 = math.sqrt(2.0)
    if spin.twice == 2:
        return {
            0: np.array([r2 * s, value, 0.0]),
            -1: np.array([0.0, -value, r2 * s]),
        }
    r6 = math.sqrt(6.0)
    return {
        1: np.array([s * s, value * s, value * value / r6, 0.0, 0.0]),
        0: np.array([0.0, -value * s, math.sqrt(2 / 3) * (1 - 2 * value * value), value * s, 0.0]),
        -1: np.array([0.0, 0.0, value * value / r6, -value * s, s * s]),
    }


def _band_norm(spin: HalfInt, rho: float, k: float) -> float:
    base = 2 - rho * rho * (1 + math.cos(2 * k))
    if spin.twice == 2:
        return math.sqrt(2 * base)
    return math.sqrt(2 / 3) * base


def stationary_eigenvector(j: HalfIntLike, rho: float, k: float) -> NDArray[np.complex128]:
    """Unit v(k) with U(k) v = v."""
    spin = _require_trapping_spin(j)
    coefficients = laurent_coefficients(spin, rho)
    vector = sum(w * np.exp(2j * n * k) for n, w in coefficients.items())
    return vector / _band_norm(spin, float(rho), k)


def lattice_green_integral(order: int, rho: float, x: int) -> float:
    """
    int_0^{2pi} e^{-ixk} / (4 pi (2 - rho^2 (1 + cos k))^order) dk in closed form,
    for order 1 and 2.
    """
    value = require_open_rho(rho, "lattice_green_integral")
    s = math.sqrt(1 - value * value)
    q = (1 - s) / (1 + s)
    n = abs(int(x))
    if order == 1:
        return q**n / (4 * s)
    if order == 2:
        return q**n * (2 - value * value + 2 * n * s) / (16 * s**3)
    raise ParameterRangeError(f"lattice_green_integral requires order 1 or 2 (got {order}).")


def lattice_green_quadrature(order: int, rho: float, x: int, nodes: int = QUADRATURE_NODES) -> float:
    """Trapezoid evaluation of the same integral; exponentially accurate for periodic integrands."""
    if order not in (1, 2):
        raise ParameterRangeError(f"lattice_green_quadrature requires order 1 or 2 (got {order}).")
    value = require_open_rho(rho, "lattice_green_quadrature")
    k = 2 * np.pi * np.arange(nodes) / nodes
    integrand = np.exp(-1j * x * k) / (2 - value * value * (1 + np.cos(k))) ** order
    return float(0.5 * np.mean(integrand).real)


def _kernel(spin: HalfInt, rho: float, x: int) -> float:
    if spin.twice == 2:
        return lattice_green_integral(1, rho, x)
    return 3 * lattice_green_integral(2, rho, x)


@dataclass(frozen=True)
class TrappingModel:
    """Asymptotic trapped profile; `amplitudes` are keyed by basis label."""

    j: HalfInt
    rho: float
    basis: str
    amplitudes: Dict[str, complex] = field(repr=False)
    Q: float

    @property
    def s(self) -> float:
        return math.sqrt(1 - self.rho * self.rho)

    def correction(self, x: int) -> float:
        """f(x) = (sqrt 6 / rho^2)(rho^2 - 2 + 2|x| s), the j = 2 linear factor."""
        if self.j.twice != 4:
            raise UnsupportedSpinError(f"The linear correction exists for j=2 only (got j={self.j}).")
        rho = self.rho
        return math.sqrt(6.0) / rho**2 * (rho * rho - 2 + 2 * abs(x) * self.s)


def trapping_model(
    j: HalfIntLike, rho: float, psi: CoinStateVector, basis: Optional[str] = None
) -> TrappingModel:
    """Convert psi to the basis the closed forms are written in: suitable for j = 1, lambda for j = 2."""
    spin = _require_trapping_spin(j)
    value = require_open_rho(rho, "trapping_model")
    if basis is None:
        basis = SUITABLE if spin.twice == 2 else LAMBDA
    if basis not in (SUITABLE, LAMBDA) or (spin.twice == 4 and basis != LAMBDA):
        raise BasisMismatchError(f"Trapping for j={spin} has no closed form in the {basis} basis.")
    if psi.j != spin:
        raise BasisMismatchError(f"Trapping model for j={spin} cannot use a j={psi.j} state.")
    converted = express(psi, basis, value)
    labels = basis_for(spin, basis, value).labels
    amplitudes = dict(zip(labels, (complex(a) for a in converted.amps)))
    return TrappingModel(spin, value, basis, amplitudes, decay_base(value))


def _sq(a: complex) -> float:
    return abs(a) ** 2


def _probability_j1_suitable(model: TrappingModel, x: int) -> float:
    h0, hp = model.amplitudes["chi0"], model.amplitudes["chi+"]
    rho, s, q = model.rho, model.s, model.Q
    if x == 0:
        return q / rho**2 * (s * s * _sq(h0) + _sq(hp))
    side = h0 + hp if x > 0 else h0 - hp
    return q ** (2 * abs(x)) * 2 * s * s / rho**4 * _sq(side)


def _probability_j1_lambda(model: TrappingModel, x: int) -> float:
    lp, lm = model.amplitudes["lambda+"], model.amplitudes["lambda-"]
    rho, s, q = model.rho, model.s, model.Q
    if x == 0:
        return q / rho**2 * (_sq(lp) + _sq(lm) - rho * rho / 2 * _sq(lp + lm))
    side = lp if x > 0 else lm
    return q ** (2 * abs(x)) * 4 * s * s / rho**4 * _sq(side)


def _probability_j2(model: TrappingModel, x: int) -> float:
    l0 = model.amplitudes["lambda0"]
    lp, lm = model.amplitudes["lambda+"], model.amplitudes["lambda-"]
    rho, s, q = model.rho, model.s, model.Q
    if x == 0:
        cross = 2 * ((lp + lm) * l0.conjugate()).real
        return (
            9 * s * s / (4 * rho**4) * q * q * (_sq(lp) + _sq(lm))
            + 3 / 8 * q * q * _sq(lp + lm)
            + (2 - rho * rho - s) / (4 * rho * rho) * q * _sq(l0)
            - math.sqrt(6.0) * (2 - rho * rho + s / 2) / (8 * rho * rho) * q * q * cross
        )
    side = lp if x > 0 else lm
    return q ** (2 * abs(x)) * 3 * s * s / (2 * rho**4) * (_sq(l0 + model.correction(x) * side) + _sq(side))


def trapping_probability(model: TrappingModel, x: int) -> float:
    """p_inf at site 2x."""
    if model.j.twice == 2:
        if model.basis == SUITABLE:
            return _probability_j1_suitable(model, x)
        return _probability_j1_lambda(model, x)
    return _probability_j2(model, x)


def trapping_total(model: TrappingModel) -> float:
    """Total trapped probability."""
    q, rho, s = model.Q, model.rho, model.s
    origin = trapping_probability(model, 0)
    if model.j.twice == 2:
        geometric = q * q / (1 - q * q)
        if model.basis == SUITABLE:
            h0, hp = model.amplitudes["chi0"], model.amplitudes["chi+"]
            tails = 2 * s * s / rho**4 * (_sq(h0 + hp) + _sq(h0 - hp))
        else:
            tails = 4 * s * s / rho**4 * (_sq(model.amplitudes["lambda+"]) + _sq(model.amplitudes["lambda-"]))
        return origin + geometric * tails
    total = origin
    for x in range(1, MAX_TAIL_SITES):
        term = trapping_probability(model, x) + trapping_probability(model, -x)
        total += term
        if term < TAIL_CUTOFF and x > 1:
            break
    else:
        logger.warning("trapped tail still above %.0e after %d sites", TAIL_CUTOFF, MAX_TAIL_SITES)
    return total


def _standard_vector(j: HalfInt, psi: Union[CoinStateVector, NDArray[np.complex128]]) -> NDArray[np.complex128]:
    if isinstance(psi, CoinStateVector):
        if psi.j != j:
            raise BasisMismatchError(f"Trapping for j={j} cannot use a j={psi.j} state.")
        return np.asarray(express(psi, STANDARD).amps)
    return CoinStateVector.standard(j, psi).amps


def trapping_amplitude(j: HalfIntLike, rho: float, psi: CoinStateVector, x: int) -> NDArray[np.complex128]:
    """psi_inf(2x) = sum_{n,n'} (W_n . q) W_{n'} K(x + n' - n), exact."""
    spin = _require_trapping_spin(j)
    value = require_open_rho(rho, "trapping_amplitude")
    q = _standard_vector(spin, psi)
    coefficients = laurent_coefficients(spin, value)
    out = np.zeros(spin.dimension, dtype=np.complex128)
    for n, w_left in coefficients.items():
        weight = complex(np.dot(w_left, q))
        for n_prime, w_right in coefficients.items():
            out += weight * w_right * _kernel(spin, value, x + n_prime - n)
    return out


def trapping_amplitude_quadrature(
    j: HalfIntLike, rho: float, psi: CoinStateVector, x: int, nodes: int = 4096
) -> NDArray[np.complex128]:
    """int dk/2pi e^{2ikx} v(k) v(k)^dagger q on a trapezoid grid."""
    spin = _require_trapping_spin(j)
    value = require_open_rho(rho, "trapping_amplitude_quadrature")
    q = _standard_vector(spin, psi)
    total = np.zeros(spin.dimension, dtype=np.complex128)
    for k in 2 * np.pi * np.arange(nodes) / nodes:
        v = stationary_eigenvector(spin, value, k)
        total += np.exp(2j * x * k) * v * np.vdot(v, q)
    return total / nodes


def trapping_profile(model: TrappingModel, window: Union[int, Tuple[int, int]]) -> List[Tuple[int, float]]:
    """(lattice site 2x, p_inf) for x in the window; an int w means [-w, w]."""
    if isinstance(window, int):
        if window < 0:
            raise ParameterRangeError(f"trapping window requires w >= 0 (got {window}).")
        low, high = -window, window
    else:
        low, high = window
        if low > high:
            raise ParameterRangeError(f"trapping window requires low <= high (got {window}).")
    return [(2 * x, trapping_probability(model, x)) for x in range(low, high + 1)]
