"""
Wigner rotation coins.

Matrices are indexed m = +j ... -j along both axes. The reduced coin R(rho)
is the small-d matrix at cos(beta/2) = rho; the full coin carries the
Euler phases e^{-i alpha m} on rows and e^{-i gamma n} on columns.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.special import gammaln

from wignerwalk.errors import ParameterRangeError, SpinValueError
from wignerwalk.halfint import HalfInt, HalfIntLike, require_index, require_spin

logger = logging.getLogger(__name__)

# Above this doubled spin the factorials are evaluated through log-gamma.
EXACT_FACTORIAL_LIMIT = 20


def _factorial_arguments(j: HalfInt, m: HalfInt, n: HalfInt, l: int) -> Tuple[int, int, int, int]:
    return (
        (j.twice - n.twice) // 2 - l,
        (j.twice + m.twice) // 2 - l,
        l - (m.twice - n.twice) // 2,
        l,
    )


def summation_range(j: HalfIntLike, m: HalfIntLike, n: HalfIntLike) -> range:
    """Valid l for gamma_factor: max(0, m-n) <= l <= min(j+m, j-n)."""
    spin = require_spin(j)
    m_ = require_index(spin, m, "m")
    n_ = require_index(spin, n, "n")
    low = max(0, (m_.twice - n_.twice) // 2)
    high = min((spin.twice + m_.twice) // 2, (spin.twice - n_.twice) // 2)
    return range(low, high + 1)


def gamma_factor(j: HalfIntLike, m: HalfIntLike, n: HalfIntLike, l: int) -> float:
    """
    Coefficient of the l-th term of the small-d sum:
    (-1)^l sqrt((j+m)!(j-m)!(j+n)!(j-n)!) / ((j-n-l)!(j+m-l)!(l-m+n)! l!)
    """
    spin = require_spin(j)
    m_ = require_index(spin, m, "m")
    n_ = require_index(spin, n, "n")
    if isinstance(l, bool) or not isinstance(l, int):
        raise TypeError(f"Summation index 'l' must be int, got {type(l).__name__}.")

    denominators = _factorial_arguments(spin, m_, n_, l)
    if min(denominators) < 0:
        raise SpinValueError(
            f"gamma_factor requires max(0, m-n) <= l <= min(j+m, j-n) (got j={spin}, m={m_}, n={n_}, l={l})."
        )
    numerators = (
        (spin.twice + m_.twice) // 2,
        (spin.twice - m_.twice) // 2,
        (spin.twice + n_.twice) // 2,
        (spin.twice - n_.twice) // 2,
    )
    sign = -1.0 if l % 2 else 1.0

    if spin.twice <= EXACT_FACTORIAL_LIMIT:
        num = 1
        for k in numerators:
            num *= math.factorial(k)
        den = 1
        for k in denominators:
            den *= math.factorial(k)
        # sqrt(num) / den without overflowing doubles: both are exact ints
        return sign * math.sqrt(num / (den * den))

    log_value = 0.5 * sum(gammaln(k + 1) for k in numerators) - sum(gammaln(k + 1) for k in denominators)
    return sign * math.exp(log_value)


def _small_d(j: HalfInt, m: HalfInt, n: HalfInt, cos_half: float, sin_half: float) -> float:
    total = 0.0
    for l in summation_range(j, m, n):
        cos_power = j.twice + (m.twice - n.twice) // 2 - 2 * l
        sin_power = 2 * l - (m.twice - n.twice) // 2
        total += gamma_factor(j, m, n, l) * cos_half**cos_power * sin_half**sin_power
    return total


def _require_rho(rho: float) -> float:
    value = float(rho)
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise ParameterRangeError(f"Coin parameter rho requires 0 <= rho <= 1 (got {rho}).")
    return value


def _require_beta(beta: float) -> float:
    value = float(beta)
    if not (0.0 <= value <= math.pi) or math.isnan(value):
        raise ParameterRangeError(f"Euler angle beta requires 0 <= beta <= pi (got {beta}).")
    return value


def small_d_entry(j: HalfIntLike, m: HalfIntLike, n: HalfIntLike, rho: float) -> float:
    """Entry r_mn(rho) of the reduced coin."""
    spin = require_spin(j)
    m_ = require_index(spin, m, "m")
    n_ = require_index(spin, n, "n")
    value = _require_rho(rho)
    return _small_d(spin, m_, n_, value, math.sqrt(max(0.0, 1.0 - value * value)))


def small_d_entry_beta(j: HalfIntLike, m: HalfIntLike, n: HalfIntLike, beta: float) -> float:
    """Entry r_mn(beta) of the small-d matrix."""
    spin = require_spin(j)
    m_ = require_index(spin, m, "m")
    n_ = require_index(spin, n, "n")
    angle = _require_beta(beta)
    return _small_d(spin, m_, n_, math.cos(angle / 2), math.sin(angle / 2))


@dataclass(frozen=True, eq=False)
class CoinOperator:
    """
    Dense coin matrix together with the parameters it was built from.
    Exactly one of `rho` / `euler` is set.
    """

    j: HalfInt
    entries: NDArray[np.complex128] = field(repr=False)
    rho: Optional[float] = None
    euler: Optional[Tuple[float, float, float]] = None

    def __post_init__(self) -> None:
        matrix = np.array(self.entries, dtype=np.complex128)
        dim = self.j.dimension
        if matrix.shape != (dim, dim):
            raise SpinValueError(f"Coin for j={self.j} requires shape ({dim}, {dim}) (got {matrix.shape}).")
        matrix.setflags(write=False)
        object.__setattr__(self, "entries", matrix)

    @property
    def dimension(self) -> int:
        return self.j.dimension

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.entries.imag) <= 1e-15))

    @property
    def beta(self) -> float:
        if self.euler is not None:
            return self.euler[1]
        return 2.0 * math.acos(self.rho)

    def unitarity_defect(self) -> float:
        """max |R^dagger R - I|."""
        gram = self.entries.conj().T @ self.entries
        return float(np.max(np.abs(gram - np.eye(self.dimension))))

    def apply(self, vectors: NDArray[np.complex128]) -> NDArray[np.complex128]:
        """Apply the coin to the last axis of `vectors` (one coin vector per row)."""
        return np.asarray(vectors) @ self.entries.T


def small_d_matrix(j: HalfIntLike, cos_half: float, sin_half: float) -> NDArray[np.float64]:
    spin = require_spin(j)
    idx = HalfInt.indices(spin)
    matrix = np.empty((spin.dimension, spin.dimension), dtype=np.float64)
    for row, m in enumerate(idx):
        for col, n in enumerate(idx):
            matrix[row, col] = _small_d(spin, m, n, cos_half, sin_half)
    return matrix


def wigner_coin(j: HalfIntLike, rho: float) -> CoinOperator:
    """Reduced coin R^(j)(rho); real, rows and columns ordered m = +j ... -j."""
    spin = require_spin(j)
    value = _require_rho(rho)
    matrix = small_d_matrix(spin, value, math.sqrt(max(0.0, 1.0 - value * value)))
    logger.debug("built reduced coin j=%s rho=%.6g", spin, value)
    return CoinOperator(j=spin, entries=matrix.astype(np.complex128), rho=value)


def wigner_coin_euler(j: HalfIntLike, alpha: float, beta: float, gamma: float) -> CoinOperator:
    """Full coin R^(j)(alpha, beta, gamma) = e^{-i alpha m} r_mn(beta) e^{-i gamma n}."""
    spin = require_spin(j)
    angle = _require_beta(beta)
    small_d = small_d_matrix(spin, math.cos(angle / 2), math.sin(angle / 2))
    m_values = np.array([m.value for m in HalfInt.indices(spin)])
    left = np.exp(-1j * float(alpha) * m_values)
    right = np.exp(-1j * float(gamma) * m_values)
    matrix = left[:, None] * small_d * right[None, :]
    return CoinOperator(j=spin, entries=matrix, euler=(float(alpha), angle, float(gamma)))


def coin_from_rho_or_operator(j: HalfIntLike, rho_or_coin) -> CoinOperator:
    """Accept either a ready CoinOperator or a rho value."""
    spin = require_spin(j)
    if isinstance(rho_or_coin, CoinOperator):
        if rho_or_coin.j != spin:
            raise SpinValueError(f"Coin requires j={spin} (got coin for j={rho_or_coin.j}).")
        return rho_or_coin
    return wigner_coin(spin, float(rho_or_coin))
