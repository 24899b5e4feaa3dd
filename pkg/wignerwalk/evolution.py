"""
Exact finite-time evolution of the walk.

One step applies the coin on every site and then moves component m by
displacement_sign * 2m. The default sign (-1) is the orientation in which the
closed-form limit densities and trapping profiles hold; +1 gives the mirror walk.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from wignerwalk.bases import express
from wignerwalk.coin import CoinOperator, coin_from_rho_or_operator
from wignerwalk.config import ANALYTIC_ORIENTATION, LITERAL_ORIENTATION
from wignerwalk.errors import BasisMismatchError, NormalizationError, ParameterRangeError, SpinValueError
from wignerwalk.halfint import HalfInt, HalfIntLike, require_spin
from wignerwalk.states import STANDARD, CoinStateVector

logger = logging.getLogger(__name__)

WALK_NORM_TOLERANCE = 1e-10

StateLike = Union[CoinStateVector, Sequence[complex], NDArray[np.complex128]]


def _require_sign(sign: int) -> int:
    if sign not in (ANALYTIC_ORIENTATION, LITERAL_ORIENTATION):
        raise ParameterRangeError(f"displacement_sign requires +1 or -1 (got {sign}).")
    return sign


@dataclass(frozen=True, eq=False)
class WalkState:
    """
    Amplitudes Psi_m(x, t) for x in [-2jt, 2jt]; row r holds x = r - 2jt,
    column i holds m = j - i.
    """

    j: HalfInt
    t: int
    amplitudes: NDArray[np.complex128] = field(repr=False)
    displacement_sign: int = ANALYTIC_ORIENTATION
    rho: Optional[float] = None

    def __post_init__(self) -> None:
        expected = (2 * self.j.twice * self.t + 1, self.j.dimension)
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != expected:
            raise SpinValueError(f"WalkState at t={self.t} requires shape {expected} (got {amps.shape}).")
        _require_sign(self.displacement_sign)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def offset(self) -> int:
        return self.j.twice * self.t

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(-self.offset, self.offset + 1, dtype=np.int64)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True, eq=False)
class ProbabilityProfile:
    """p(x, t) on x = positions; p vanishes off the occupied sublattice."""

    j: HalfInt
    t: int
    rho: Optional[float]
    positions: NDArray[np.int64] = field(repr=False)
    probabilities: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        positions = np.array(self.positions, dtype=np.int64)
        probabilities = np.array(self.probabilities, dtype=np.float64)
        if positions.shape != probabilities.shape:
            raise ValueError("ProbabilityProfile requires matching positions and probabilities.")
        positions.setflags(write=False)
        probabilities.setflags(write=False)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "probabilities", probabilities)

    @property
    def total(self) -> float:
        return float(np.sum(self.probabilities))

    def occupied_mask(self) -> NDArray[np.bool_]:
        """Sites allowed by the bipartite rule at time t."""
        if self.j.is_integer:
            return self.positions % 2 == 0
        return (self.positions - self.t) % 2 == 0

    def probability_at(self, x: int) -> float:
        idx = x - int(self.positions[0])
        if idx < 0 or idx >= self.positions.size:
            return 0.0
        return float(self.probabilities[idx])

    def entries(self) -> dict:
        return {int(x): float(p) for x, p in zip(self.positions, self.probabilities)}


def _standard_amplitudes(j: HalfInt, psi: StateLike) -> NDArray[np.complex128]:
    if isinstance(psi, CoinStateVector):
        if psi.j != j:
            raise SpinValueError(f"Coin state requires j={j} (got j={psi.j}).")
        return np.asarray(express(psi, STANDARD).amps)
    vector = np.asarray(psi, dtype=np.complex128).reshape(-1)
    return CoinStateVector(j, STANDARD, vector).amps


def initial_state(j: HalfIntLike, psi: StateLike, displacement_sign: int = ANALYTIC_ORIENTATION) -> WalkState:
    """All amplitude at the origin, t = 0. `psi` must be in the standard basis."""
    spin = require_spin(j)
    if isinstance(psi, CoinStateVector):
        if psi.basis_tag != STANDARD:
            raise BasisMismatchError(f"initial_state requires a standard-basis coin state (got {psi.basis_tag}).")
        if psi.j != spin:
            raise SpinValueError(f"Coin state requires j={spin} (got j={psi.j}).")
        amps = psi.amps
    else:
        vector = np.asarray(psi, dtype=np.complex128).reshape(-1)
        norm = float(np.vdot(vector, vector).real)
        if abs(norm - 1.0) > WALK_NORM_TOLERANCE:
            raise NormalizationError(f"Initial coin state requires unit norm (got |psi|^2 = {norm:.15g}).")
        amps = CoinStateVector(spin, STANDARD, vector / np.sqrt(norm)).amps
    return WalkState(spin, 0, np.asarray(amps).reshape(1, -1), displacement_sign)


def _shifts(j: HalfInt, sign: int) -> Tuple[int, ...]:
    # column i holds m = j - i; it moves by sign * 2m lattice sites
    return tuple(sign * (j.twice - 2 * i) for i in range(j.dimension))


def step(state: WalkState, coin: CoinOperator) -> WalkState:
    """One application of coin then shift; the input state is left untouched."""
    if coin.j != state.j:
        raise SpinValueError(f"step requires coin.j == state.j (got {coin.j} and {state.j}).")
    j = state.j
    mixed = coin.apply(state.amplitudes)
    rows = state.amplitudes.shape[0]
    out = np.zeros((rows + 2 * j.twice, j.dimension), dtype=np.complex128)
    for col, shift in enumerate(_shifts(j, state.displacement_sign)):
        start = j.twice + shift
        out[start : start + rows, col] = mixed[:, col]
    return WalkState(j, state.t + 1, out, state.displacement_sign, coin.rho)


def _propagate(
    coin: CoinOperator, q: NDArray[np.complex128], t_max: int, sign: int
) -> Iterator[Tuple[int, NDArray[np.complex128]]]:
    """
    Double-buffered evolution on the final lattice [-2j t_max, 2j t_max].
    Yields (t, buffer); the buffer is reused, so consumers copy what they keep.
    """
    j = coin.j
    center = j.twice * t_max
    size = 2 * center + 1
    current = np.zeros((size, j.dimension), dtype=np.complex128)
    spare = np.zeros_like(current)
    current[center] = q
    yield 0, current
    shifts = _shifts(j, sign)
    matrix_t = coin.entries.T
    for t in range(1, t_max + 1):
        lo = center - j.twice * (t - 1)
        hi = center + j.twice * (t - 1) + 1
        mixed = current[lo:hi] @ matrix_t
        spare[lo - j.twice : hi + j.twice] = 0.0
        for col, shift in enumerate(shifts):
            spare[lo + shift : hi + shift, col] = mixed[:, col]
        current, spare = spare, current
        yield t, current


def _window(buffer: NDArray[np.complex128], j: HalfInt, t: int, t_max: int) -> NDArray[np.complex128]:
    center = j.twice * t_max
    return buffer[center - j.twice * t : center + j.twice * t + 1]


def evolve(
    j: HalfIntLike,
    rho_or_coin: Union[float, CoinOperator],
    psi: StateLike,
    t: int,
    displacement_sign: int = ANALYTIC_ORIENTATION,
) -> WalkState:
    """t steps from the origin; psi may be tagged with any basis."""
    spin = require_spin(j)
    if t < 0:
        raise ParameterRangeError(f"evolve requires t >= 0 (got {t}).")
    _require_sign(displacement_sign)
    coin = coin_from_rho_or_operator(spin, rho_or_coin)
    q = _standard_amplitudes(spin, psi)
    logger.debug("evolve j=%s t=%d sites=%d", spin, t, 2 * spin.twice * t + 1)
    buffer = None
    for _, buffer in _propagate(coin, q, t, displacement_sign):
        pass
    return WalkState(spin, t, _window(buffer, spin, t, t).copy(), displacement_sign, coin.rho)


def position_distribution(state: WalkState) -> ProbabilityProfile:
    """p(x, t) = sum_m |Psi_m(x, t)|^2."""
    probabilities = np.sum(np.abs(state.amplitudes) ** 2, axis=1)
    return ProbabilityProfile(state.j, state.t, state.rho, state.positions, probabilities)


def empirical_moment(profile: ProbabilityProfile, n: int) -> float:
    """sum_x (x/t)^n p(x, t)."""
    if profile.t < 1:
        raise ParameterRangeError(f"empirical_moment requires t >= 1 (got {profile.t}).")
    if n < 0:
        raise ParameterRangeError(f"Moment order requires n >= 0 (got {n}).")
    scaled = profile.positions.astype(np.float64) / profile.t
    return float(np.sum(scaled**n * profile.probabilities))


def iterate_distributions(
    j: HalfIntLike,
    rho_or_coin: Union[float, CoinOperator],
    psi: StateLike,
    t_max: int,
    every: int = 1,
    times: Optional[Iterable[int]] = None,
    displacement_sign: int = ANALYTIC_ORIENTATION,
) -> Iterator[ProbabilityProfile]:
    """
    Profiles along a single run, at t = every, 2*every, ... <= t_max or at the
    explicit `times`. Positions always span the final lattice.
    """
    spin = require_spin(j)
    if t_max < 0 or every < 1:
        raise ParameterRangeError(f"iterate_distributions requires t_max >= 0 and every >= 1 (got {t_max}, {every}).")
    _require_sign(displacement_sign)
    coin = coin_from_rho_or_operator(spin, rho_or_coin)
    q = _standard_amplitudes(spin, psi)
    wanted = set(times) if times is not None else None
    positions = np.arange(-spin.twice * t_max, spin.twice * t_max + 1, dtype=np.int64)
    for t, buffer in _propagate(coin, q, t_max, displacement_sign):
        if wanted is not None:
            keep = t in wanted
        else:
            keep = t >= 1 and t % every == 0
        if keep:
            probabilities = np.sum(np.abs(buffer) ** 2, axis=1)
            yield ProbabilityProfile(spin, t, coin.rho, positions, probabilities)


def time_averaged_distribution(
    j: HalfIntLike,
    rho_or_coin: Union[float, CoinOperator],
    psi: StateLike,
    t_end: int,
    window: int,
    displacement_sign: int = ANALYTIC_ORIENTATION,
) -> ProbabilityProfile:
    """Mean of p(x, t) over t = t_end, t_end - 2, ..., `window` terms."""
    if window < 1 or t_end - 2 * (window - 1) < 0:
        raise ParameterRangeError(
            f"time_averaged_distribution requires 1 <= window <= t_end/2 + 1 (got t_end={t_end}, window={window})."
        )
    times = {t_end - 2 * k for k in range(window)}
    total = None
    profile = None
    for profile in iterate_distributions(j, rho_or_coin, psi, t_end, times=times, displacement_sign=displacement_sign):
        total = profile.probabilities.copy() if total is None else total + profile.probabilities
    return ProbabilityProfile(profile.j, t_end, profile.rho, profile.positions, total / window)
