"""
Weak limit of x/t for the spin-j Wigner walk.

The limit density is a sum over the moving coin components m > 0,

    nu(v) = sum_m (1/2m) mu(v/2m; rho) M^{(j,m)}(v/2m),

with mu the Konno density and M a polynomial of degree 2j whose coefficients
are quadratic in the suitable-basis amplitudes. The peak of component m at
v = +-2m rho disappears exactly when M^{(j,m)}(+-rho) = 0.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.typing import ArrayLike, NDArray
from scipy.special import roots_legendre

from wignerwalk.bases import express, require_open_rho, suitable_amplitudes
from wignerwalk.coin import wigner_coin
from wignerwalk.config import ANALYTIC_ORIENTATION
from wignerwalk.errors import (
    BasisMismatchError,
    ParameterRangeError,
    StateSpecError,
    UnsupportedSpinError,
)
from wignerwalk.halfint import HalfInt, HalfIntLike, require_index, require_spin
from wignerwalk.states import STANDARD, SUITABLE, CoinStateVector
from wignerwalk.trapping import trapping_model, trapping_total

logger = logging.getLogger(__name__)

QUADRATURE_START_NODES = 256
QUADRATURE_MAX_NODES = 2**14
QUADRATURE_TOLERANCE = 1e-9
EDGE_REMAINDER_TOLERANCE = 1e-9
CAUSTIC_EPSILON = 1e-6
# j <= 2 has closed-form weights
WEIGHT_LIMIT = 4

SPECIAL_STATES = ("inner_free", "outer_free", "j2_single_peak", "j2_no_slower")

SAMPLED_NODES = 2**15
# band of v around a caustic that only the stationary points of a band reach
CAUSTIC_BAND = 1e-7
CAUSTIC_WEIGHT_TOLERANCE = 1e-4


def konno_density(v: ArrayLike, a: float) -> NDArray[np.float64]:
    """sqrt(1-a^2) / (pi (1-v^2) sqrt(a^2-v^2)) inside |v| < a, zero outside."""
    a = float(a)
    if not 0.0 < a < 1.0:
        raise ParameterRangeError(f"Konno density requires 0 < a < 1 (got {a}).")
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros_like(v)
    inside = np.abs(v) < a
    vi = v[inside]
    out[inside] = math.sqrt(1 - a * a) / (math.pi * (1 - vi * vi) * np.sqrt((a - vi) * (a + vi)))
    return out


def konno_moment(k: int, a: float) -> float:
    """Even moment int u^{2k} mu(u; a) du."""
    if k < 0:
        raise ParameterRangeError(f"konno_moment requires k >= 0 (got {k}).")
    if not 0.0 < a < 1.0:
        raise ParameterRangeError(f"Konno moment requires 0 < a < 1 (got {a}).")
    s = math.sqrt(1 - a * a)
    value, ratio = 1.0, 1.0
    for i in range(k):
        # ratio = (2i-1)!! / (2i)!!
        value -= s * a ** (2 * i) * ratio
        ratio *= (2 * i + 1) / (2 * i + 2)
    return value


def _konno_power_moment(p: int, a: float) -> float:
    return 0.0 if p % 2 else konno_moment(p // 2, a)


@dataclass(frozen=True)
class WeightPolynomial:
    """M^{(j,m)}(u) = sum_i coeffs[i] u^i."""

    j: HalfInt
    m: HalfInt
    coeffs: Tuple[float, ...]

    def __call__(self, u: ArrayLike) -> NDArray[np.float64]:
        return P.polyval(np.asarray(u, dtype=np.float64), self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def vanishes_at(self, root: float, tol: float = EDGE_REMAINDER_TOLERANCE) -> bool:
        """True when (root - u) divides M up to `tol` on the remainder."""
        _, remainder = P.polydiv(self.coeffs, (root, -1.0))
        scale = max(1.0, float(np.max(np.abs(self.coeffs))))
        return bool(np.all(np.abs(remainder) <= tol * scale))


def _c(a: complex, b: complex) -> float:
    # a b* + a* b
    return 2.0 * (a * b.conjugate()).real


def _sq(a: complex) -> float:
    return abs(a) ** 2


def _weights_half(m: HalfInt, h: Dict[str, complex], rho: float) -> List[float]:
    return [1.0, (1 - 2 * _sq(h["chi+"])) / rho]


def _weights_one(m: HalfInt, h: Dict[str, complex], rho: float) -> List[float]:
    h0, hp, hm = h["chi0"], h["chi+"], h["chi-"]
    return [_sq(hp) + _sq(hm), _c(h0, hm) / rho, (_sq(h0) - _sq(hp)) / rho**2]


def _weights_three_halves(m: HalfInt, h: Dict[str, complex], rho: float) -> List[float]:
    a, b = h["chi1+"], h["chi1-"]
    c, d = h["chi2+"], h["chi2-"]
    r3 = math.sqrt(3.0)
    cross_diff = _c(a, c) - _c(b, d)
    cross_sum = _c(a, c) + _c(b, d)
    spread = r3 * (_sq(a) + _sq(b) - _sq(c) - _sq(d)) - cross_sum
    cubic = 3 * _sq(a) - 3 * _sq(b) + _sq(c) - _sq(d)
    if m.twice == 1:
        return [
            _sq(a) + _sq(b),
            -(2 * (_sq(a) - _sq(b)) + r3 / 2 * cross_diff) / rho,
            -r3 / (4 * rho**2) * spread,
            3 / (4 * rho**3) * (cubic + r3 * cross_diff),
        ]
    return [
        _sq(c) + _sq(d),
        r3 / (2 * rho) * cross_diff,
        r3 / (4 * rho**2) * spread,
        -1 / (4 * rho**3) * (cubic + r3 * cross_diff),
    ]


def _weights_two(m: HalfInt, h: Dict[str, complex], rho: float) -> List[float]:
    h0 = h["chi0"]
    a, b = h["chi1+"], h["chi1-"]
    c, d = h["chi2+"], h["chi2-"]
    r3 = math.sqrt(3.0)
    quartic = 3 * _sq(h0) - 4 * _sq(a) + _sq(c) + r3 * _c(h0, c)
    if m.twice == 2:
        return [
            _sq(a) + _sq(b),
            (_c(a, d) + _c(c, b) + r3 * _c(h0, b)) / rho,
            (quartic - _sq(b) + _sq(d)) / rho**2,
            -(2 * _c(a, d) + _c(c, b) + r3 * _c(h0, b)) / rho**3,
            -quartic / rho**4,
        ]
    return [
        _sq(c) + _sq(d),
        -(_c(a, d) + _c(b, c)) / rho,
        (_sq(a) + _sq(b) - _sq(c) - _sq(d) - r3 / 2 * _c(h0, c)) / rho**2,
        (2 * _c(a, d) + _c(b, c) + r3 * _c(h0, b)) / (2 * rho**3),
        quartic / (4 * rho**4),
    ]


_WEIGHTS = {1: _weights_half, 2: _weights_one, 3: _weights_three_halves, 4: _weights_two}


def _moving_index(spin: HalfInt, m: HalfIntLike) -> HalfInt:
    index = require_index(spin, m, "m")
    if index.twice <= 0:
        raise ParameterRangeError(f"Weight polynomials are defined for 0 < m <= j (got m={index}).")
    return index


def weight_polynomial(j: HalfIntLike, m: HalfIntLike, h: CoinStateVector, rho: float) -> WeightPolynomial:
    """M^{(j,m)} from suitable-basis amplitudes h."""
    spin = require_spin(j)
    if spin.twice > WEIGHT_LIMIT:
        raise UnsupportedSpinError(f"Closed-form weights require j <= 2 (got j={spin}).")
    if h.basis_tag != SUITABLE:
        raise BasisMismatchError(f"weight_polynomial requires suitable-basis amplitudes (got {h.basis_tag}).")
    index = _moving_index(spin, m)
    value = require_open_rho(rho, "weight_polynomial")
    coeffs = _WEIGHTS[spin.twice](index, suitable_amplitudes(h, value), value)
    return WeightPolynomial(spin, index, tuple(float(c) for c in coeffs))


def standard_weight_polynomial(j: HalfIntLike, m: HalfIntLike, q: CoinStateVector, rho: float) -> WeightPolynomial:
    """Same weight written directly in the standard amplitudes; j <= 1 only."""
    spin = require_spin(j)
    if spin.twice > 2:
        raise UnsupportedSpinError(f"Standard-basis weights require j <= 1 (got j={spin}).")
    if q.basis_tag != STANDARD:
        raise BasisMismatchError(f"standard_weight_polynomial requires standard amplitudes (got {q.basis_tag}).")
    index = _moving_index(spin, m)
    value = require_open_rho(rho, "standard_weight_polynomial")
    s = math.sqrt(1 - value * value)
    amps = [complex(c) for c in q.amps]
    if spin.twice == 1:
        up, down = amps
        coeffs = [1.0, -_sq(up) + _sq(down) + s / value * _c(up, down)]
    else:
        up, mid, down = amps
        k = s / (math.sqrt(2.0) * value)
        coeffs = [
            0.5 * (_sq(up) + 2 * _sq(mid) + _sq(down) - _c(up, down)),
            -_sq(up) + _sq(down) + k * (_c(up, mid) + _c(mid, down)),
            0.5 * (_sq(up) - 2 * _sq(mid) + _sq(down))
            - k * (_c(up, mid) - _c(mid, down))
            + (2 - value**2) / (2 * value**2) * _c(up, down),
        ]
    return WeightPolynomial(spin, index, tuple(float(c) for c in coeffs))


@dataclass(frozen=True, eq=False)
class LimitDensityModel:
    """nu(v) for one (j, rho, initial coin state)."""

    j: HalfInt
    rho: float
    components: Dict[HalfInt, WeightPolynomial]
    state: Optional[CoinStateVector] = field(default=None, repr=False)

    @property
    def support_edges(self) -> Tuple[float, float]:
        edge = self.j.twice * self.rho
        return -edge, edge

    def caustics(self) -> List[float]:
        """Positions +-2m rho of the inverse square-root peaks, ascending."""
        points = {sign * m.twice * self.rho for m in self.components for sign in (-1, 1)}
        return sorted(points)

    def component(self, m: HalfIntLike, v: ArrayLike) -> NDArray[np.float64]:
        index = require_index(self.j, m, "m")
        weight = self.components[index]
        scale = float(index.twice)
        u = np.asarray(v, dtype=np.float64) / scale
        return konno_density(u, self.rho) * weight(u) / scale

    def __call__(self, v: ArrayLike) -> NDArray[np.float64]:
        v = np.asarray(v, dtype=np.float64)
        total = np.zeros_like(v)
        for m in self.components:
            total = total + self.component(m, v)
        return total


def limit_density_model(j: HalfIntLike, rho: float, h: CoinStateVector) -> LimitDensityModel:
    """Build nu for any coin state; non-suitable states are converted first."""
    spin = require_spin(j)
    if spin.twice > WEIGHT_LIMIT:
        raise UnsupportedSpinError(f"Limit densities require j <= 2 (got j={spin}).")
    value = require_open_rho(rho, "limit_density_model")
    suitable = express(h, SUITABLE, value)
    components = {m: weight_polynomial(spin, m, suitable, value) for m in HalfInt.indices(spin) if m.twice > 0}
    logger.debug("limit density j=%s rho=%.6g components=%d", spin, value, len(components))
    return LimitDensityModel(spin, value, components, suitable)


def limit_density(model: LimitDensityModel, v: ArrayLike) -> NDArray[np.float64]:
    return model(v)


def _component_moment_quadrature(weight: WeightPolynomial, rho: float, n: int, nodes: int) -> float:
    # u = rho sin(theta) turns mu(u) du into s / (pi (1 - rho^2 sin^2 theta)) dtheta
    x, w = roots_legendre(nodes)
    theta = 0.5 * math.pi * x
    u = rho * np.sin(theta)
    s = math.sqrt(1 - rho * rho)
    integrand = u**n * weight(u) * s / (math.pi * (1 - u * u))
    return float(0.5 * math.pi * np.sum(w * integrand))


def density_moment(model: LimitDensityModel, n: int, include_trapped: bool = False) -> float:
    """int v^n nu(v) dv by Gauss-Legendre quadrature, doubling nodes until stable."""
    if n < 0:
        raise ParameterRangeError(f"Moment order requires n >= 0 (got {n}).")
    total = 0.0
    for m, weight in model.components.items():
        nodes = QUADRATURE_START_NODES
        previous = _component_moment_quadrature(weight, model.rho, n, nodes)
        while nodes < QUADRATURE_MAX_NODES:
            nodes *= 2
            current = _component_moment_quadrature(weight, model.rho, n, nodes)
            converged = abs(current - previous) < QUADRATURE_TOLERANCE
            previous = current
            if converged:
                break
        else:
            logger.warning("moment quadrature hit %d nodes for m=%s n=%d", nodes, m, n)
        total += float(m.twice) ** n * previous
    if include_trapped and n == 0 and model.j.is_integer:
        total += trapped_mass(model)
    return total


def exact_moment(model: LimitDensityModel, n: int) -> float:
    """Closed-form moment from the Konno even moments."""
    if n < 0:
        raise ParameterRangeError(f"Moment order requires n >= 0 (got {n}).")
    total = 0.0
    for m, weight in model.components.items():
        inner = sum(c * _konno_power_moment(n + i, model.rho) for i, c in enumerate(weight.coeffs))
        total += float(m.twice) ** n * inner
    return total


def cell_masses(model: LimitDensityModel, edges: ArrayLike, nodes: int = 24) -> NDArray[np.float64]:
    """
    int nu over each [edges[i], edges[i+1]]. Every component is integrated in
    theta with u = rho sin(theta), which keeps cells touching a caustic finite.
    """
    edges = np.asarray(edges, dtype=np.float64)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ParameterRangeError("cell_masses requires strictly increasing edges.")
    x, w = roots_legendre(nodes)
    rho = model.rho
    s = math.sqrt(1 - rho * rho)
    total = np.zeros(edges.size - 1)
    for m, weight in model.components.items():
        theta = np.arcsin(np.clip(edges / (m.twice * rho), -1.0, 1.0))
        lo, hi = theta[:-1, None], theta[1:, None]
        half = 0.5 * (hi - lo)
        nodes_theta = lo + half * (x[None, :] + 1.0)
        u = rho * np.sin(nodes_theta)
        integrand = weight(u) * s / (math.pi * (1 - u * u))
        total += np.sum(w[None, :] * integrand, axis=1) * half[:, 0]
    return total


def trapped_mass(model: LimitDensityModel) -> float:
    """Mass left near the origin; zero for half-integer j."""
    if not model.j.is_integer:
        return 0.0
    if model.state is None:
        raise StateSpecError("The trapped mass requires the model's initial coin state.")
    return trapping_total(trapping_model(model.j, model.rho, model.state))


def peak_condition_residuals(
    j: HalfIntLike, h: CoinStateVector, rho: float
) -> Dict[HalfInt, Tuple[float, float]]:
    """
    Per m: (odd residual, even residual) = (M1 + rho^2 M3, M0 + rho^2 M2 + rho^4 M4).
    Both peaks of m vanish iff both residuals do; the +rho peak alone iff their
    combination M(rho) = even + rho * odd does.
    """
    spin = require_spin(j)
    model = limit_density_model(spin, rho, h)
    value = model.rho
    out = {}
    for m, weight in model.components.items():
        coeffs = weight.coeffs
        odd = sum(c * value ** (i - 1) for i, c in enumerate(coeffs) if i % 2 == 1)
        even = sum(c * value**i for i, c in enumerate(coeffs) if i % 2 == 0)
        out[m] = (float(odd), float(even))
    return out


def eliminated_peaks(model: LimitDensityModel) -> List[Tuple[HalfInt, int]]:
    """(m, side) for every caustic whose weight factor vanishes."""
    return [
        (m, side)
        for m, weight in sorted(model.components.items())
        for side in (-1, 1)
        if weight.vanishes_at(side * model.rho)
    ]


def surviving_peaks(model: LimitDensityModel) -> List[Tuple[HalfInt, int]]:
    gone = set(eliminated_peaks(model))
    return [(m, side) for m in sorted(model.components) for side in (-1, 1) if (m, side) not in gone]


def edge_value(model: LimitDensityModel, m: HalfIntLike, side: int) -> float:
    """
    Limit of nu at v = side * 2m rho. The divergent factor of component m is
    cancelled when (rho -+ u) divides its weight; wider components are
    smooth there and narrower ones vanish.
    """
    index = require_index(model.j, m, "m")
    if side not in (-1, 1):
        raise ParameterRangeError(f"edge_value requires side = +1 or -1 (got {side}).")
    if index not in model.components:
        raise ParameterRangeError(f"edge_value requires a moving component 0 < m <= j (got m={index}).")
    if not model.components[index].vanishes_at(side * model.rho):
        return math.inf
    v = side * index.twice * model.rho
    return float(sum(float(model.component(k, v)) for k in model.components if k > index))


def density_curve(model: LimitDensityModel, grid: Sequence[float] | int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """(v, nu(v)) on `grid`, dropping points within CAUSTIC_EPSILON of a caustic."""
    if isinstance(grid, int):
        if grid < 2:
            raise ParameterRangeError(f"density_curve requires at least 2 points (got {grid}).")
        low, high = model.support_edges
        v = np.linspace(low, high, grid)
    else:
        v = np.asarray(grid, dtype=np.float64)
    keep = np.ones(v.shape, dtype=bool)
    for caustic in model.caustics():
        keep &= np.abs(v - caustic) > CAUSTIC_EPSILON
    v = v[keep]
    return v, model(v)


def special_state(
    j: HalfIntLike,
    kind: str,
    rho: float,
    h1p: complex = 1.0,
    h1m: complex = 0.0,
) -> CoinStateVector:
    """Suitable-basis states whose peaks cancel analytically."""
    spin = require_spin(j)
    value = require_open_rho(rho, "special_state")
    r3 = math.sqrt(3.0)
    if kind in ("inner_free", "outer_free"):
        if spin.twice != 3:
            raise StateSpecError(f"State {kind!r} requires j=3/2 (got j={spin}).")
        factor = -1 / r3 if kind == "inner_free" else r3
        amps = [h1p, h1m, factor * h1p, factor * h1m]
    elif kind in ("j2_single_peak", "j2_no_slower"):
        if spin.twice != 4:
            raise StateSpecError(f"State {kind!r} requires j=2 (got j={spin}).")
        sign = 1.0 if kind == "j2_single_peak" else -1.0
        amps = [0.5, 0.0, 0.0, sign * r3 / 2, 0.0]
    else:
        raise StateSpecError(f"Unknown special state {kind!r}; known {SPECIAL_STATES}.")
    state, _ = CoinStateVector.normalized(spin, SUITABLE, amps, value)
    return state


@dataclass(frozen=True, eq=False)
class SampledLimit:
    """
    Limit law of x/t for any spin, sampled on a uniform momentum grid.

    U(k) = diag(e^{-ik s_m}) R with s_m the displacement of component m. Band n
    at momentum k carries the weight |<phi_n(k)|q>|^2 and moves with the
    velocity <phi_n(k)|S|phi_n(k)>. Rows of `velocities` and `weights` are
    momenta, columns are bands.
    """

    j: HalfInt
    rho: float
    velocities: NDArray[np.float64] = field(repr=False)
    weights: NDArray[np.float64] = field(repr=False)

    @property
    def nodes(self) -> int:
        return int(self.velocities.shape[0])

    def caustics(self) -> List[float]:
        points = {sign * m.twice * self.rho for m in HalfInt.indices(self.j) if m.twice > 0 for sign in (-1, 1)}
        return sorted(points)

    def window_mass(self, low: float, high: float) -> float:
        """Limit mass of low <= v <= high."""
        inside = (self.velocities >= low) & (self.velocities <= high)
        return float(np.sum(self.weights[inside]) / self.nodes)

    def caustic_weight(self, m: HalfIntLike, side: int) -> float:
        """Median weight of the samples stationary at v = side * 2m rho."""
        index = require_index(self.j, m, "m")
        if index.twice <= 0 or side not in (-1, 1):
            raise ParameterRangeError(f"caustic_weight requires 0 < m <= j and side = +-1 (got m={index}, side={side}).")
        gap = np.abs(self.velocities - side * index.twice * self.rho)
        near = gap < CAUSTIC_BAND
        if not np.any(near):
            logger.warning("no sample within %.0e of the m=%s caustic; using the closest one", CAUSTIC_BAND, index)
            return float(self.weights.flat[int(np.argmin(gap))])
        return float(np.median(self.weights[near]))

    def eliminated_peaks(self, tol: float = CAUSTIC_WEIGHT_TOLERANCE) -> List[Tuple[HalfInt, int]]:
        return [
            (m, side)
            for m in sorted(HalfInt.indices(self.j))
            if m.twice > 0
            for side in (-1, 1)
            if self.caustic_weight(m, side) < tol
        ]

    def surviving_peaks(self, tol: float = CAUSTIC_WEIGHT_TOLERANCE) -> List[Tuple[HalfInt, int]]:
        gone = set(self.eliminated_peaks(tol))
        return [
            (m, side)
            for m in sorted(HalfInt.indices(self.j))
            if m.twice > 0
            for side in (-1, 1)
            if (m, side) not in gone
        ]


def sampled_limit(
    j: HalfIntLike,
    rho: float,
    psi: CoinStateVector,
    nodes: int = SAMPLED_NODES,
    displacement_sign: int = ANALYTIC_ORIENTATION,
) -> SampledLimit:
    """Sample the limit law of any spin from the band structure of the walk."""
    spin = require_spin(j)
    value = require_open_rho(rho, "sampled_limit")
    if nodes < 16:
        raise ParameterRangeError(f"sampled_limit requires at least 16 nodes (got {nodes}).")
    if psi.j != spin:
        raise BasisMismatchError(f"sampled_limit for j={spin} cannot use a j={psi.j} state.")
    q = np.asarray(express(psi, STANDARD).amps)
    shifts = displacement_sign * np.array([m.twice for m in HalfInt.indices(spin)], dtype=np.float64)
    k = -math.pi + 2 * math.pi * (np.arange(nodes) + 0.5) / nodes
    unitaries = np.exp(-1j * k[:, None] * shifts[None, :])[:, :, None] * wigner_coin(spin, value).entries[None, :, :]
    _, vectors = np.linalg.eig(unitaries)
    vectors = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    populations = np.abs(vectors) ** 2
    velocities = np.einsum("m,kmn->kn", shifts, populations)
    weights = np.abs(np.einsum("kmn,m->kn", vectors.conj(), q)) ** 2
    logger.debug("sampled limit j=%s rho=%.6g nodes=%d mass=%.12g", spin, value, nodes, weights.sum() / nodes)
    return SampledLimit(spin, value, velocities, weights)
