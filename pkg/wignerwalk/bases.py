"""
Coin eigensystems and the bases built from them.

The suitable basis pairs every conjugate eigenvector couple psi_n^+- of the coin
with its half phase:

    chi_n^+ = (e^{-i phi_n/2} psi_n^+ + e^{i phi_n/2} psi_n^-) / sqrt(2)
    chi_n^- = i (e^{-i phi_n/2} psi_n^+ - e^{i phi_n/2} psi_n^-) / sqrt(2)

and adds the eigenvalue-1 vector chi_0 for integer j. For j <= 2 the
eigenvectors are the closed forms; any j can also go through the numerical
path, which diagonalises the rotation generator J_y instead of the coin itself
so that accidental eigenphase crossings cannot mix pairs.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from wignerwalk.coin import wigner_coin
from wignerwalk.errors import (
    BasisMismatchError,
    DegenerateParameterError,
    ParameterRangeError,
    SpinValueError,
    UnsupportedSpinError,
)
from wignerwalk.halfint import HalfInt, HalfIntLike, require_spin
from wignerwalk.states import LAMBDA, STANDARD, SUITABLE, CoinStateVector

logger = logging.getLogger(__name__)

EIGEN_RESIDUAL_TOLERANCE = 1e-10
RHO_MATCH_TOLERANCE = 1e-14
# j <= 2 has printed closed forms
CLOSED_FORM_LIMIT = 4


def require_open_rho(rho: float, what: str = "This asymptotic object") -> float:
    """0 < rho < 1, the range of every eigen/asymptotic construction."""
    value = float(rho)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ParameterRangeError(f"{what} requires 0 < rho < 1 (got {rho}).")
    if value in (0.0, 1.0):
        raise DegenerateParameterError(f"{what} requires 0 < rho < 1; eigenphases collide at rho={value}.")
    return value


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """
    Conjugate eigenpairs of R^(j)(rho): R psi_n^+- = e^{+-i phi_n} psi_n^+-.
    `half_phases[n]` is the phi_n/2 used by the basis recipe.
    """

    j: HalfInt
    rho: float
    phases: Tuple[float, ...]
    plus: Tuple[NDArray[np.complex128], ...] = field(repr=False)
    minus: Tuple[NDArray[np.complex128], ...] = field(repr=False)
    half_phases: Tuple[float, ...] = ()
    zero_mode: Optional[NDArray[np.complex128]] = field(default=None, repr=False)

    @property
    def pair_count(self) -> int:
        return len(self.phases)

    def residuals(self) -> List[float]:
        """||R psi - e^{i phi} psi|| for every returned eigenvector."""
        coin = wigner_coin(self.j, self.rho).entries
        out = []
        for phi, up, down in zip(self.phases, self.plus, self.minus):
            out.append(float(np.linalg.norm(coin @ up - np.exp(1j * phi) * up)))
            out.append(float(np.linalg.norm(coin @ down - np.exp(-1j * phi) * down)))
        if self.zero_mode is not None:
            out.append(float(np.linalg.norm(coin @ self.zero_mode - self.zero_mode)))
        return out


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Orthonormal coin basis; column k of `vectors` is basis vector `labels[k]` in the standard basis."""

    j: HalfInt
    rho: float
    kind: str
    labels: Tuple[str, ...]
    vectors: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        matrix = np.array(self.vectors, dtype=np.complex128)
        matrix.setflags(write=False)
        object.__setattr__(self, "vectors", matrix)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise BasisMismatchError(f"Basis {self.kind} for j={self.j} has no vector {label!r}; known {self.labels}.") from None

    def vector(self, label: str) -> NDArray[np.complex128]:
        return self.vectors[:, self.index(label)]

    def gram(self) -> NDArray[np.complex128]:
        return self.vectors.conj().T @ self.vectors

    def to_dict(self) -> dict:
        return {
            "j": str(self.j),
            "rho": self.rho,
            "kind": self.kind,
            "vectors": {
                label: [[float(c.real), float(c.imag)] for c in self.vectors[:, k]]
                for k, label in enumerate(self.labels)
            },
        }


def pair_magnitudes(j: HalfInt) -> List[HalfInt]:
    """|J_y| eigenvalues of the conjugate pairs, ascending (1/2, 3/2, ... or 1, 2, ...)."""
    start = 1 if j.twice % 2 else 2
    return [HalfInt(tw) for tw in range(start, j.twice + 1, 2)]


def suitable_labels(j: HalfIntLike) -> Tuple[str, ...]:
    spin = require_spin(j)
    pairs = len(pair_magnitudes(spin))
    labels: List[str] = ["chi0"] if spin.is_integer else []
    if pairs == 1:
        labels += ["chi+", "chi-"]
    else:
        for k in range(1, pairs + 1):
            labels += [f"chi{k}+", f"chi{k}-"]
    return tuple(labels)


def lambda_labels(j: HalfIntLike) -> Tuple[str, ...]:
    spin = require_spin(j)
    if spin.twice == 2:
        return ("lambda+", "lambda-", "chi-")
    if spin.twice == 4:
        return ("lambda0", "lambda+", "lambda-", "chi1-", "chi2-")
    raise UnsupportedSpinError(f"The lambda basis requires j in {{1, 2}} (got j={spin}).")


def jy_matrix(j: HalfIntLike) -> NDArray[np.complex128]:
    """J_y in the standard basis, rows/columns ordered m = +j ... -j; R(rho) = exp(-i beta J_y)."""
    spin = require_spin(j)
    dim = spin.dimension
    raising = np.zeros((dim, dim), dtype=np.float64)
    jj = spin.value
    for col in range(1, dim):
        m = jj - col
        raising[col - 1, col] = math.sqrt(jj * (jj + 1) - m * (m + 1))
    return (raising - raising.T) / 2j


def _parity(j: HalfInt) -> NDArray[np.float64]:
    # (-1)^(j-m) along the m-descending axis
    return np.array([1.0 if k % 2 == 0 else -1.0 for k in range(j.dimension)])


def _fix_phase(vector: NDArray[np.complex128], parity: NDArray[np.float64], sigma: float) -> NDArray[np.complex128]:
    """Rotate so that the real part lives on the parity class selected by sigma."""
    theta = 0.5 * np.angle(sigma * np.sum(parity * vector * vector))
    return vector * np.exp(-1j * theta)


def _closed_eigensystem(j: HalfInt, rho: float) -> EigenSystem:
    r2, r3 = math.sqrt(2.0), math.sqrt(3.0)
    zero = None
    if j.twice == 1:
        phases = (math.acos(rho),)
        plus = (np.array([1, -1j]) / r2,)
    elif j.twice == 2:
        phases = (math.acos(2 * rho * rho - 1),)
        plus = (np.array([1j, r2, -1j]) / 2,)
        zero = np.array([1, 0, 1], dtype=np.complex128) / r2
    elif j.twice == 3:
        arg = rho * (4 * rho * rho - 3)
        phi2 = math.acos(arg) if rho <= 0.5 else 2 * math.pi - math.acos(arg)
        phases = (math.acos(rho), phi2)
        plus = (
            np.array([r3, -1j, 1, -1j * r3]) / math.sqrt(8.0),
            np.array([1, 1j * r3, -r3, -1j]) / math.sqrt(8.0),
        )
    elif j.twice == 4:
        arg = 8 * rho**4 - 8 * rho**2 + 1
        phi2 = math.acos(arg) if rho <= 1 / r2 else 2 * math.pi - math.acos(arg)
        phases = (math.acos(2 * rho * rho - 1), phi2)
        plus = (
            np.array([1j, 1, 0, 1, -1j]) / 2,
            np.array([1, 2j, -math.sqrt(6.0), -2j, 1]) / 4,
        )
        zero = np.array([math.sqrt(3 / 8), 0, 0.5, 0, math.sqrt(3 / 8)], dtype=np.complex128)
    else:
        raise UnsupportedSpinError(f"Closed-form eigensystem requires j <= 2 (got j={j}).")
    plus = tuple(np.asarray(v, dtype=np.complex128) for v in plus)
    return EigenSystem(
        j=j,
        rho=rho,
        phases=tuple(phases),
        plus=plus,
        minus=tuple(v.conj() for v in plus),
        half_phases=tuple(phi / 2 for phi in phases),
        zero_mode=zero,
    )


@lru_cache(maxsize=64)
def _generator_eigenvectors(twice: int) -> Tuple[NDArray[np.float64], NDArray[np.complex128]]:
    values, vectors = np.linalg.eigh(jy_matrix(HalfInt(twice)))
    values.setflags(write=False)
    vectors.setflags(write=False)
    return values, vectors


def numerical_eigensystem(j: HalfIntLike, rho: float) -> EigenSystem:
    """
    Eigenpairs from J_y: the member with J_y = -mu is psi^+ with phase mu*beta.
    Its global phase puts the real part on the parity class (j-m) even for
    half-integer j, and on (j-m) = mu (mod 2) for integer j.
    """
    spin = require_spin(j)
    value = require_open_rho(rho, "coin_eigensystem")
    beta = 2.0 * math.acos(value)
    eigvals, eigvecs = _generator_eigenvectors(spin.twice)
    parity = _parity(spin)

    def column(target: float) -> NDArray[np.complex128]:
        k = int(np.argmin(np.abs(eigvals - target)))
        return np.array(eigvecs[:, k], dtype=np.complex128)

    phases, halves, plus = [], [], []
    for mu in pair_magnitudes(spin):
        if spin.is_integer:
            sigma = 1.0 if (mu.twice // 2) % 2 == 0 else -1.0
        else:
            sigma = 1.0
        vector = _fix_phase(column(-mu.value), parity, sigma)
        plus.append(vector)
        halves.append(mu.value * beta / 2)
        phases.append(math.fmod(mu.value * beta, 2 * math.pi))

    zero = None
    if spin.is_integer:
        zero = _fix_phase(column(0.0), parity, 1.0).real.astype(np.complex128)
        zero /= np.linalg.norm(zero)

    system = EigenSystem(
        j=spin,
        rho=value,
        phases=tuple(phases),
        plus=tuple(plus),
        minus=tuple(v.conj() for v in plus),
        half_phases=tuple(halves),
        zero_mode=zero,
    )
    worst = max(system.residuals())
    if worst > EIGEN_RESIDUAL_TOLERANCE:
        logger.warning("eigen residual %.3g exceeds %.0e for j=%s rho=%.6g", worst, EIGEN_RESIDUAL_TOLERANCE, spin, value)
    return system


def coin_eigensystem(j: HalfIntLike, rho: float) -> EigenSystem:
    """Closed-form eigenpairs for j <= 2, numerical ones above."""
    spin = require_spin(j)
    value = require_open_rho(rho, "coin_eigensystem")
    if spin.twice <= CLOSED_FORM_LIMIT:
        return _closed_eigensystem(spin, value)
    return numerical_eigensystem(spin, value)


def _recipe(system: EigenSystem) -> NDArray[np.float64]:
    columns = []
    if system.zero_mode is not None:
        columns.append(system.zero_mode.real)
    for half, up in zip(system.half_phases, system.plus):
        rotated = np.exp(-1j * half) * up
        columns.append(math.sqrt(2.0) * rotated.real)
        columns.append(-math.sqrt(2.0) * rotated.imag)
    return np.column_stack(columns)


def _normalise_signs(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
    out = matrix.copy()
    for k in range(out.shape[1]):
        nonzero = np.flatnonzero(np.abs(out[:, k]) > 1e-9)
        if nonzero.size and out[nonzero[0], k] < 0:
            out[:, k] = -out[:, k]
    return out


def suitable_basis(j: HalfIntLike, rho: float, method: str = "closed") -> BasisSet:
    """
    The suitable basis {chi_0, chi_n^+-}. `method="closed"` applies the recipe to
    the closed-form eigenvectors (j <= 2); `method="recipe"` uses the numerical
    eigensystem and normalises each vector so its first non-zero entry is positive.
    """
    spin = require_spin(j)
    value = require_open_rho(rho, "suitable_basis")
    if method not in ("closed", "recipe"):
        raise ValueError(f"suitable_basis method requires 'closed' or 'recipe' (got {method!r}).")
    if method == "closed" and spin.twice <= CLOSED_FORM_LIMIT:
        matrix = _recipe(_closed_eigensystem(spin, value))
    else:
        matrix = _normalise_signs(_recipe(numerical_eigensystem(spin, value)))
    return BasisSet(spin, value, SUITABLE, suitable_labels(spin), matrix.astype(np.complex128))


def lambda_basis(j: HalfIntLike, rho: float) -> BasisSet:
    """One-sided trapping basis for j = 1 and j = 2."""
    spin = require_spin(j)
    labels = lambda_labels(spin)
    value = require_open_rho(rho, "lambda_basis")
    chi = suitable_basis(spin, value)
    if spin.twice == 2:
        c0, cp, cm = (chi.vector(label) for label in ("chi0", "chi+", "chi-"))
        columns = [(c0 + cp) / math.sqrt(2.0), (c0 - cp) / math.sqrt(2.0), cm]
    else:
        c0, c1p, c1m, c2p, c2m = (chi.vector(label) for label in chi.labels)
        side = math.sqrt(3 / 8) * c0 + c2p / math.sqrt(8.0)
        columns = [
            0.5 * c0 - math.sqrt(3.0) / 2 * c2p,
            side + c1p / math.sqrt(2.0),
            side - c1p / math.sqrt(2.0),
            c1m,
            c2m,
        ]
    return BasisSet(spin, value, LAMBDA, labels, np.column_stack(columns))


def basis_for(j: HalfIntLike, tag: str, rho: float) -> BasisSet:
    if tag == SUITABLE:
        return suitable_basis(j, rho)
    if tag == LAMBDA:
        return lambda_basis(j, rho)
    raise BasisMismatchError(f"No basis matrix for tag {tag!r}.")


def _check_pair(psi: CoinStateVector, basis: BasisSet) -> None:
    if psi.j != basis.j:
        raise BasisMismatchError(f"Basis built for j={basis.j} cannot convert a j={psi.j} state.")
    if psi.rho is not None and abs(psi.rho - basis.rho) > RHO_MATCH_TOLERANCE:
        raise BasisMismatchError(f"Basis built for rho={basis.rho} cannot convert a rho={psi.rho} state.")


def to_basis(psi: CoinStateVector, basis: BasisSet) -> CoinStateVector:
    """h_k = <b_k|psi> for a standard-basis psi."""
    if psi.basis_tag != STANDARD:
        raise BasisMismatchError(f"Conversion into the {basis.kind} basis requires a standard-basis state (got {psi.basis_tag}).")
    _check_pair(psi, basis)
    amps = basis.vectors.conj().T @ psi.amps
    return CoinStateVector(psi.j, basis.kind, _renormalise(amps), basis.rho)


def to_suitable(psi: CoinStateVector, basis: BasisSet) -> CoinStateVector:
    if basis.kind != SUITABLE:
        raise BasisMismatchError(f"to_suitable requires a suitable basis (got {basis.kind}).")
    return to_basis(psi, basis)


def to_standard(psi: CoinStateVector, basis: BasisSet) -> CoinStateVector:
    """q = B h for a psi tagged with the basis kind."""
    if psi.basis_tag != basis.kind:
        raise BasisMismatchError(f"to_standard requires a {basis.kind} state (got {psi.basis_tag}).")
    _check_pair(psi, basis)
    return CoinStateVector(psi.j, STANDARD, _renormalise(basis.vectors @ psi.amps))


def _renormalise(amps: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # a unitary change keeps the norm up to rounding
    return amps / np.linalg.norm(amps)


def express(psi: CoinStateVector, target: str, rho: Optional[float] = None) -> CoinStateVector:
    """Re-express psi in another basis of the same (j, rho)."""
    if psi.basis_tag == target and (rho is None or psi.rho is None or abs(psi.rho - rho) <= RHO_MATCH_TOLERANCE):
        return psi
    standard = psi if psi.basis_tag == STANDARD else to_standard(psi, basis_for(psi.j, psi.basis_tag, psi.rho))
    if target == STANDARD:
        return standard
    parameter = rho if rho is not None else psi.rho
    if parameter is None:
        raise BasisMismatchError(f"Converting a standard state into the {target} basis requires rho.")
    return to_basis(standard, basis_for(psi.j, target, parameter))


def basis_state(basis: BasisSet, label: str) -> CoinStateVector:
    """Unit vector `label`, in the coordinates of `basis`."""
    amps = np.zeros(basis.j.dimension, dtype=np.complex128)
    amps[basis.index(label)] = 1.0
    return CoinStateVector(basis.j, basis.kind, amps, basis.rho)


def combination(basis: BasisSet, weights: Dict[str, complex]) -> CoinStateVector:
    """Normalised sum of labelled basis vectors, in basis coordinates."""
    amps = np.zeros(basis.j.dimension, dtype=np.complex128)
    for label, weight in weights.items():
        amps[basis.index(label)] += weight
    state, _ = CoinStateVector.normalized(basis.j, basis.kind, amps, basis.rho)
    return state


def suitable_amplitudes(psi: CoinStateVector, rho: Optional[float] = None) -> Dict[str, complex]:
    """Suitable-basis amplitudes keyed by label."""
    parameter = rho if rho is not None else psi.rho
    if parameter is None:
        raise BasisMismatchError("Suitable amplitudes of a standard state require rho.")
    h = express(psi, SUITABLE, parameter)
    return dict(zip(suitable_labels(psi.j), (complex(a) for a in h.amps)))
