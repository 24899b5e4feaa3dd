"""
Coin state vectors tagged with the basis their amplitudes refer to.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from wignerwalk.errors import BasisMismatchError, NormalizationError, SpinValueError
from wignerwalk.halfint import HalfInt, HalfIntLike, require_spin

logger = logging.getLogger(__name__)

STANDARD = "standard"
SUITABLE = "suitable"
LAMBDA = "lambda"
BASIS_TAGS = (STANDARD, SUITABLE, LAMBDA)

STATE_NORM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class CoinStateVector:
    """
    2j+1 amplitudes in one of the coin bases. Non-standard tags carry the
    coin parameter rho their basis was built for.
    """

    j: HalfInt
    basis_tag: str
    amps: NDArray[np.complex128] = field(repr=False)
    rho: Optional[float] = None

    def __post_init__(self) -> None:
        if self.basis_tag not in BASIS_TAGS:
            raise BasisMismatchError(f"Basis tag requires one of {BASIS_TAGS} (got {self.basis_tag!r}).")
        if self.basis_tag != STANDARD and self.rho is None:
            raise BasisMismatchError(f"A {self.basis_tag} coin state requires the coin parameter rho.")
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.size != self.j.dimension:
            raise SpinValueError(f"Coin state for j={self.j} requires {self.j.dimension} amplitudes (got {amps.size}).")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > STATE_NORM_TOLERANCE:
            raise NormalizationError(f"Coin state requires unit norm (got |psi|^2 = {norm:.15g}).")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(
        cls,
        j: HalfIntLike,
        basis_tag: str,
        amps: Sequence[complex],
        rho: Optional[float] = None,
    ) -> Tuple["CoinStateVector", float]:
        """Normalise `amps` first; also returns the norm deviation that was removed."""
        spin = require_spin(j)
        vector = np.asarray(amps, dtype=np.complex128).reshape(-1)
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise NormalizationError("Coin state requires a non-zero amplitude vector.")
        return cls(spin, basis_tag, vector / norm, rho), abs(norm * norm - 1.0)

    @classmethod
    def standard(cls, j: HalfIntLike, amps: Sequence[complex]) -> "CoinStateVector":
        return cls(require_spin(j), STANDARD, np.asarray(amps, dtype=np.complex128))

    @property
    def dimension(self) -> int:
        return self.j.dimension
