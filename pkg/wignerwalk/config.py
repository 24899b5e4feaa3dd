"""
Run configuration shared by the command-line scripts and the verification suites.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from wignerwalk.errors import ParameterRangeError
from wignerwalk.halfint import HalfInt

logger = logging.getLogger(__name__)

WORKERS_ENV = "WIGNERWALK_WORKERS"
LOG_LEVEL_ENV = "WIGNERWALK_LOG_LEVEL"
MAX_DEFAULT_WORKERS = 8

# Displacement of coin component m per step is sign * 2m.
ANALYTIC_ORIENTATION = -1
LITERAL_ORIENTATION = 1
ORIENTATIONS = {"analytic": ANALYTIC_ORIENTATION, "literal": LITERAL_ORIENTATION}


@dataclass(frozen=True)
class Tolerances:
    """Acceptance thresholds used by the verification reports."""

    density_l1: float = 0.08
    gauge: float = 1e-12
    moment_gap: float = 0.02
    normalization: float = 1e-5
    trapping: float = 0.002
    exclusion_sites: int = 5
    peak_window: int = 10
    peak_ratio: float = 0.10
    single_peak_fraction: float = 0.02
    # a surviving window must hold at least half of its limit-law mass
    peak_shortfall: float = 0.5


def default_workers() -> int:
    """Worker count from WIGNERWALK_WORKERS, else cpu_count capped at 8."""
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            workers = int(raw)
        except ValueError:
            logger.warning("ignoring %s=%r (not an integer)", WORKERS_ENV, raw)
        else:
            if workers >= 1:
                return workers
            logger.warning("ignoring %s=%r (must be >= 1)", WORKERS_ENV, raw)
    return max(1, min(os.cpu_count() or 1, MAX_DEFAULT_WORKERS))


def orientation_sign(name: str) -> int:
    try:
        return ORIENTATIONS[name]
    except KeyError:
        raise ParameterRangeError(f"Orientation requires one of {sorted(ORIENTATIONS)} (got {name!r}).") from None


@dataclass(frozen=True)
class RunConfig:
    """One parsed command-line run."""

    command: str
    j: HalfInt
    rho: Optional[float] = None
    # (alpha, beta, gamma); used instead of rho when set
    euler: Optional[Tuple[float, float, float]] = None
    state: str = "chi0"
    t: int = 100
    output: Optional[str] = None
    fmt: str = "csv"
    tolerances: Tolerances = field(default_factory=Tolerances)
    workers: int = 1
    displacement_sign: int = ANALYTIC_ORIENTATION

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ParameterRangeError(f"Step count requires t >= 0 (got {self.t}).")
        if self.rho is not None and not 0.0 <= self.rho <= 1.0:
            raise ParameterRangeError(f"Coin parameter rho requires 0 <= rho <= 1 (got {self.rho}).")
        if self.displacement_sign not in (ANALYTIC_ORIENTATION, LITERAL_ORIENTATION):
            raise ParameterRangeError(f"displacement_sign requires +1 or -1 (got {self.displacement_sign}).")

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Build a config with environment defaults; explicit overrides win."""
        values = {"workers": default_workers()}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_overrides(self, **changes) -> "RunConfig":
        return replace(self, **changes)
