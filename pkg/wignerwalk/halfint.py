"""
Exact half-integers stored as doubled integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Union

from wignerwalk.errors import SpinValueError

HalfIntLike = Union["HalfInt", int, float, str, Fraction]


@dataclass(frozen=True, order=True)
class HalfInt:
    """
    A value j, m or n of the rotation group, kept as 2*value so that
    arithmetic stays exact.
    """

    twice: int

    def __post_init__(self) -> None:
        if isinstance(self.twice, bool) or not isinstance(self.twice, int):
            raise TypeError(f"HalfInt.twice must be int, got {type(self.twice).__name__}.")

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        """Parse '3/2', '-1/2', '2' or '1.5'."""
        raw = str(text).strip()
        try:
            value = Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpinValueError(f"Half-integer requires a literal like '3/2' (got {raw!r}).") from exc
        return cls.from_fraction(value)

    @classmethod
    def from_fraction(cls, value: Fraction) -> "HalfInt":
        doubled = value * 2
        if doubled.denominator != 1:
            raise SpinValueError(f"Half-integer requires 2*value to be an integer (got {value}).")
        return cls(int(doubled))

    @classmethod
    def from_float(cls, value: float) -> "HalfInt":
        doubled = round(2 * value)
        if abs(doubled - 2 * value) > 1e-12:
            raise SpinValueError(f"Half-integer requires 2*value to be an integer (got {value}).")
        return cls(int(doubled))

    @classmethod
    def coerce(cls, value: HalfIntLike) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise TypeError("HalfInt cannot be built from bool.")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, Fraction):
            return cls.from_fraction(value)
        if isinstance(value, float):
            return cls.from_float(value)
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"Cannot interpret {type(value).__name__} as a half-integer.")

    @property
    def value(self) -> float:
        return self.twice / 2

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    @property
    def dimension(self) -> int:
        """2j + 1, for a spin."""
        return self.twice + 1

    def __add__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice + HalfInt.coerce(other).twice)

    def __sub__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice - HalfInt.coerce(other).twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    @staticmethod
    def indices(j: HalfIntLike) -> List["HalfInt"]:
        """Coin indices m = +j, j-1, ..., -j (the row order of every coin matrix)."""
        spin = require_spin(j)
        return [HalfInt(spin.twice - 2 * k) for k in range(spin.dimension)]


def require_spin(j: HalfIntLike) -> HalfInt:
    """Coerce and validate a spin value (2j >= 1)."""
    spin = HalfInt.coerce(j)
    if spin.twice < 1:
        raise SpinValueError(f"Spin requires j >= 1/2 (got {spin}).")
    return spin


def require_index(j: HalfInt, m: HalfIntLike, name: str = "m") -> HalfInt:
    """Validate a magnetic index against its spin."""
    idx = HalfInt.coerce(m)
    if abs(idx.twice) > j.twice or (j.twice - idx.twice) % 2 != 0:
        raise SpinValueError(f"Index {name} requires -j <= {name} <= j with j-{name} integer (got j={j}, {name}={idx}).")
    return idx
