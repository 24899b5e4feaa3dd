"""
Named initial coin states.

Resolves the names used on the command line and in the verification suites
(basis labels, the cancelling special states, raw amplitude lists) into
CoinStateVector objects for a given (j, rho).
"""
from __future__ import annotations

import logging
from typing import List

import numpy as np

from wignerwalk.bases import basis_state, lambda_basis, suitable_basis
from wignerwalk.errors import ParameterRangeError, StateSpecError, WalkError
from wignerwalk.halfint import HalfIntLike, require_spin
from wignerwalk.limitlaw import SPECIAL_STATES, special_state
from wignerwalk.states import STANDARD, SUITABLE, CoinStateVector

logger = logging.getLogger(__name__)

RENORMALISE_WARNING = 1e-9
AMPLITUDE_PREFIXES = {"std": STANDARD, "suit": SUITABLE}


def parse_complex(text: str) -> complex:
    """'0.5', '-1j', '0.3+0.4j' -> complex."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError:
        raise StateSpecError(f"Amplitude requires a number like 0.5 or 0.3+0.4j (got {text!r}).") from None


def parse_amplitudes(text: str) -> List[complex]:
    if not text.strip():
        raise StateSpecError("Amplitude list requires at least one value (got an empty list).")
    return [parse_complex(part) for part in text.split(",")]


def amplitude_state(j: HalfIntLike, spec: str, rho: float | None = None) -> CoinStateVector:
    """'std:1,0,0' or 'suit:0.5,0,0,-0.866,0', normalised with a warning on large deviations."""
    spin = require_spin(j)
    prefix, _, body = spec.partition(":")
    if prefix not in AMPLITUDE_PREFIXES or not body:
        raise StateSpecError(f"Amplitude state requires 'std:' or 'suit:' followed by values (got {spec!r}).")
    tag = AMPLITUDE_PREFIXES[prefix]
    if tag == SUITABLE and rho is None:
        raise StateSpecError("Suitable-basis amplitudes require rho.")
    amps = parse_amplitudes(body)
    if len(amps) != spin.dimension:
        raise StateSpecError(f"State for j={spin} requires {spin.dimension} amplitudes (got {len(amps)}).")
    try:
        state, deviation = CoinStateVector.normalized(spin, tag, amps, rho if tag == SUITABLE else None)
    except WalkError as exc:
        raise StateSpecError(str(exc)) from exc
    if deviation > RENORMALISE_WARNING:
        logger.warning("renormalised %s amplitudes (|psi|^2 was off by %.3g)", tag, deviation)
    return state


def _alias(label: str, labels: tuple) -> str:
    if label in labels:
        return label
    # a single pair is labelled chi+/chi- but also answers to chi1+/chi1-
    swapped = {"chi1+": "chi+", "chi1-": "chi-", "chi+": "chi1+", "chi-": "chi1-"}.get(label)
    if swapped in labels:
        return swapped
    raise StateSpecError(f"State {label!r} does not exist for this spin; known {labels}.")


def named_state(
    j: HalfIntLike,
    name: str,
    rho: float,
    h1p: complex = 1.0,
    h1m: complex = 0.0,
) -> CoinStateVector:
    """Resolve a state name for (j, rho); raises StateSpecError for a bad (j, name) pair."""
    spin = require_spin(j)
    if ":" in name:
        return amplitude_state(spin, name, rho)
    try:
        if name in SPECIAL_STATES:
            return special_state(spin, name, rho, h1p=h1p, h1m=h1m)
        if name.startswith("lambda"):
            basis = lambda_basis(spin, rho)
            return basis_state(basis, _alias(name, basis.labels))
        if name.startswith("chi"):
            basis = suitable_basis(spin, rho)
            return basis_state(basis, _alias(name, basis.labels))
    except (StateSpecError, ParameterRangeError):
        raise
    except WalkError as exc:
        raise StateSpecError(f"State {name!r} cannot be built for j={spin}, rho={rho}: {exc}") from exc
    raise StateSpecError(f"Unknown state {name!r}.")


def random_state(j: HalfIntLike, rng: np.random.Generator) -> CoinStateVector:
    """Haar-like random standard-basis state."""
    spin = require_spin(j)
    raw = rng.normal(size=spin.dimension) + 1j * rng.normal(size=spin.dimension)
    state, _ = CoinStateVector.normalized(spin, STANDARD, raw)
    return state
