"""
Simulation and verification lab for one-dimensional quantum walks driven by a
spin-j Wigner rotation coin.
"""
from wignerwalk.bases import coin_eigensystem, express, lambda_basis, suitable_basis
from wignerwalk.coin import wigner_coin, wigner_coin_euler
from wignerwalk.config import RunConfig, Tolerances
from wignerwalk.errors import WalkError
from wignerwalk.evolution import evolve, initial_state, position_distribution, step
from wignerwalk.halfint import HalfInt
from wignerwalk.limitlaw import density_moment, limit_density_model
from wignerwalk.states import CoinStateVector
from wignerwalk.trapping import trapping_model, trapping_probability

__all__ = [
    "CoinStateVector",
    "HalfInt",
    "RunConfig",
    "Tolerances",
    "WalkError",
    "coin_eigensystem",
    "density_moment",
    "evolve",
    "express",
    "initial_state",
    "lambda_basis",
    "limit_density_model",
    "position_distribution",
    "step",
    "suitable_basis",
    "trapping_model",
    "trapping_probability",
    "wigner_coin",
    "wigner_coin_euler",
]
