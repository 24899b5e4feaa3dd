"""
Validation of simulated walks against the asymptotic results for the reference configurations.
These run longer walks and are marked slow.
"""
import math

import numpy as np
import pytest

from wignerwalk.bases import combination, lambda_basis, suitable_labels
from wignerwalk.catalog import named_state
from wignerwalk.config import Tolerances
from wignerwalk.evolution import empirical_moment, evolve, position_distribution, time_averaged_distribution
from wignerwalk.halfint import HalfInt
from wignerwalk.limitlaw import exact_moment, limit_density_model
from wignerwalk.states import LAMBDA, SUITABLE, CoinStateVector
from wignerwalk.trapping import decay_base, trapping_model, trapping_probability
from wignerwalk.verify import (
    FIGURE_CLAIMS,
    RECIPE_RHO,
    RECIPE_SPINS,
    check_moment_convergence,
    check_peak_claims,
    check_recipe_peaks,
    check_trapping_convergence,
    compare_density,
    figure_claim,
)

DENSITY_T = 100
TRAPPING_STATES = {
    "1": ("chi0", "chi+", "lambda+", "lambda-"),
    "2": ("chi0", "chi1+", "lambda+", "lambda-", "lambda0"),
}
UNTRAPPED_STATES = {"1": ("chi-",), "2": ("chi1-", "chi2-")}
RECIPE_CASES = [(j, label) for j in RECIPE_SPINS for label in suitable_labels(j)]


def coarse_l1(claim, psi_for_model, t=DENSITY_T):
    psi = claim.coin_state()
    profile = position_distribution(evolve(claim.j, claim.rho, psi, t))
    model = limit_density_model(claim.j, claim.rho, psi_for_model)
    report = compare_density(profile, model, block=5, trapping_present=claim.j.is_integer)
    return report.metrics["l1_coarse"]


def trapped_part(j, rho, psi, t, window, sites):
    """Time-averaged p(2x) minus the spreading background (2/t) nu(2x/t)."""
    averaged = time_averaged_distribution(j, rho, psi, t, window)
    sites = np.asarray(sites)
    background = 2.0 / t * limit_density_model(j, rho, psi)(2.0 * sites / t)
    return np.array([averaged.probability_at(2 * int(x)) for x in sites]) - background


class TestDensityOverlay:

    @pytest.mark.validation
    @pytest.mark.slow
    @pytest.mark.parametrize("figure", [c.figure for c in FIGURE_CLAIMS])
    def test_simulation_follows_the_limit(self, figure):
        claim = figure_claim(figure)
        assert coarse_l1(claim, claim.coin_state()) <= Tolerances().density_l1

    @pytest.mark.validation
    @pytest.mark.slow
    @pytest.mark.parametrize("figure,other", [(1, "chi+"), (3, "chi-"), (11, "chi2-")])
    def test_matched_state_beats_swapped(self, figure, other):
        claim = figure_claim(figure)
        swapped = named_state(claim.j, other, claim.rho)
        assert coarse_l1(claim, claim.coin_state()) < coarse_l1(claim, swapped)


class TestPeakClaims:

    @pytest.mark.validation
    @pytest.mark.slow
    @pytest.mark.parametrize("figure", [c.figure for c in FIGURE_CLAIMS])
    def test_peak_claims_hold(self, figure):
        report = check_peak_claims(figure_claim(figure), t=300)
        assert report.tolerances
        assert report.ok, report.to_dict()

    @pytest.mark.validation
    @pytest.mark.slow
    def test_single_peak_windows(self):
        report = check_peak_claims(figure_claim(15), t=300)
        assert report.metrics["eliminated_peaks"] == 4.0
        assert set(report.tolerances) == {"max_peak_fraction"}
        assert report.metrics["max_peak_fraction"] < Tolerances().single_peak_fraction

    @pytest.mark.validation
    @pytest.mark.slow
    @pytest.mark.parametrize("j,label", RECIPE_CASES)
    def test_recipe_vectors_beyond_closed_forms(self, j, label):
        report = check_recipe_peaks(j, RECIPE_RHO, label, t=300)
        assert report.tolerances
        assert report.ok, report.to_dict()


class TestTrappingConvergence:

    @pytest.mark.validation
    @pytest.mark.slow
    @pytest.mark.parametrize("figure", [5, 17])
    def test_trapped_profile(self, figure):
        claim = figure_claim(figure)
        report = check_trapping_convergence(claim.j, claim.rho, claim.coin_state(), 2000, 50)
        assert report.ok, report.to_dict()

    @pytest.mark.validation
    @pytest.mark.slow
    @pytest.mark.parametrize("rho", [0.4, 0.5, 0.6])
    @pytest.mark.parametrize("j,state", [(j, s) for j, states in TRAPPING_STATES.items() for s in states])
    def test_trapping_grid(self, j, state, rho):
        report = check_trapping_convergence(j, rho, named_state(j, state, rho), 2000, 50)
        assert report.ok, report.to_dict()

    @pytest.mark.validation
    @pytest.mark.slow
    @pytest.mark.parametrize("j,state", [(j, s) for j, states in UNTRAPPED_STATES.items() for s in states])
    def test_untrapped_states_leave_the_origin(self, j, state):
        psi = named_state(j, state, 0.5)
        report = check_trapping_convergence(j, 0.5, psi, 10_000, 50, tolerances=Tolerances(trapping=1e-4))
        assert report.ok, report.to_dict()

    @pytest.mark.validation
    def test_j2_plateau_near_the_origin(self):
        model = trapping_model(2, 0.6, named_state(2, "lambda+", 0.6))
        values = [trapping_probability(model, x) for x in (0, 1, 2)]
        assert min(values) > 0.05
        assert max(values) / min(values) <= 1.5

    @pytest.mark.validation
    def test_j2_tail_is_not_exponential_for_generic_sides(self):
        basis = lambda_basis(2, 0.6)
        generic = trapping_model(2, 0.6, combination(basis, {"lambda0": 0.5, "lambda+": 0.7, "lambda-": 0.5}))
        pure = trapping_model(2, 0.6, combination(basis, {"lambda0": 1.0}))
        q = decay_base(0.6)
        for side in (1, -1):
            xs = [side * x for x in range(1, 6)]
            bent = [math.log(trapping_probability(generic, x)) - 2 * abs(x) * math.log(q) for x in xs]
            flat = [math.log(trapping_probability(pure, x)) - 2 * abs(x) * math.log(q) for x in xs]
            assert np.ptp(bent) > 1e-3
            assert np.ptp(flat) < 1e-10

    @pytest.mark.validation
    @pytest.mark.slow
    def test_lambda0_decays_by_q_squared(self):
        psi = named_state(2, "lambda0", 0.9)
        inner, outer = trapped_part(2, 0.9, psi, 4000, 200, [1, 2])
        assert outer / inner == pytest.approx(decay_base(0.9) ** 2, rel=0.01)

    @pytest.mark.validation
    @pytest.mark.slow
    def test_unequal_sides_trap_asymmetrically(self):
        psi = combination(lambda_basis(1, 0.5), {"lambda+": 0.8, "lambda-": 0.6})
        by_lambda = trapping_model(1, 0.5, psi, basis=LAMBDA)
        by_chi = trapping_model(1, 0.5, psi)
        for x in (1, 2, 3):
            assert trapping_probability(by_lambda, x) / trapping_probability(by_lambda, -x) == pytest.approx(0.64 / 0.36)
            assert trapping_probability(by_chi, x) == pytest.approx(trapping_probability(by_lambda, x), rel=1e-10)
        right, left = trapped_part(1, 0.5, psi, 2000, 50, [1, -1])
        assert right > left + 0.03
        report = check_trapping_convergence(1, 0.5, psi, 2000, 50)
        assert report.ok, report.to_dict()


class TestMomentConvergence:

    @pytest.mark.validation
    @pytest.mark.slow
    def test_spin_half_chi_minus(self):
        psi = figure_claim(1).coin_state()
        report = check_moment_convergence("1/2", 0.8, psi, [100, 200, 400])
        assert report.ok, report.to_dict()

    @pytest.mark.validation
    @pytest.mark.slow
    def test_balanced_spin_half_has_no_drift(self):
        psi = CoinStateVector(HalfInt(1), SUITABLE, np.array([1.0, 1.0]) / math.sqrt(2), 0.6)
        model = limit_density_model("1/2", 0.6, psi)
        assert exact_moment(model, 1) == pytest.approx(0.0, abs=1e-14)
        profile = position_distribution(evolve("1/2", 0.6, psi, 400))
        assert abs(empirical_moment(profile, 1)) <= 0.02

    @pytest.mark.validation
    @pytest.mark.slow
    @pytest.mark.parametrize("figure", [2, 6, 13])
    def test_figure_moments(self, figure):
        claim = figure_claim(figure)
        report = check_moment_convergence(claim.j, claim.rho, claim.coin_state(), [100, 200, 400])
        assert report.ok, report.to_dict()
