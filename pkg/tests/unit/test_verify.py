"""
Unit tests for verification reports and the cheaper checks.
"""
import math

import numpy as np
import pytest

from wignerwalk.bases import basis_state, suitable_basis
from wignerwalk.config import LITERAL_ORIENTATION, RunConfig, Tolerances
from wignerwalk.errors import ParameterRangeError, StateSpecError
from wignerwalk.evolution import ProbabilityProfile, evolve, position_distribution
from wignerwalk.halfint import HalfInt
from wignerwalk.limitlaw import cell_masses, eliminated_peaks, limit_density_model, sampled_limit, surviving_peaks
from wignerwalk.verify import (
    FIGURE_CLAIMS,
    RECIPE_RHO,
    SUITES,
    VerificationReport,
    audit_normalization,
    check_alpha_gauge,
    check_gamma_shift,
    check_recipe_peaks,
    compare_density,
    figure_claim,
    peak_report,
    peak_window_expectations,
    peak_window_masses,
    run_suite,
)

from tests.conftest import beta_of


def limit_profile(model, t):
    """A profile that puts exactly the limit-law cell mass on every occupied site."""
    positions = np.arange(-model.j.twice * t, model.j.twice * t + 1)
    empty = ProbabilityProfile(model.j, t, model.rho, positions, np.zeros(positions.size))
    occupied = empty.occupied_mask()
    x = positions[occupied]
    edges = np.concatenate([(x - 1.0) / t, [(x[-1] + 1.0) / t]])
    probabilities = np.zeros(positions.size)
    probabilities[occupied] = cell_masses(model, edges)
    return ProbabilityProfile(model.j, t, model.rho, positions, probabilities)


def nearest_occupied(profile, centre):
    candidates = profile.positions[profile.occupied_mask()]
    return int(candidates[np.argmin(np.abs(candidates - centre))])


class TestVerificationReport:

    @pytest.mark.unit
    def test_gated_and_informational_metrics(self):
        report = VerificationReport("demo", {"error": 0.01, "mass": 0.4}, {"error": 0.02})
        assert report.passed == {"error": True}
        assert report.ok
        rows = report.rows()
        assert ("demo", "mass", 0.4, None, None) in rows
        assert ("demo", "error", 0.01, 0.02, True) in rows

    @pytest.mark.unit
    def test_failure(self):
        report = VerificationReport("demo", {"error": 0.5}, {"error": 0.02})
        assert not report.ok
        assert report.to_dict()["passed"] == {"error": False}

    @pytest.mark.unit
    def test_boundary_passes(self):
        assert VerificationReport("demo", {"error": 0.02}, {"error": 0.02}).ok

    @pytest.mark.unit
    @pytest.mark.parametrize("value", [math.nan, math.inf])
    def test_non_finite_metric(self, value):
        with pytest.raises(ValueError):
            VerificationReport("demo", {"error": value})

    @pytest.mark.unit
    def test_tolerance_without_metric(self):
        with pytest.raises(ValueError):
            VerificationReport("demo", {"error": 0.0}, {"other": 1.0})

    @pytest.mark.unit
    def test_merge_orders_by_scenario(self):
        reports = [VerificationReport(name, {}) for name in ("b", "c", "a")]
        assert [r.scenario for r in VerificationReport.merge(reports)] == ["a", "b", "c"]


class TestGauge:

    @pytest.mark.unit
    @pytest.mark.parametrize("j", ["1/2", "1", "3/2", "2"])
    @pytest.mark.parametrize("sign", [-1, 1])
    def test_alpha_is_a_position_phase(self, j, sign, random_standard_state):
        spin = HalfInt.parse(j)
        report = check_alpha_gauge(spin, beta_of(0.6), 0.7, random_standard_state(spin), 40, sign)
        assert report.metrics["max_site_difference"] < 1e-12
        assert report.ok

    @pytest.mark.unit
    @pytest.mark.parametrize("j", ["1/2", "2"])
    def test_gamma_is_a_state_change(self, j, random_standard_state):
        spin = HalfInt.parse(j)
        report = check_gamma_shift(spin, beta_of(0.45), 1.1, random_standard_state(spin), 100)
        assert report.metrics["mean_gap"] < 1e-9
        assert report.metrics["second_moment_gap"] < 1e-9

    @pytest.mark.unit
    def test_time_limits(self, random_standard_state):
        psi = random_standard_state(HalfInt(2))
        with pytest.raises(ParameterRangeError):
            check_alpha_gauge(1, 1.0, 0.5, psi, 1001)
        with pytest.raises(ParameterRangeError):
            check_gamma_shift(1, 1.0, 0.5, psi, 10)


class TestNormalization:

    @pytest.mark.unit
    @pytest.mark.parametrize("figure", [1, 2, 6, 10, 15, 17])
    def test_figure_states_are_normalised(self, figure):
        claim = figure_claim(figure)
        report = audit_normalization(claim.j, claim.rho, claim.coin_state())
        assert report.ok
        assert report.metrics["continuous_mass"] + report.metrics["trapped_mass"] == pytest.approx(1.0, abs=1e-5)
        if not claim.j.is_integer:
            assert report.metrics["trapped_mass"] == pytest.approx(0.0, abs=1e-12)


class TestFigureClaims:

    @pytest.mark.unit
    def test_catalog(self):
        figures = [claim.figure for claim in FIGURE_CLAIMS]
        assert figures == list(range(1, 18))
        assert figure_claim(5).trapping and figure_claim(17).trapping
        assert figure_claim(3).scenario == "figure-03"

    @pytest.mark.unit
    def test_every_state_resolves(self):
        for claim in FIGURE_CLAIMS:
            psi = claim.coin_state()
            assert psi.j == claim.j

    @pytest.mark.unit
    def test_unknown_figure(self):
        with pytest.raises(StateSpecError):
            figure_claim(99)


class TestCompareDensity:

    @pytest.mark.unit
    def test_short_runs_are_rejected(self, chi_state):
        psi = chi_state(HalfInt(1), "chi+", 0.5)
        profile = position_distribution(evolve(HalfInt(1), 0.5, psi, 10))
        with pytest.raises(ParameterRangeError):
            compare_density(profile, limit_density_model(HalfInt(1), 0.5, psi))

    @pytest.mark.unit
    def test_spin_mismatch(self, chi_state):
        psi = chi_state(HalfInt(1), "chi+", 0.5)
        profile = position_distribution(evolve(HalfInt(1), 0.5, psi, 60))
        other = limit_density_model(HalfInt(2), 0.5, chi_state(HalfInt(2), "chi0", 0.5))
        with pytest.raises(ParameterRangeError):
            compare_density(profile, other)

    @pytest.mark.unit
    def test_metrics_and_gate(self, chi_state):
        j = HalfInt(1)
        psi = chi_state(j, "chi-", 0.6)
        profile = position_distribution(evolve(j, 0.6, psi, 120))
        report = compare_density(profile, limit_density_model(j, 0.6, psi), block=5, trapping_present=True)
        assert set(report.metrics) == {"l1_pointwise", "l1", "origin_mass", "l1_coarse"}
        assert set(report.tolerances) == {"l1_coarse"}
        assert report.metrics["l1_coarse"] <= report.metrics["l1"] + 1e-12

    @pytest.mark.unit
    def test_peak_windows(self, chi_state):
        j = HalfInt.parse("3/2")
        psi = chi_state(j, "chi1+", 0.5)
        profile = position_distribution(evolve(j, 0.5, psi, 80))
        masses = peak_window_masses(profile, 0.5, j, window=4)
        assert sorted(masses) == sorted((HalfInt(tw), side) for tw in (1, 3) for side in (-1, 1))
        assert all(0.0 <= value <= 1.0 for value in masses.values())


class TestSuites:

    @pytest.mark.unit
    def test_unknown_suite(self):
        with pytest.raises(StateSpecError):
            run_suite("nonsense", RunConfig(command="verify", j=HalfInt(2)))

    @pytest.mark.unit
    def test_normalization_suite(self):
        config = RunConfig(command="verify", j=HalfInt(2), workers=2)
        reports = run_suite("normalization", config)
        assert len(reports) == len(FIGURE_CLAIMS)
        assert [r.scenario for r in reports] == sorted(r.scenario for r in reports)
        assert all(r.ok for r in reports)

    @pytest.mark.unit
    def test_gauge_suite_in_mirror_orientation(self):
        config = RunConfig(command="verify", j=HalfInt(2), rho=0.5, displacement_sign=LITERAL_ORIENTATION,
                           tolerances=Tolerances(moment_gap=1e-9))
        reports = run_suite("gauge", config)
        assert len(reports) == 8
        assert all(r.ok for r in reports)

    @pytest.mark.unit
    def test_suite_names(self):
        assert set(SUITES) == {"figures", "gauge", "normalization", "trapping", "peaks"}


class TestPeakReport:

    @pytest.fixture
    def spin_half_model(self):
        claim = figure_claim(1)
        return limit_density_model(claim.j, claim.rho, claim.coin_state())

    @pytest.mark.unit
    def test_expectations_match_the_limit_profile(self, spin_half_model):
        profile = limit_profile(spin_half_model, 300)
        masses = peak_window_masses(profile, spin_half_model.rho, spin_half_model.j, 10)
        expected = peak_window_expectations(profile, spin_half_model, 10)
        assert set(masses) == set(expected)
        for key in masses:
            assert masses[key] == pytest.approx(expected[key], abs=1e-6)

    @pytest.mark.unit
    def test_limit_profile_passes(self, spin_half_model):
        report = peak_report(limit_profile(spin_half_model, 300), spin_half_model)
        assert set(report.tolerances) == {"eliminated_ratio", "surviving_shortfall"}
        assert report.tolerances["eliminated_ratio"] == Tolerances().peak_ratio
        assert report.metrics["eliminated_ratio"] < 1e-4
        assert report.ok

    @pytest.mark.unit
    def test_mass_at_an_eliminated_caustic_fails(self, spin_half_model):
        profile = limit_profile(spin_half_model, 300)
        (m, side), = eliminated_peaks(spin_half_model)
        site = nearest_occupied(profile, side * m.twice * spin_half_model.rho * 300)
        probabilities = profile.probabilities.copy()
        probabilities[site - int(profile.positions[0])] += 0.5
        spiked = ProbabilityProfile(profile.j, 300, profile.rho, profile.positions, probabilities)
        report = peak_report(spiked, spin_half_model)
        assert report.metrics["eliminated_ratio"] > Tolerances().peak_ratio
        assert not report.ok

    @pytest.mark.unit
    def test_missing_surviving_peak_fails(self, spin_half_model):
        profile = limit_profile(spin_half_model, 300)
        (m, side), = surviving_peaks(spin_half_model)
        centre = side * m.twice * spin_half_model.rho * 300
        probabilities = profile.probabilities.copy()
        probabilities[np.abs(profile.positions - centre) <= Tolerances().peak_window] = 0.0
        hollow = ProbabilityProfile(profile.j, 300, profile.rho, profile.positions, probabilities)
        report = peak_report(hollow, spin_half_model)
        assert report.metrics["surviving_shortfall"] == pytest.approx(1.0)
        assert not report.ok

    @pytest.mark.unit
    def test_no_surviving_peak_is_gated_on_the_total(self):
        claim = figure_claim(3)
        model = limit_density_model(claim.j, claim.rho, claim.coin_state())
        assert surviving_peaks(model) == []
        report = peak_report(limit_profile(model, 300), model)
        assert set(report.tolerances) == {"max_peak_fraction"}
        assert report.tolerances["max_peak_fraction"] == Tolerances().single_peak_fraction

    @pytest.mark.unit
    @pytest.mark.parametrize("figure", [c.figure for c in FIGURE_CLAIMS])
    def test_every_claim_is_gated(self, figure):
        claim = figure_claim(figure)
        model = limit_density_model(claim.j, claim.rho, claim.coin_state())
        report = peak_report(limit_profile(model, 100), model)
        assert report.tolerances
        if eliminated_peaks(model) and surviving_peaks(model):
            assert report.tolerances["eliminated_ratio"] == Tolerances().peak_ratio


class TestSampledPeaks:

    @pytest.mark.unit
    @pytest.mark.parametrize("figure", [c.figure for c in FIGURE_CLAIMS])
    def test_sampled_law_eliminates_the_closed_form_peaks(self, figure):
        claim = figure_claim(figure)
        psi = claim.coin_state()
        model = limit_density_model(claim.j, claim.rho, psi)
        law = sampled_limit(claim.j, claim.rho, psi)
        assert law.eliminated_peaks() == eliminated_peaks(model)
        assert law.surviving_peaks() == surviving_peaks(model)

    @pytest.mark.unit
    def test_sampled_law_scores_the_limit_profile(self):
        claim = figure_claim(1)
        psi = claim.coin_state()
        model = limit_density_model(claim.j, claim.rho, psi)
        report = peak_report(limit_profile(model, 300), sampled_limit(claim.j, claim.rho, psi))
        assert set(report.tolerances) == {"eliminated_ratio", "surviving_shortfall"}
        assert report.metrics["eliminated_ratio"] < 0.05
        assert report.ok

    @pytest.mark.unit
    def test_recipe_report(self):
        report = check_recipe_peaks("5/2", RECIPE_RHO, "chi1+", t=60)
        assert report.scenario == "peaks/recipe-2j5-chi1+"
        assert report.tolerances
        assert report.metrics["eliminated_peaks"] + len(
            sampled_limit("5/2", RECIPE_RHO, basis_state(suitable_basis("5/2", RECIPE_RHO), "chi1+")).surviving_peaks()
        ) == 6
