"""
Checks of the finite-time walk against the asymptotic results.

Every check returns a VerificationReport: a scenario id, a set of finite
metrics and the tolerances some of them are gated by. Suites bundle checks,
run them on a thread pool and merge the reports by scenario id.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from wignerwalk.bases import basis_state, express, suitable_basis, suitable_labels
from wignerwalk.catalog import named_state
from wignerwalk.coin import wigner_coin_euler
from wignerwalk.config import ANALYTIC_ORIENTATION, RunConfig, Tolerances
from wignerwalk.errors import ParameterRangeError, StateSpecError
from wignerwalk.evolution import (
    ProbabilityProfile,
    empirical_moment,
    evolve,
    iterate_distributions,
    position_distribution,
)
from wignerwalk.halfint import HalfInt, HalfIntLike, require_spin
from wignerwalk.limitlaw import (
    LimitDensityModel,
    SampledLimit,
    cell_masses,
    density_moment,
    eliminated_peaks,
    limit_density_model,
    sampled_limit,
    surviving_peaks,
)
from wignerwalk.states import STANDARD, CoinStateVector
from wignerwalk.trapping import trapping_model, trapping_probability

logger = logging.getLogger(__name__)

MIN_DENSITY_T = 50
MAX_GAUGE_T = 1000
MIN_SHIFT_T = 100
TRAPPING_SITES = 5
SUITES = ("figures", "gauge", "normalization", "trapping", "peaks")


@dataclass(frozen=True)
class VerificationReport:
    """`passed[name]` holds iff metrics[name] <= tolerances[name]; ungated metrics are informational."""

    scenario: str
    metrics: Dict[str, float]
    tolerances: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, value in self.metrics.items():
            if not math.isfinite(value):
                raise ValueError(f"Metric {name!r} of {self.scenario} requires a finite value (got {value}).")
        unknown = set(self.tolerances) - set(self.metrics)
        if unknown:
            raise ValueError(f"Tolerances {sorted(unknown)} have no metric in {self.scenario}.")

    @property
    def passed(self) -> Dict[str, bool]:
        return {name: self.metrics[name] <= tol for name, tol in self.tolerances.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "metrics": dict(self.metrics),
            "tolerances": dict(self.tolerances),
            "passed": self.passed,
            "ok": self.ok,
        }

    def rows(self) -> List[Tuple[str, str, float, Optional[float], Optional[bool]]]:
        """(scenario, metric, value, tolerance, passed) for the summary table."""
        passed = self.passed
        return [
            (self.scenario, name, value, self.tolerances.get(name), passed.get(name))
            for name, value in self.metrics.items()
        ]

    @staticmethod
    def merge(reports: Iterable["VerificationReport"]) -> List["VerificationReport"]:
        return sorted(reports, key=lambda report: report.scenario)


def _block_sum(values: np.ndarray, block: int) -> np.ndarray:
    usable = (values.size // block) * block
    return values[:usable].reshape(-1, block).sum(axis=1)


def compare_density(
    profile: ProbabilityProfile,
    model: LimitDensityModel,
    exclusion_sites: int = 5,
    block: int = 1,
    trapping_present: bool = False,
    tolerances: Optional[Tolerances] = None,
    scenario: str = "density",
) -> VerificationReport:
    """
    L1 distance between p(x, t) on the occupied sites and the limit density.
    `l1_pointwise` uses (2/t) nu(x/t); `l1` integrates nu over each site's
    cell [x-1, x+1]/t; `l1_coarse` compares block sums of `block` sites.
    """
    tolerances = tolerances or Tolerances()
    t = profile.t
    if t < MIN_DENSITY_T:
        raise ParameterRangeError(f"compare_density requires t >= {MIN_DENSITY_T} (got {t}).")
    if profile.j != model.j:
        raise ParameterRangeError(f"compare_density requires matching spins (got {profile.j} and {model.j}).")
    if block < 1:
        raise ParameterRangeError(f"compare_density requires block >= 1 (got {block}).")
    occupied = profile.occupied_mask()
    stray = float(np.sum(profile.probabilities[~occupied]))
    if stray > 1e-12:
        raise ParameterRangeError(f"Profile parity requires no mass off the j={profile.j} sublattice (got {stray:.3g}).")

    x = profile.positions[occupied]
    p = profile.probabilities[occupied]
    keep = np.ones(x.shape, dtype=bool)
    for caustic in model.caustics():
        keep &= np.abs(x - caustic * t) > exclusion_sites
    near_origin = np.abs(x) <= exclusion_sites
    if trapping_present:
        keep &= ~near_origin

    pointwise = 2.0 / t * model(x / t)
    edges = np.concatenate([(x - 1.0) / t, [(x[-1] + 1.0) / t]])
    cells = cell_masses(model, edges)
    metrics = {
        "l1_pointwise": float(np.sum(np.abs(p - pointwise)[keep])),
        "l1": float(np.sum(np.abs(p - cells)[keep])),
        "origin_mass": float(np.sum(p[near_origin])),
    }
    if block > 1:
        block_keep = _block_sum((~keep).astype(np.float64), block) == 0
        gap = np.abs(_block_sum(p, block) - _block_sum(cells, block))
        metrics["l1_coarse"] = float(np.sum(gap[block_keep]))
    else:
        metrics["l1_coarse"] = metrics["l1"]
    logger.debug("compare_density %s t=%d l1=%.4g coarse=%.4g", scenario, t, metrics["l1"], metrics["l1_coarse"])
    return VerificationReport(scenario, metrics, {"l1_coarse": tolerances.density_l1})


def check_alpha_gauge(
    j: HalfIntLike,
    beta: float,
    alpha: float,
    psi: CoinStateVector,
    t: int,
    displacement_sign: int = ANALYTIC_ORIENTATION,
    tolerances: Optional[Tolerances] = None,
) -> VerificationReport:
    """max_x |Psi^alpha(x, t) - e^{-i sign alpha x / 2} Psi^0(x, t)|."""
    spin = require_spin(j)
    tolerances = tolerances or Tolerances()
    if not 0 <= t <= MAX_GAUGE_T:
        raise ParameterRangeError(f"check_alpha_gauge requires 0 <= t <= {MAX_GAUGE_T} (got {t}).")
    gauged = evolve(spin, wigner_coin_euler(spin, alpha, beta, 0.0), psi, t, displacement_sign)
    plain = evolve(spin, wigner_coin_euler(spin, 0.0, beta, 0.0), psi, t, displacement_sign)
    phase = np.exp(-1j * displacement_sign * alpha * plain.positions / 2.0)
    defect = float(np.max(np.abs(gauged.amplitudes - phase[:, None] * plain.amplitudes)))
    return VerificationReport(
        f"gauge/alpha-j{spin}",
        {"max_site_difference": defect},
        {"max_site_difference": tolerances.gauge},
    )


def check_gamma_shift(
    j: HalfIntLike,
    beta: float,
    gamma: float,
    psi: CoinStateVector,
    t: int,
    displacement_sign: int = ANALYTIC_ORIENTATION,
    tolerances: Optional[Tolerances] = None,
) -> VerificationReport:
    """
    A gamma coin phase is absorbed by the state change q_m -> q_m e^{i m gamma}:
    both walks give the same p(x, t). The first two moments are compared.
    """
    spin = require_spin(j)
    tolerances = tolerances or Tolerances()
    if t < MIN_SHIFT_T:
        raise ParameterRangeError(f"check_gamma_shift requires t >= {MIN_SHIFT_T} (got {t}).")
    q = express(psi, STANDARD).amps
    m_values = np.array([m.value for m in HalfInt.indices(spin)])
    shifted = CoinStateVector.standard(spin, q * np.exp(1j * gamma * m_values))
    with_gamma = position_distribution(evolve(spin, wigner_coin_euler(spin, 0.0, beta, gamma), shifted, t, displacement_sign))
    plain = position_distribution(evolve(spin, wigner_coin_euler(spin, 0.0, beta, 0.0), q, t, displacement_sign))
    metrics = {
        "mean_gap": abs(empirical_moment(with_gamma, 1) - empirical_moment(plain, 1)),
        "second_moment_gap": abs(empirical_moment(with_gamma, 2) - empirical_moment(plain, 2)),
    }
    return VerificationReport(
        f"gauge/gamma-j{spin}",
        metrics,
        {name: tolerances.moment_gap for name in metrics},
    )


def audit_normalization(
    j: HalfIntLike, rho: float, psi: CoinStateVector, tolerances: Optional[Tolerances] = None, scenario: str = ""
) -> VerificationReport:
    """|int nu + trapped - 1|; the trapped mass is zero for half-integer j."""
    spin = require_spin(j)
    tolerances = tolerances or Tolerances()
    model = limit_density_model(spin, rho, psi)
    continuous = density_moment(model, 0)
    total = density_moment(model, 0, include_trapped=True)
    metrics = {
        "normalization_defect": abs(total - 1.0),
        "continuous_mass": continuous,
        "trapped_mass": total - continuous,
    }
    return VerificationReport(
        scenario or f"normalization/j{spin}",
        metrics,
        {"normalization_defect": tolerances.normalization},
    )


def peak_window_masses(
    profile: ProbabilityProfile, rho: float, j: HalfIntLike, window: int = 10
) -> Dict[Tuple[HalfInt, int], float]:
    """Probability within `window` sites of each caustic +-2m rho t."""
    spin = require_spin(j)
    out = {}
    for m in HalfInt.indices(spin):
        if m.twice <= 0:
            continue
        for side in (-1, 1):
            centre = side * m.twice * rho * profile.t
            mask = np.abs(profile.positions - centre) <= window
            out[(m, side)] = float(np.sum(profile.probabilities[mask]))
    return out


LimitLaw = Union[LimitDensityModel, SampledLimit]


def _law_mass(model: LimitLaw, low: float, high: float) -> float:
    if isinstance(model, SampledLimit):
        return model.window_mass(low, high)
    return float(cell_masses(model, np.array([low, high]))[0])


def _peak_sets(model: LimitLaw) -> Tuple[List[Tuple[HalfInt, int]], List[Tuple[HalfInt, int]]]:
    if isinstance(model, SampledLimit):
        return model.eliminated_peaks(), model.surviving_peaks()
    return eliminated_peaks(model), surviving_peaks(model)


def peak_window_expectations(
    profile: ProbabilityProfile, model: LimitLaw, window: int = 10
) -> Dict[Tuple[HalfInt, int], float]:
    """
    Limit-law mass of the same windows: nu integrated over the cells
    [x-1, x+1]/t of the occupied sites inside each window.
    """
    occupied = profile.occupied_mask()
    t = profile.t
    out = {}
    for m in (index for index in HalfInt.indices(model.j) if index.twice > 0):
        for side in (-1, 1):
            centre = side * m.twice * model.rho * t
            sites = profile.positions[occupied & (np.abs(profile.positions - centre) <= window)]
            if sites.size == 0:
                out[(m, side)] = 0.0
                continue
            out[(m, side)] = _law_mass(model, (sites.min() - 1.0) / t, (sites.max() + 1.0) / t)
    return out


@dataclass(frozen=True)
class FigureClaim:
    """One reference configuration; its peak claims follow from the limit law."""

    figure: int
    j: HalfInt
    state: str
    rho: float
    trapping: bool = False
    h1p: complex = 1.0
    h1m: complex = 0.0

    @property
    def scenario(self) -> str:
        return f"figure-{self.figure:02d}"

    def coin_state(self) -> CoinStateVector:
        return named_state(self.j, self.state, self.rho, h1p=self.h1p, h1m=self.h1m)


def _claim(figure: int, j: str, state: str, rho: float, **kwargs) -> FigureClaim:
    return FigureClaim(figure, HalfInt.parse(j), state, rho, **kwargs)


FIGURE_CLAIMS: Tuple[FigureClaim, ...] = (
    _claim(1, "1/2", "chi-", 0.8),
    _claim(2, "1", "chi0", 0.5),
    _claim(3, "1", "chi+", 0.8),
    _claim(4, "1", "chi-", 0.6),
    _claim(5, "1", "lambda-", 0.5, trapping=True),
    _claim(6, "3/2", "chi1+", 0.8),
    _claim(7, "3/2", "chi2+", 0.5),
    _claim(8, "3/2", "inner_free", 0.6, h1p=0.0, h1m=1.0),
    _claim(9, "3/2", "outer_free", 0.8, h1p=1.0, h1m=0.0),
    _claim(10, "2", "chi0", 0.4),
    _claim(11, "2", "chi1+", 0.6),
    _claim(12, "2", "chi1-", 0.3),
    _claim(13, "2", "chi2+", 0.8),
    _claim(14, "2", "chi2-", 0.5),
    _claim(15, "2", "j2_single_peak", 0.5),
    _claim(16, "2", "j2_no_slower", 0.7),
    _claim(17, "2", "lambda+", 0.6, trapping=True),
)


def figure_claim(figure: int) -> FigureClaim:
    for claim in FIGURE_CLAIMS:
        if claim.figure == figure:
            return claim
    raise StateSpecError(f"No reference configuration numbered {figure}.")


def peak_report(
    profile: ProbabilityProfile,
    model: LimitLaw,
    tolerances: Optional[Tolerances] = None,
    scenario: str = "peaks",
) -> VerificationReport:
    """
    Caustic windows of a simulated profile against the peak structure of nu.

    An eliminated window may only hold what the smooth part of nu puts there:
    its excess |mass - expectation| is gated against the largest surviving
    window (`eliminated_ratio`), or against the total when no peak survives
    (`max_peak_fraction`). Each surviving window must carry a real peak:
    `surviving_shortfall` is the largest deficit against its expectation,
    relative to that expectation or to a tenth of the biggest one.
    """
    tolerances = tolerances or Tolerances()
    window = tolerances.peak_window
    masses = peak_window_masses(profile, model.rho, model.j, window)
    expected = peak_window_expectations(profile, model, window)
    gone, kept = _peak_sets(model)
    excess = max((abs(masses[key] - expected[key]) for key in gone), default=0.0)
    metrics = {
        "eliminated_peaks": float(len(gone)),
        "max_eliminated_excess": excess,
        "max_peak_fraction": max(masses.values()) / profile.total,
    }
    gates: Dict[str, float] = {}
    if kept:
        largest = max(masses[key] for key in kept)
        # peaks far below the largest one are judged on the largest one's scale
        floor = tolerances.peak_ratio * max(expected[key] for key in kept)
        shortfall = max(max(0.0, expected[key] - masses[key]) / max(expected[key], floor) for key in kept)
        metrics["max_surviving_mass"] = largest
        metrics["surviving_shortfall"] = shortfall
        gates["surviving_shortfall"] = tolerances.peak_shortfall
        if gone:
            metrics["eliminated_ratio"] = excess / largest
            gates["eliminated_ratio"] = tolerances.peak_ratio
    else:
        gates["max_peak_fraction"] = tolerances.single_peak_fraction
    logger.debug("peaks %s: gone=%d kept=%d excess=%.4g", scenario, len(gone), len(kept), excess)
    return VerificationReport(scenario, metrics, gates)


def check_peak_claims(
    claim: FigureClaim, t: int = 300, tolerances: Optional[Tolerances] = None
) -> VerificationReport:
    """Peak structure of one reference configuration at time t."""
    psi = claim.coin_state()
    model = limit_density_model(claim.j, claim.rho, psi)
    profile = position_distribution(evolve(claim.j, claim.rho, psi, t))
    return peak_report(profile, model, tolerances, f"peaks/{claim.scenario}")


RECIPE_SPINS = ("5/2", "3")
RECIPE_RHO = 0.6


def check_recipe_peaks(
    j: HalfIntLike, rho: float, label: str, t: int = 300, tolerances: Optional[Tolerances] = None
) -> VerificationReport:
    """
    Peak structure of one suitable-basis vector for spins without closed-form
    weights; the eliminated caustics come from the sampled limit law.
    """
    spin = require_spin(j)
    psi = basis_state(suitable_basis(spin, rho), label)
    law = sampled_limit(spin, rho, psi)
    profile = position_distribution(evolve(spin, rho, psi, t))
    return peak_report(profile, law, tolerances, f"peaks/recipe-2j{spin.twice}-{label}")


def check_trapping_convergence(
    j: HalfIntLike,
    rho: float,
    psi: CoinStateVector,
    t: int,
    window: int,
    tolerances: Optional[Tolerances] = None,
    scenario: str = "",
) -> VerificationReport:
    """
    Time-averaged p(2x) near the origin against the trapped profile, x in [-5, 5].
    The spreading part still leaves about (2/t) nu(2x/t) per site; it is
    subtracted before the comparison.
    """
    spin = require_spin(j)
    tolerances = tolerances or Tolerances()
    if window < 1 or t - 2 * (window - 1) < 0:
        raise ParameterRangeError(f"check_trapping_convergence requires 1 <= window <= t/2 + 1 (got t={t}, window={window}).")
    model = trapping_model(spin, rho, psi)
    sites = np.arange(-TRAPPING_SITES, TRAPPING_SITES + 1)
    expected = np.array([trapping_probability(model, int(x)) for x in sites])
    times = {t - 2 * k for k in range(window)}
    samples = []
    for profile in iterate_distributions(spin, rho, psi, t, times=times):
        samples.append([profile.probability_at(2 * int(x)) for x in sites])
    samples = np.array(samples)
    averaged = samples.mean(axis=0)
    density = limit_density_model(spin, rho, psi)
    background = 2.0 / t * density(2.0 * sites / t)
    metrics = {
        "max_abs_error": float(np.max(np.abs(averaged - background - expected))),
        "max_background": float(np.max(background)),
        "oscillation": float(np.max(samples.max(axis=0) - samples.min(axis=0))),
        "window_mass": float(np.sum(averaged)),
    }
    return VerificationReport(
        scenario or f"trapping/j{spin}",
        metrics,
        {"max_abs_error": tolerances.trapping},
    )


def check_moment_convergence(
    j: HalfIntLike,
    rho: float,
    psi: CoinStateVector,
    times: Sequence[int],
    tolerances: Optional[Tolerances] = None,
    scenario: str = "",
) -> VerificationReport:
    """Empirical moments of x/t against the limit; fits gap ~ c / sqrt(t)."""
    spin = require_spin(j)
    tolerances = tolerances or Tolerances()
    times = sorted(set(int(t) for t in times))
    if not times or times[0] < 1:
        raise ParameterRangeError(f"check_moment_convergence requires times >= 1 (got {times}).")
    model = limit_density_model(spin, rho, psi)
    limits = {n: density_moment(model, n) for n in (1, 2)}
    gaps = {1: [], 2: []}
    for profile in iterate_distributions(spin, rho, psi, times[-1], times=times):
        for n in (1, 2):
            gaps[n].append(abs(empirical_moment(profile, n) - limits[n]))
    root_t = np.sqrt(np.array(times, dtype=np.float64))
    metrics: Dict[str, float] = {}
    for n, label in ((1, "mean"), (2, "second_moment")):
        series = np.array(gaps[n])
        metrics[f"{label}_gap"] = float(series[-1])
        # least squares for gap = c / sqrt(t)
        metrics[f"{label}_fit_c"] = float(np.sum(series / root_t) / np.sum(1.0 / root_t**2))
    return VerificationReport(
        scenario or f"moments/j{spin}",
        metrics,
        {"mean_gap": tolerances.moment_gap, "second_moment_gap": tolerances.moment_gap},
    )


def _figure_density(claim: FigureClaim, t: int, tolerances: Tolerances) -> VerificationReport:
    psi = claim.coin_state()
    model = limit_density_model(claim.j, claim.rho, psi)
    profile = position_distribution(evolve(claim.j, claim.rho, psi, t))
    return compare_density(
        profile,
        model,
        exclusion_sites=tolerances.exclusion_sites,
        block=5,
        trapping_present=claim.j.is_integer,
        tolerances=tolerances,
        scenario=f"figures/{claim.scenario}",
    )


def _gauge_scenarios(config: RunConfig) -> List[Tuple[str, Callable[[], VerificationReport]]]:
    rho = config.rho if config.rho is not None and 0 < config.rho < 1 else 0.6
    beta = 2 * math.acos(rho)
    t = max(config.t, MIN_SHIFT_T)
    out = []
    for text in ("1/2", "1", "3/2", "2"):
        spin = HalfInt.parse(text)
        psi = CoinStateVector.normalized(spin, STANDARD, np.arange(1, spin.dimension + 1) * np.exp(0.4j * np.arange(spin.dimension)))[0]
        out.append((f"gauge/alpha-j{spin}", lambda s=spin, p=psi: check_alpha_gauge(s, beta, 0.7, p, min(t, MAX_GAUGE_T), config.displacement_sign, config.tolerances)))
        out.append((f"gauge/gamma-j{spin}", lambda s=spin, p=psi: check_gamma_shift(s, beta, 1.1, p, t, config.displacement_sign, config.tolerances)))
    return out


def _scenarios(name: str, config: RunConfig) -> List[Tuple[str, Callable[[], VerificationReport]]]:
    tol = config.tolerances
    t = max(config.t, MIN_DENSITY_T)
    if name == "figures":
        return [(c.scenario, lambda c=c: _figure_density(c, t, tol)) for c in FIGURE_CLAIMS]
    if name == "gauge":
        return _gauge_scenarios(config)
    if name == "normalization":
        return [
            (c.scenario, lambda c=c: audit_normalization(c.j, c.rho, c.coin_state(), tol, f"normalization/{c.scenario}"))
            for c in FIGURE_CLAIMS
        ]
    if name == "trapping":
        chosen = [c for c in FIGURE_CLAIMS if c.figure in (2, 5, 10, 17)]
        return [
            (c.scenario, lambda c=c: check_trapping_convergence(c.j, c.rho, c.coin_state(), 2000, 50, tol, f"trapping/{c.scenario}"))
            for c in chosen
        ]
    if name == "peaks":
        jobs = [(c.scenario, lambda c=c: check_peak_claims(c, 300, tol)) for c in FIGURE_CLAIMS]
        for spin in map(HalfInt.parse, RECIPE_SPINS):
            jobs += [
                (f"recipe-2j{spin.twice}-{label}", lambda s=spin, l=label: check_recipe_peaks(s, RECIPE_RHO, l, 300, tol))
                for label in suitable_labels(spin)
            ]
        return jobs
    raise StateSpecError(f"Unknown suite {name!r}; known {SUITES + ('all',)}.")


def run_suite(name: str, config: RunConfig) -> List[VerificationReport]:
    """Run one suite (or `all`) with config.workers threads; reports come back ordered by scenario."""
    names = SUITES if name == "all" else (name,)
    jobs = [job for suite in names for job in _scenarios(suite, config)]
    logger.debug("suite %s: %d scenarios on %d workers", name, len(jobs), config.workers)
    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        futures = [pool.submit(job) for _, job in jobs]
        reports = [future.result() for future in futures]
    merged = VerificationReport.merge(reports)
    logger.info("suite %s finished: %d/%d scenarios ok", name, sum(r.ok for r in merged), len(merged))
    return merged
