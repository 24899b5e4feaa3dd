"""
End-to-end flows through the library: named state, walk, asymptotics, output.
"""
import json

import numpy as np
import pytest
from scipy.integrate import trapezoid

from cli.density import density
from cli.simulate import simulate
from cli.sweep import sweep
from cli.trapping import trapping
from wignerwalk.catalog import named_state
from wignerwalk.config import LITERAL_ORIENTATION, RunConfig
from wignerwalk.evolution import evolve, position_distribution, time_averaged_distribution
from wignerwalk.halfint import HalfInt
from wignerwalk.limitlaw import cell_masses, limit_density_model
from wignerwalk.trapping import trapping_model, trapping_probability


class TestRenderedRuns:

    @pytest.mark.integration
    def test_simulate_matches_library(self):
        config = RunConfig(command="simulate", j=HalfInt(3), rho=0.7, state="chi1-", t=40, fmt="json")
        payload = json.loads(simulate(config))
        psi = named_state(HalfInt(3), "chi1-", 0.7)
        profile = position_distribution(evolve(HalfInt(3), 0.7, psi, 40))
        entries = {int(x): p for x, p in payload["entries"].items()}
        assert entries == pytest.approx(profile.entries(), abs=1e-15)

    @pytest.mark.integration
    def test_density_integrates_like_cells(self):
        config = RunConfig(command="density", j=HalfInt(2), rho=0.5, state="chi1+", fmt="json")
        payload = json.loads(density(config, 2001))
        v, nu = np.array(payload["v"]), np.array(payload["nu"])
        model = limit_density_model(HalfInt(2), 0.5, named_state(HalfInt(2), "chi1+", 0.5))
        inner = (v > -0.9) & (v < -0.6)
        exact = cell_masses(model, [v[inner][0], v[inner][-1]])[0]
        assert trapezoid(nu[inner], v[inner]) == pytest.approx(exact, rel=0.02)

    @pytest.mark.integration
    def test_trapping_literal_is_mirrored(self):
        base = RunConfig(command="trapping", j=HalfInt(2), rho=0.5, state="lambda+", fmt="json")
        analytic = json.loads(trapping(base, 3))
        literal = json.loads(trapping(base.with_overrides(displacement_sign=LITERAL_ORIENTATION), 3))
        assert literal["x"] == [-x for x in analytic["x"][::-1]]
        assert literal["p_inf"] == analytic["p_inf"][::-1]

    @pytest.mark.integration
    def test_sweep_is_independent_of_worker_count(self):
        config = RunConfig(command="sweep", j=HalfInt(2), t=30)
        serial = sweep(config.with_overrides(workers=1), [0.3, 0.6], ["chi0", "lambda0"])
        threaded = sweep(config.with_overrides(workers=4), [0.3, 0.6], ["chi0", "lambda0"])
        assert serial == threaded


class TestAsymptotics:

    @pytest.mark.integration
    def test_time_average_approaches_trapped_profile(self):
        j, rho = HalfInt(2), 0.5
        psi = named_state(j, "lambda+", rho)
        model = trapping_model(j, rho, psi)
        averaged = time_averaged_distribution(j, rho, psi, 400, 20)
        for x in (1, 2, 3):
            assert averaged.probability_at(2 * x) == pytest.approx(trapping_probability(model, x), abs=0.02)
        assert averaged.probability_at(-2) < averaged.probability_at(2)

    @pytest.mark.integration
    def test_literal_walk_uses_mirrored_density(self):
        j, rho = HalfInt(1), 0.6
        psi = named_state(j, "chi+", rho)
        config = RunConfig(command="density", j=j, rho=rho, state="chi+", displacement_sign=LITERAL_ORIENTATION)
        rows = [line.split(",") for line in density(config, 11).splitlines() if line and line[0] not in "#v"]
        model = limit_density_model(j, rho, psi)
        for v, nu in rows:
            assert float(nu) == pytest.approx(float(model(-float(v))), rel=1e-12)
