"""
Unit tests for CSV and JSON output.
"""
import csv
import io
import json

import numpy as np
import pytest

from wignerwalk.bases import suitable_basis
from wignerwalk.evolution import evolve, position_distribution
from wignerwalk.serialization import (
    SWEEP_COLUMNS,
    basis_to_json,
    density_to_csv,
    format_float,
    profile_to_csv,
    profile_to_json,
    reports_to_csv,
    reports_to_json,
    sweep_to_csv,
    sweep_to_json,
    trapping_to_csv,
    trapping_to_json,
    write_csv,
)
from wignerwalk.verify import VerificationReport


def parse_csv(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(body))))


@pytest.fixture
def profile(j_half):
    return position_distribution(evolve(j_half, 0.6, [1.0, 0.0], 3))


class TestFloats:

    @pytest.mark.unit
    @pytest.mark.parametrize("value", [0.1, 1 / 3, 2.0 ** -40, 123456.789])
    def test_seventeen_digits_are_exact(self, value):
        assert float(format_float(value)) == value


class TestCsv:

    @pytest.mark.unit
    def test_metadata_lines(self):
        text = write_csv({"j": "1", "flag": True, "missing": None}, ("a", "b"), [(1, 0.5)])
        lines = text.splitlines()
        assert lines[:3] == ["# j: 1", "# flag: true", "# missing: "]
        assert lines[3:] == ["a,b", "1,0.5"]

    @pytest.mark.unit
    def test_profile_keeps_occupied_sites(self, profile):
        rows = parse_csv(profile_to_csv(profile, {"t": 3}))
        assert rows[0] == ["x", "p"]
        assert [int(r[0]) for r in rows[1:]] == [-3, -1, 1, 3]
        assert sum(float(r[1]) for r in rows[1:]) == pytest.approx(1.0)

    @pytest.mark.unit
    def test_density_columns(self):
        rows = parse_csv(density_to_csv(np.array([0.0, 0.1]), np.array([1.0, 2.0]), {}))
        assert rows == [["v", "nu"], ["0", "1"], ["0.10000000000000001", "2"]]

    @pytest.mark.unit
    def test_trapping_with_and_without_simulation(self):
        rows = [(-2, 0.1), (0, 0.5), (2, 0.1)]
        assert parse_csv(trapping_to_csv(rows, {}))[0] == ["x", "p_inf"]
        with_sim = parse_csv(trapping_to_csv(rows, {}, [0.09, 0.52, 0.1]))
        assert with_sim[0] == ["x", "p_inf", "p_sim"]
        assert with_sim[2] == ["0", "0.5", "0.52000000000000002"]

    @pytest.mark.unit
    def test_sweep_blank_limit(self):
        rows = parse_csv(sweep_to_csv([(0.5, "chi0", 0.1, 0.2, 0.3, None)], {}))
        assert tuple(rows[0]) == SWEEP_COLUMNS
        assert rows[1][-1] == ""

    @pytest.mark.unit
    def test_report_table(self):
        report = VerificationReport("s", {"err": 0.1, "info": 2.0}, {"err": 0.5})
        rows = parse_csv(reports_to_csv([report]))
        assert rows[0] == ["scenario", "metric", "value", "tolerance", "passed"]
        assert ["s", "err", "0.10000000000000001", "0.5", "true"] in rows
        assert ["s", "info", "2", "", ""] in rows


class TestJson:

    @pytest.mark.unit
    def test_profile(self, profile):
        payload = json.loads(profile_to_json(profile, {"j": "1/2", "rho": np.float64(0.6)}))
        assert (payload["j"], payload["t"], payload["rho"]) == ("1/2", 3, 0.6)
        entries = {int(x): p for x, p in payload["entries"].items()}
        assert sorted(entries) == list(range(-3, 4))
        assert entries == profile.entries()
        assert entries[0] == 0.0
        assert sum(entries.values()) == pytest.approx(1.0)
        assert payload["meta"] == {"j": "1/2", "rho": 0.6}

    @pytest.mark.unit
    def test_sorted_keys_make_output_stable(self, profile):
        assert profile_to_json(profile, {"b": 1, "a": 2}) == profile_to_json(profile, {"a": 2, "b": 1})

    @pytest.mark.unit
    def test_trapping_and_sweep(self):
        payload = json.loads(trapping_to_json([(0, 0.5)], {}, [0.4]))
        assert payload["p_sim"] == [0.4]
        sweep = json.loads(sweep_to_json([(0.5, "chi0", 0.1, 0.2, 0.3, None)], {"t": 10}))
        assert sweep["rows"][0]["limit_mean"] is None
        assert sweep["rows"][0]["state"] == "chi0"

    @pytest.mark.unit
    def test_reports(self):
        good = VerificationReport("a", {"err": 0.1}, {"err": 0.5})
        bad = VerificationReport("b", {"err": 0.9}, {"err": 0.5})
        payload = json.loads(reports_to_json([good, bad], "demo"))
        assert payload["suite"] == "demo"
        assert payload["ok"] is False
        assert [r["scenario"] for r in payload["reports"]] == ["a", "b"]

    @pytest.mark.unit
    def test_basis(self):
        payload = json.loads(basis_to_json(suitable_basis(1, 0.5)))
        assert sorted(payload["vectors"]) == ["chi+", "chi-", "chi0"]
