"""
Text output for profiles, densities, trapped profiles, sweeps and reports.

CSV floats are written with 17 significant digits so a file round-trips to the
same doubles; metadata goes into leading '#' lines. JSON is written with
sorted keys, so equal inputs give byte-identical output.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from wignerwalk.bases import BasisSet
from wignerwalk.evolution import ProbabilityProfile


def format_float(value: float) -> str:
    return "%.17g" % float(value)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def write_csv(header: Mapping[str, Any], columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """'# key: value' metadata lines, a column line, then one line per row."""
    buffer = io.StringIO()
    for key, value in header.items():
        buffer.write(f"# {key}: {_cell(value)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def _json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def profile_to_csv(profile: ProbabilityProfile, header: Mapping[str, Any]) -> str:
    """x,p on the occupied sites."""
    mask = profile.occupied_mask()
    rows = zip((int(x) for x in profile.positions[mask]), (float(p) for p in profile.probabilities[mask]))
    return write_csv(header, ("x", "p"), rows)


def profile_to_json(profile: ProbabilityProfile, header: Mapping[str, Any]) -> str:
    """{j, t, rho, entries}; entries maps every site x in [-2jt, 2jt] to p(x, t)."""
    payload = {
        "j": str(profile.j),
        "t": profile.t,
        "rho": _jsonable(profile.rho),
        "entries": {str(x): p for x, p in profile.entries().items()},
        "meta": {key: _jsonable(value) for key, value in header.items()},
    }
    return _json(payload)


def density_to_csv(v: np.ndarray, nu: np.ndarray, header: Mapping[str, Any]) -> str:
    return write_csv(header, ("v", "nu"), zip((float(a) for a in v), (float(b) for b in nu)))


def density_to_json(v: np.ndarray, nu: np.ndarray, header: Mapping[str, Any]) -> str:
    meta = {k: _jsonable(x) for k, x in header.items()}
    return _json({"meta": meta, "v": [float(a) for a in v], "nu": [float(b) for b in nu]})


def trapping_to_csv(
    rows: Sequence[Tuple[int, float]], header: Mapping[str, Any], simulated: Optional[Sequence[float]] = None
) -> str:
    if simulated is None:
        return write_csv(header, ("x", "p_inf"), rows)
    return write_csv(header, ("x", "p_inf", "p_sim"), [(x, p, s) for (x, p), s in zip(rows, simulated)])


def trapping_to_json(
    rows: Sequence[Tuple[int, float]], header: Mapping[str, Any], simulated: Optional[Sequence[float]] = None
) -> str:
    payload: Dict[str, Any] = {
        "meta": {k: _jsonable(x) for k, x in header.items()},
        "x": [int(x) for x, _ in rows],
        "p_inf": [float(p) for _, p in rows],
    }
    if simulated is not None:
        payload["p_sim"] = [float(s) for s in simulated]
    return _json(payload)


def reports_to_json(reports: Sequence, suite: str) -> str:
    return _json(
        {
            "suite": suite,
            "ok": all(r.ok for r in reports),
            "reports": [r.to_dict() for r in reports],
        }
    )


def reports_to_csv(reports: Sequence) -> str:
    rows: List[Sequence[Any]] = [row for report in reports for row in report.rows()]
    return write_csv({}, ("scenario", "metric", "value", "tolerance", "passed"), rows)


SWEEP_COLUMNS = ("rho", "state", "mean", "second_moment", "p_origin", "limit_mean")


def sweep_to_csv(rows: Sequence[Sequence[Any]], header: Mapping[str, Any]) -> str:
    return write_csv(header, SWEEP_COLUMNS, rows)


def sweep_to_json(rows: Sequence[Sequence[Any]], header: Mapping[str, Any]) -> str:
    meta = {k: _jsonable(x) for k, x in header.items()}
    return _json({"meta": meta, "rows": [dict(zip(SWEEP_COLUMNS, map(_jsonable, r))) for r in rows]})


def basis_to_json(basis: BasisSet) -> str:
    return _json(basis.to_dict())


def _jsonable(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)
