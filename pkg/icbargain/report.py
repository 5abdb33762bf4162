"""
Run reports and table output.

Every CLI command leaves a report.json in its output directory that echoes
the linear inputs, lists the outcome records and the files written, and
holds the exit status. Rates are stored in JSON as full-precision decimal
strings (float repr) and in CSV at 6 decimals.
"""

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from icbargain.bargaining import IncentiveResult, SpePair
from icbargain.coordination import CoordinationOutcome, SchemeComparison, SweepRow
from icbargain.rate_region import PowerSplit, RatePair

REPORT_VERSION = "1"
RATE_DECIMALS = 6


@dataclass
class InputEcho:
    """Inputs of a run after dB conversion."""
    command: str = ""
    scheme: str = ""
    a: float | None = None
    b: float | None = None
    snr1_db: float | None = None
    snr2_db: float | None = None
    P1: float | None = None
    P2: float | None = None
    p1: float | None = None
    p2: float | None = None
    first_mover: str = ""
    solution: str = ""


@dataclass
class RunReport:
    """Everything a run produced."""
    version: str = REPORT_VERSION
    inputs: InputEcho = field(default_factory=InputEcho)
    outcomes: list[dict[str, Any]] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)
    exit_status: int = 0
    error: str = ""


def fmt_rate(value: float) -> str:
    """Rate at CSV precision."""
    return f"{value:.{RATE_DECIMALS}f}"


def exact(value: float) -> str:
    """Full-precision decimal string; float(exact(x)) == x."""
    return repr(float(value))


def rate_record(point: RatePair | None) -> dict[str, str] | None:
    if point is None:
        return None
    return {"r1": exact(point.r1), "r2": exact(point.r2)}


def parse_rate(record: dict[str, str] | None) -> RatePair | None:
    """Inverse of rate_record."""
    if record is None:
        return None
    return RatePair(float(record["r1"]), float(record["r2"]))


def split_record(split: PowerSplit | None) -> dict[str, str] | None:
    if split is None:
        return None
    return {"alpha": exact(split.alpha), "beta": exact(split.beta)}


def phase1_record(result: IncentiveResult) -> dict[str, Any]:
    return {
        "proceed": result.proceed,
        "scheme": str(result.scheme),
        "reason": result.reason,
        "split": split_record(result.split),
        "rho_interval": [exact(r) for r in result.rho_interval] if result.rho_interval else None,
    }


def spe_record(pair: SpePair | None) -> dict[str, Any] | None:
    if pair is None:
        return None
    return {
        "r_bar": rate_record(pair.r_bar),
        "r_tilde": rate_record(pair.r_tilde),
        "first_mover": str(pair.first_mover),
        "outcome": rate_record(pair.outcome),
    }


def outcome_record(outcome: CoordinationOutcome) -> dict[str, Any]:
    """JSON record of one negotiation."""
    return {
        "scheme": str(outcome.scenario.scheme),
        "status": str(outcome.status),
        "phase1": phase1_record(outcome.phase1),
        "regular": outcome.regular,
        "disagreement": rate_record(outcome.disagreement),
        "operating_point": rate_record(outcome.operating_point),
        "spe": spe_record(outcome.spe),
        "nbs": rate_record(outcome.nbs),
        "refusal": outcome.refusal,
        "tdm_share": exact(outcome.tdm_share) if outcome.tdm_share is not None else None,
    }


def sweep_record(row: SweepRow) -> dict[str, Any]:
    return {
        "p1": exact(row.p1),
        "p2": exact(row.p2),
        "regular": row.regular,
        "r_bar": rate_record(row.r_bar),
        "r_tilde": rate_record(row.r_tilde),
        "nbs": rate_record(row.nbs),
        "nbs_distance": exact(row.nbs_distance) if row.nbs_distance is not None else None,
        "error": row.error,
    }


def comparison_record(comparison: SchemeComparison) -> dict[str, Any]:
    return {
        "verdict": str(comparison.verdict),
        "preferences": {str(player): str(pref) for player, pref in comparison.preferences.items()},
        "hk": outcome_record(comparison.hk),
        "tdm": outcome_record(comparison.tdm),
    }


def write_csv(path: Path, header: list[str], rows: list[list[Any]]) -> Path:
    """
    Write a CSV table with one header row.

    Floats are written at RATE_DECIMALS; None becomes an empty cell.
    """
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                "" if cell is None else fmt_rate(cell) if isinstance(cell, float) else cell
                for cell in row
            ])
    return path


def write_json(path: Path, data: Any) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
    return path


def report_path(out_dir: Path) -> Path:
    """Get the report file path for an output directory."""
    return out_dir / "report.json"


def save_report(out_dir: Path, report: RunReport) -> Path:
    """
    Save a run report.

    Args:
        out_dir: Output directory for report.json
        report: RunReport to save

    Returns:
        Path of the written report
    """
    data = {
        "version": report.version,
        "inputs": asdict(report.inputs),
        "outcomes": report.outcomes,
        "artifacts": report.artifacts,
        "exit_status": report.exit_status,
        "error": report.error,
    }
    return write_json(report_path(out_dir), data)


def load_report(out_dir: Path) -> RunReport | None:
    """
    Load a run report.

    Args:
        out_dir: Output directory containing report.json

    Returns:
        RunReport if the file exists, None otherwise
    """
    path = report_path(out_dir)
    if not path.exists():
        return None

    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)

    report = RunReport(
        version=data.get("version", REPORT_VERSION),
        outcomes=data.get("outcomes", []),
        artifacts=data.get("artifacts", []),
        exit_status=data.get("exit_status", 0),
        error=data.get("error", ""),
    )

    # Parse inputs
    if "inputs" in data:
        for key, value in data["inputs"].items():
            if hasattr(report.inputs, key):
                setattr(report.inputs, key, value)

    return report
