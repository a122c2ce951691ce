"""Sweep reports: CSV grids, full JSON record, edge and triangle views."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError

from eegres.core.evaluation import (
    ConfigResult,
    ConfigStatus,
    EdgePoint,
    SweepResult,
    edge_traversal,
    triangle_coordinates,
)
from eegres.errors import ReportError

logger = logging.getLogger(__name__)

SWEEP_CSV = "sweep.csv"
SWEEP_JSON = "sweep.json"
EDGE_CSV = "edge.csv"
TRIANGLE_CSV = "triangle.csv"
DIAGNOSTICS_DIR = "diagnostics"
CSV_FLOAT_FORMAT = "%.6f"


class ConfigRecord(BaseModel):
    """One configuration in sweep.json."""

    model_config = ConfigDict(extra="forbid")

    config: tuple[int, int, int]
    status: ConfigStatus
    mean_accuracy: float | None = None
    fold_accuracies: list[float] = []
    reason: str | None = None
    converged: bool = True


class SweepRecord(BaseModel):
    """Layout of sweep.json."""

    model_config = ConfigDict(extra="forbid")

    dataset: str
    budget: int
    seed: int
    k: int
    timestamp: str
    metadata: dict[str, Any] = {}
    summary: dict[str, Any] = {}
    results: list[ConfigRecord]


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    """One row per configuration; failed configurations have empty accuracies."""
    rows = []
    for r in result.results.values():
        row: dict[str, Any] = {
            "n_f_feat": r.triple[0],
            "n_t_feat": r.triple[1],
            "n_g_feat": r.triple[2],
            "mean_accuracy": r.mean_accuracy,
        }
        for fold in range(result.k):
            row[f"fold_{fold}"] = r.fold_accuracies[fold] if r.ok else None
        rows.append(row)
    columns = ["n_f_feat", "n_t_feat", "n_g_feat", "mean_accuracy"] + [
        f"fold_{fold}" for fold in range(result.k)
    ]
    return pd.DataFrame(rows, columns=columns)


def edge_frame(path: list[EdgePoint]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "path_position": [p.position for p in path],
            "config": [p.key for p in path],
            "accuracy": [p.accuracy for p in path],
        },
        columns=["path_position", "config", "accuracy"],
    )


def triangle_frame(result: SweepResult) -> pd.DataFrame:
    points = triangle_coordinates(result)
    return pd.DataFrame(
        {
            "n_f_feat": [p.triple[0] for p in points],
            "n_t_feat": [p.triple[1] for p in points],
            "n_g_feat": [p.triple[2] for p in points],
            "spectral_share": [p.spectral_share for p in points],
            "temporal_share": [p.temporal_share for p in points],
            "spatial_share": [p.spatial_share for p in points],
            "log_spatial_temporal_ratio": [
                p.log_spatial_temporal_ratio for p in points
            ],
            "mean_accuracy": [p.accuracy for p in points],
        }
    )


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep="")


def sweep_record(result: SweepResult) -> SweepRecord:
    return SweepRecord(
        dataset=result.dataset,
        budget=result.budget,
        seed=result.seed,
        k=result.k,
        timestamp=result.timestamp,
        metadata=result.metadata,
        summary=result.summary(),
        results=[
            ConfigRecord(
                config=r.triple,
                status=r.status,
                mean_accuracy=r.mean_accuracy,
                fold_accuracies=r.fold_accuracies,
                reason=r.reason,
                converged=r.converged,
            )
            for r in result.results.values()
        ],
    )


def write_edge_csv(result: SweepResult, path: Path) -> list[EdgePoint]:
    """Write the perimeter path of a result as CSV."""
    points = edge_traversal(result)
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        _write_csv(edge_frame(points), Path(path))
    except OSError as e:
        raise ReportError(f"Cannot write {path}: {e}") from e
    return points


def write_diagnostics(result: SweepResult, out_dir: Path) -> int:
    """Write per-fold graph records under diagnostics/<config>/fold_<k>.json."""
    written = 0
    try:
        for r in result.results.values():
            for record in r.diagnostics:
                folder = Path(out_dir) / DIAGNOSTICS_DIR / r.key
                folder.mkdir(parents=True, exist_ok=True)
                (folder / f"fold_{record['fold']}.json").write_text(
                    json.dumps(record, indent=2)
                )
                written += 1
    except OSError as e:
        raise ReportError(f"Cannot write diagnostics to {out_dir}: {e}") from e
    if written:
        logger.info(f"Wrote {written} fold diagnostic records to {out_dir}")
    return written


def export_report(result: SweepResult, out_dir: Path) -> None:
    """
    Write sweep.csv, sweep.json, edge.csv and triangle.csv into `out_dir`.

    CSV floats carry 6 fractional digits; sweep.json keeps full precision.

    Raises:
        ReportError: If the directory is not writable
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_csv(sweep_frame(result), out_dir / SWEEP_CSV)
        (out_dir / SWEEP_JSON).write_text(
            sweep_record(result).model_dump_json(indent=2)
        )
        _write_csv(triangle_frame(result), out_dir / TRIANGLE_CSV)
    except OSError as e:
        raise ReportError(f"Cannot write report to {out_dir}: {e}") from e
    write_edge_csv(result, out_dir / EDGE_CSV)
    write_diagnostics(result, out_dir)
    logger.info(f"Report written to {out_dir}")


def load_result(path: Path) -> SweepResult:
    """
    Read a sweep.json (or a directory holding one) back into a SweepResult.

    Raises:
        ReportError: If the file is missing or malformed
    """
    path = Path(path)
    if path.is_dir():
        path = path / SWEEP_JSON
    if not path.is_file():
        raise ReportError(f"Sweep result not found: {path}")
    try:
        record = SweepRecord.model_validate_json(path.read_text())
    except ValidationError as e:
        raise ReportError(f"Invalid sweep result {path}: {e}") from e

    results = {
        r.config: ConfigResult(
            triple=r.config,
            status=r.status,
            fold_accuracies=list(r.fold_accuracies),
            mean_accuracy=r.mean_accuracy,
            reason=r.reason,
            converged=r.converged,
        )
        for r in record.results
    }
    return SweepResult(
        dataset=record.dataset,
        budget=record.budget,
        seed=record.seed,
        k=record.k,
        results=results,
        timestamp=record.timestamp,
        metadata=record.metadata,
    )
