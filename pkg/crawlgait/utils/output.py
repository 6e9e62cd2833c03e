"""
Artifact writers for crawlgait

trajectory.csv (t, v, x, stick), report.json and plot.manifest.json.
Plots are described, not rendered.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from crawlgait.core.solver import Trajectory


TRAJECTORY_FILE = "trajectory.csv"
REPORT_FILE = "report.json"
MANIFEST_FILE = "plot.manifest.json"
TRAJECTORY_COLUMNS = ("t", "v", "x", "stick")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_trajectory_csv(path: Path, trajectory: Trajectory) -> Path:
    """One row per sample; stick lists the sticking contacts joined by ';'"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stick = trajectory.stick_flags
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(TRAJECTORY_COLUMNS)
        for i in range(len(trajectory)):
            writer.writerow([
                _fmt(trajectory.times[i]),
                _fmt(trajectory.velocities[i]),
                _fmt(trajectory.displacement[i]),
                ";".join(str(k) for k in stick[i]),
            ])
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_json(path: Path, data: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(data), indent=2) + "\n", encoding="utf-8")
    return path


def _range(values: np.ndarray) -> List[float]:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return [0.0, 0.0]
    return [float(np.min(values)), float(np.max(values))]


def trajectory_plot(trajectory: Trajectory, file: str = TRAJECTORY_FILE) -> List[Dict[str, Any]]:
    """Velocity and displacement panels over the trajectory's time range"""
    x_range = _range(trajectory.times)
    return [
        {"file": file, "title": "barycentre velocity", "x": "t", "y": ["v"],
         "x_range": x_range, "y_range": _range(trajectory.velocities)},
        {"file": file, "title": "barycentre displacement", "x": "t", "y": ["x"],
         "x_range": x_range, "y_range": _range(trajectory.displacement)},
    ]


def write_manifest(path: Path, plots: Sequence[Dict[str, Any]], meta: Optional[Dict[str, Any]] = None) -> Path:
    manifest = {"version": 1, "plots": list(plots)}
    if meta:
        manifest["meta"] = meta
    return write_json(path, manifest)
