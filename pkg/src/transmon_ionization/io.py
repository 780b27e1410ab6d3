"""Readers and writers for run products.

Every CSV is written with 13-significant-digit scientific notation, a fixed
column order, and ``\\n`` line endings, so the bytes of a file depend only on
the numbers in it -- re-running the same sweep with a different worker count
must reproduce identical files.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .branches import Branch, ResonanceReport, branch_frequency, smooth_frequency_curve
from .observables import WignerGrid
from .propagator import TimeSeries
from .semiclassical import SemiclassicalTrajectory

__all__ = [
    "FLOAT_FORMAT",
    "write_timeseries_csv",
    "read_timeseries_csv",
    "write_wigner_csv",
    "write_branches_csv",
    "write_resonances_csv",
    "write_semiclassical_csv",
    "write_delta_nr_csv",
    "write_meta_json",
    "write_csv",
]

#: 13 significant digits: enough to round-trip float32 exactly and float64
#: to ~1e-13 relative, while keeping files diffable
FLOAT_FORMAT = "%.12e"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return FLOAT_FORMAT % float(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write rows with the shared float format; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_timeseries_csv(path: str | Path, ts: TimeSeries) -> Path:
    """One row per record: t_ns, N_r, N_t, purity, trace_dev, dim_r, N_0..N_{dim_t-1}."""
    dim_t = ts.levels.shape[1] if len(ts) else ts.params.dim_t
    header = ["t_ns", "N_r", "N_t", "purity", "trace_dev", "dim_r"]
    header += [f"N_{i}" for i in range(dim_t)]
    rows = (
        [ts.times[k], ts.n_r[k], ts.n_t[k], ts.purity[k], ts.trace_dev[k], int(ts.dim_r[k])]
        + list(ts.levels[k])
        for k in range(len(ts))
    )
    return write_csv(path, header, rows)


def read_timeseries_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Columns of a time-series file keyed by header name."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns = [[] for _ in header]
        for row in reader:
            for col, value in zip(columns, row):
                col.append(float(value))
    return {name: np.asarray(col) for name, col in zip(header, columns)}


def write_wigner_csv(path: str | Path, grid: WignerGrid) -> Path:
    """Flattened grid, one row per sample point: re_beta, im_beta, W."""
    rows = (
        [grid.re_axis[k], grid.im_axis[j], grid.values[j, k]]
        for j in range(len(grid.im_axis))
        for k in range(len(grid.re_axis))
    )
    return write_csv(path, ["re_beta", "im_beta", "W"], rows)


def write_branches_csv(path: str | Path, branches: Sequence[Branch], window: int = 5) -> Path:
    """Ladder energies and rung frequencies, raw and smoothed.

    The frequency columns are blank on the last rung (a ladder with n_max+1
    energies has n_max spacings).
    """
    rows = []
    for b in branches:
        raw = branch_frequency(b)
        smooth = smooth_frequency_curve(raw, window)
        for n, energy in enumerate(b.energies):
            freq = [_fmt(raw[n]), _fmt(smooth[n])] if n < len(raw) else ["", ""]
            rows.append([b.label, n, _fmt(energy)] + freq)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["branch", "n", "energy", "omega_raw", "omega_smooth"])
        writer.writerows(rows)
    return path


def write_resonances_csv(path: str | Path, report: ResonanceReport) -> Path:
    rows = (
        [e.branch_a, e.branch_b, e.n, e.overlap]
        for e in report.entries
    )
    return write_csv(path, ["branch_a", "branch_b", "n", "leak"], rows)


def write_semiclassical_csv(
    path: str | Path, labelled: Sequence[tuple[float, SemiclassicalTrajectory]]
) -> Path:
    """Trajectories tagged by drive amplitude, one row per time sample."""
    rows = (
        [amp, traj.branch, traj.times[k], traj.alpha[k].real, traj.alpha[k].imag,
         traj.n_photons[k]]
        for amp, traj in labelled
        for k in range(len(traj.times))
    )
    header = ["drive_amp", "branch", "t_ns", "re_alpha", "im_alpha", "n_photons"]
    return write_csv(path, header, rows)


def write_delta_nr_csv(
    path: str | Path, amp_grid: np.ndarray, t_grid: np.ndarray, delta: np.ndarray
) -> Path:
    """Tidy (drive_amp, t_ns, delta_nr) rows from a (n_amp, n_t) map."""
    rows = (
        [amp_grid[a], t_grid[t], delta[a, t]]
        for a in range(len(amp_grid))
        for t in range(len(t_grid))
    )
    return write_csv(path, ["drive_amp", "t_ns", "delta_nr"], rows)


def write_meta_json(path: str | Path, meta: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _json_default(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return dataclasses.asdict(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")
