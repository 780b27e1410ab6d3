"""Sweep orchestration: run grids of trajectories and export figure data.

A sweep is the cross product of the configured drive amplitudes and initial
states.  Each run writes its own directory (meta.json, timeseries.csv,
optional Wigner snapshots); sweep-level products (branch ladders, resonance
table, semiclassical trajectories, the branch population-difference map) are
written next to them, and ``manifest.json`` is written last so a complete
manifest implies complete outputs.

Runs are distributed over workers by static round-robin (worker ``w`` takes
runs ``w``, ``w + W``, ``w + 2W`` ...).  Every run is deterministic, so the
produced CSV files are byte-identical whatever the worker count; only wall
times and the manifest metadata may differ.  One failed run is recorded with
its error message and does not stop the others.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime
import functools
import json
import multiprocessing
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from . import io as run_io
from .branches import analyze_ladders, frequency_curve
from .config import ExperimentConfig, config_hash, config_to_mapping, config_from_mapping
from .dressed import SystemParams, dressed_spectrum
from .errors import MissingRunError, SimulationError
from .propagator import evolve, initial_state
from .semiclassical import integrate_branch_eom, max_stable_dt, population_difference

__all__ = [
    "RunRecord",
    "RunManifest",
    "execute_run",
    "run_sweep",
    "run_preset",
    "export_figure_data",
    "load_manifest",
    "FIGURE_IDS",
]

MANIFEST_FORMAT = 1

#: time samples used for the semiclassical products
_SEMICLASSICAL_SAMPLES = 201


def _package_version() -> str:
    try:
        from importlib.metadata import version

        return version("transmon-ionization")
    except Exception:
        return "0+unknown"


@dataclass(frozen=True)
class RunRecord:
    """Manifest entry for one (drive amplitude, initial state) trajectory."""

    run_id: str
    drive_amp: float
    initial_state: int
    run_hash: str
    dir: str
    status: str  # "ok" or "error"
    error: str | None
    wall_time_s: float
    outputs: dict[str, Any] = field(default_factory=dict)


@dataclass
class RunManifest:
    """Index of a completed sweep; paths are relative to its directory."""

    config: dict
    config_hash: str
    runs: list[RunRecord]
    sweep_outputs: dict[str, str]
    package_version: str = field(default_factory=_package_version)
    created_utc: str = ""
    format: int = MANIFEST_FORMAT
    path: Path | None = None  # set when loaded from / saved to disk

    @property
    def root(self) -> Path:
        if self.path is None:
            raise ValueError("manifest has no directory; save or load it first")
        return self.path.parent

    def run_for(self, drive_amp: float, initial_state: int,
                tol: float = 1e-12) -> RunRecord | None:
        for rec in self.runs:
            if rec.initial_state == initial_state and abs(rec.drive_amp - drive_amp) <= tol:
                return rec
        return None

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        data = {
            "format": self.format,
            "package_version": self.package_version,
            "created_utc": self.created_utc,
            "config": self.config,
            "config_hash": self.config_hash,
            "runs": [dataclasses.asdict(r) for r in self.runs],
            "sweep_outputs": self.sweep_outputs,
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.path = path
        return path


def load_manifest(path: str | Path) -> RunManifest:
    path = Path(path)
    if path.is_dir():
        path = path / "manifest.json"
    with open(path) as fh:
        data = json.load(fh)
    runs = [RunRecord(**r) for r in data["runs"]]
    return RunManifest(
        config=data["config"],
        config_hash=data["config_hash"],
        runs=runs,
        sweep_outputs=data.get("sweep_outputs", {}),
        package_version=data.get("package_version", "?"),
        created_utc=data.get("created_utc", ""),
        format=data.get("format", 1),
        path=path,
    )


# ---------------------------------------------------------------------------
# single run
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=8)
def _static_spectrum(params: SystemParams):
    """Dressed spectrum shared between runs (the drive never enters it)."""
    return dressed_spectrum(params)


def _run_id(index: int, drive_amp: float, state: int) -> str:
    return f"run_{index:03d}_amp{drive_amp:.4f}_state{state}"


def execute_run(
    cfg: ExperimentConfig, index: int, drive_amp: float, state: int, root: Path
) -> RunRecord:
    """Evolve one trajectory and write its directory; never raises for
    simulation-level failures (they are recorded in the returned record)."""
    run_id = _run_id(index, drive_amp, state)
    run_dir = root / run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    error: str | None = None
    outputs: dict[str, Any] = {}
    final_dim_r = None
    records = 0
    try:
        base = dataclasses.replace(cfg.system, drive_amp=0.0)
        spectrum = _static_spectrum(base)
        rho0 = initial_state(spectrum, state, dim_r=cfg.propagator.initial_dim_r)
        params = dataclasses.replace(cfg.system, drive_amp=drive_amp)
        wigner_times = cfg.wigner_times if "wigner" in cfg.outputs else ()
        ts = evolve(params, cfg.propagator, rho0, cfg.t_end, wigner_times=wigner_times)
        error = ts.error
        records = len(ts)
        final_dim_r = int(ts.dim_r[-1]) if records else None
        run_io.write_timeseries_csv(run_dir / "timeseries.csv", ts)
        outputs["timeseries"] = f"{run_id}/timeseries.csv"
        wigner_meta = {}
        for k, (t, grid) in enumerate(ts.wigner_snapshots):
            name = f"wigner_{k:02d}.csv"
            run_io.write_wigner_csv(run_dir / name, grid)
            wigner_meta[name] = t
            outputs.setdefault("wigner", []).append(f"{run_id}/{name}")
    except SimulationError as exc:
        error = f"{type(exc).__name__}: {exc}"
        wigner_meta = {}
    wall = time.perf_counter() - started
    meta = {
        "run_id": run_id,
        "drive_amp": drive_amp,
        "initial_state": state,
        "run_hash": config_hash(cfg, drive_amp=drive_amp, initial_state=state),
        "system": dataclasses.asdict(dataclasses.replace(cfg.system, drive_amp=drive_amp)),
        "propagator": dataclasses.asdict(cfg.propagator),
        "t_end": cfg.t_end,
        "records": records,
        "final_dim_r": final_dim_r,
        "wigner_times": wigner_meta,
        "error": error,
        "wall_time_s": wall,
        "package_version": _package_version(),
    }
    run_io.write_meta_json(run_dir / "meta.json", meta)
    outputs["meta"] = f"{run_id}/meta.json"
    return RunRecord(
        run_id=run_id,
        drive_amp=drive_amp,
        initial_state=state,
        run_hash=meta["run_hash"],
        dir=run_id,
        status="ok" if error is None else "error",
        error=error,
        wall_time_s=wall,
        outputs=outputs,
    )


# ---------------------------------------------------------------------------
# sweep-level products
# ---------------------------------------------------------------------------


def _branch_products(cfg: ExperimentConfig, root: Path, sweep_outputs: dict) -> list:
    """Ladders + resonance table at the configured static dimensions.

    Returns the two lowest-branch frequency curves for reuse by the
    semiclassical products.
    """
    base = dataclasses.replace(cfg.system, drive_amp=0.0)
    d = _static_spectrum(base)
    n_branches = min(10, cfg.system.dim_t)
    n_max = max(2, cfg.system.dim_r - 6)
    branches, report = analyze_ladders(d, n_branches=n_branches, n_max=n_max)
    if "branches" in cfg.outputs:
        run_io.write_branches_csv(root / "branches.csv", branches)
        run_io.write_resonances_csv(root / "resonances.csv", report)
        sweep_outputs["branches"] = "branches.csv"
        sweep_outputs["resonances"] = "resonances.csv"
    return [frequency_curve(b) for b in branches[:2]]


def _semiclassical_products(
    cfg: ExperimentConfig, curves, root: Path, sweep_outputs: dict
) -> None:
    amps = np.asarray(cfg.drive_amps, dtype=float)
    t_grid = np.linspace(0.0, cfg.t_end, _SEMICLASSICAL_SAMPLES)
    if "semiclassical" in cfg.outputs:
        labelled = []
        for curve in curves[:2]:
            dt = 0.9 * max_stable_dt(curve, cfg.system)
            traj = integrate_branch_eom(
                curve, cfg.system, np.zeros(len(amps), dtype=complex),
                cfg.t_end, dt, drive_amp=amps,
            )
            stride = max(1, len(traj.times) // _SEMICLASSICAL_SAMPLES)
            for a, amp in enumerate(amps):
                sub = dataclasses.replace(
                    traj,
                    times=traj.times[::stride],
                    alpha=traj.alpha[::stride, a],
                )
                labelled.append((float(amp), sub))
        run_io.write_semiclassical_csv(root / "semiclassical.csv", labelled)
        sweep_outputs["semiclassical"] = "semiclassical.csv"
    if "delta_nr" in cfg.outputs:
        delta = population_difference(cfg.system, curves[0], curves[1], t_grid, amps)
        run_io.write_delta_nr_csv(root / "delta_nr.csv", amps, t_grid, delta)
        sweep_outputs["delta_nr"] = "delta_nr.csv"


# ---------------------------------------------------------------------------
# sweep driver
# ---------------------------------------------------------------------------

_FORK_CONFIG: ExperimentConfig | None = None
_FORK_ROOT: Path | None = None


def _fork_execute(args: tuple[int, float, int]) -> RunRecord:
    index, amp, state = args
    assert _FORK_CONFIG is not None and _FORK_ROOT is not None
    return execute_run(_FORK_CONFIG, index, amp, state, _FORK_ROOT)


def run_sweep(
    cfg: ExperimentConfig,
    out_dir: str | Path | None = None,
    workers: int | None = None,
) -> RunManifest:
    """Run every (amplitude, initial state) trajectory and write the manifest.

    ``out_dir`` and ``workers`` override the corresponding config fields.
    The manifest is written only after everything else, and is returned with
    its ``path`` set.
    """
    global _FORK_CONFIG, _FORK_ROOT
    root = Path(out_dir if out_dir is not None else cfg.out_dir)
    root.mkdir(parents=True, exist_ok=True)
    n_workers = workers if workers is not None else cfg.workers
    if n_workers < 1:
        raise ValueError(f"workers must be >= 1, got {n_workers}")

    tasks = [(i, amp, state) for i, (amp, state) in enumerate(cfg.runs)]
    n_workers = min(n_workers, len(tasks))

    # static H and ladders are shared by all runs; build them once in the
    # parent so forked workers inherit the cache instead of recomputing
    base = dataclasses.replace(cfg.system, drive_amp=0.0)
    _static_spectrum(base)

    sweep_outputs: dict[str, str] = {}
    need_curves = bool({"branches", "semiclassical", "delta_nr"} & set(cfg.outputs))
    curves = _branch_products(cfg, root, sweep_outputs) if need_curves else []

    if n_workers == 1:
        records = [execute_run(cfg, i, a, s, root) for (i, a, s) in tasks]
    else:
        _FORK_CONFIG, _FORK_ROOT = cfg, root
        try:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(processes=n_workers) as pool:
                # static round-robin: worker w owns tasks w, w+W, w+2W, ...
                shards = [tasks[w::n_workers] for w in range(n_workers)]
                results = pool.map(_fork_shard, shards)
            records_by_index = {r.run_id: r for shard in results for r in shard}
            records = [records_by_index[_run_id(i, a, s)] for (i, a, s) in tasks]
        finally:
            _FORK_CONFIG = _FORK_ROOT = None

    if {"semiclassical", "delta_nr"} & set(cfg.outputs):
        _semiclassical_products(cfg, curves, root, sweep_outputs)

    resolved = dataclasses.replace(cfg, out_dir=str(root), workers=n_workers)
    with open(root / "config.yaml", "w") as fh:
        yaml.safe_dump(config_to_mapping(resolved), fh, sort_keys=True)

    manifest = RunManifest(
        config=config_to_mapping(resolved),
        config_hash=config_hash(cfg),
        runs=records,
        sweep_outputs=sweep_outputs,
        created_utc=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )
    manifest.save(root / "manifest.json")
    return manifest


def _fork_shard(shard: Sequence[tuple[int, float, int]]) -> list[RunRecord]:
    return [_fork_execute(args) for args in shard]


def run_preset(
    name: str,
    out_dir: str | Path | None = None,
    workers: int | None = None,
    overrides: dict | None = None,
) -> RunManifest:
    """Run one of the named preset sweeps (see :mod:`.presets`)."""
    from .presets import preset_mapping

    mapping = preset_mapping(name)
    if overrides:
        for key, value in overrides.items():
            if key in ("system", "propagator") and isinstance(value, dict):
                section = dict(mapping.get(key, {}))
                section.update(value)
                mapping[key] = section
            else:
                mapping[key] = value
    cfg = dataclasses.replace(config_from_mapping(mapping), preset=name)
    return run_sweep(cfg, out_dir=out_dir, workers=workers)


# ---------------------------------------------------------------------------
# figure exports
# ---------------------------------------------------------------------------

FIGURE_IDS = ("fig2", "fig3a", "fig4", "fig5", "fig6a", "fig7", "fig8")

#: floor under |W| before taking the log, far below any representable signal
_LOG_FLOOR = 1e-300


def _ok_runs(manifest: RunManifest) -> list[RunRecord]:
    runs = [r for r in manifest.runs if r.status == "ok" and "timeseries" in r.outputs]
    if not runs:
        raise MissingRunError("manifest contains no successful runs with time series")
    return runs


def _export_timeseries_table(manifest: RunManifest, out: Path, name: str,
                             columns: Sequence[str]) -> Path:
    rows = []
    for rec in _ok_runs(manifest):
        data = run_io.read_timeseries_csv(manifest.root / rec.outputs["timeseries"])
        for k in range(len(data["t_ns"])):
            rows.append([rec.drive_amp, rec.initial_state]
                        + [data[c][k] for c in columns])
    header = ["drive_amp", "initial_state"] + list(columns)
    return run_io.write_csv(out / name, header, rows)


def _export_levels_table(manifest: RunManifest, out: Path) -> Path:
    rows = []
    for rec in _ok_runs(manifest):
        data = run_io.read_timeseries_csv(manifest.root / rec.outputs["timeseries"])
        level_names = sorted(
            (c for c in data if c.startswith("N_") and c[2:].isdigit()),
            key=lambda c: int(c[2:]),
        )
        for k in range(len(data["t_ns"])):
            for c in level_names:
                rows.append([rec.drive_amp, rec.initial_state, data["t_ns"][k],
                             int(c[2:]), data[c][k]])
    header = ["drive_amp", "initial_state", "t_ns", "level", "population"]
    return run_io.write_csv(out / "fig2_levels.csv", header, rows)


def _export_wigner(manifest: RunManifest, out: Path) -> Path:
    rows = []
    found = False
    for rec in manifest.runs:
        names = rec.outputs.get("wigner", [])
        if rec.status != "ok" or not names:
            continue
        with open(manifest.root / rec.outputs["meta"]) as fh:
            times = json.load(fh).get("wigner_times", {})
        for rel in names:
            found = True
            t = times.get(Path(rel).name)
            with open(manifest.root / rel, newline="") as fh:
                reader = csv.reader(fh)
                next(reader)
                for re_b, im_b, w in reader:
                    w = float(w)
                    rows.append([
                        rec.drive_amp, rec.initial_state, t,
                        float(re_b), float(im_b), w,
                        np.log10(max(abs(w), _LOG_FLOOR)),
                    ])
    if not found:
        raise MissingRunError("no Wigner snapshots in this manifest; rerun the sweep "
                              "with the 'wigner' output and nonempty wigner_times")
    header = ["drive_amp", "initial_state", "t_ns", "re_beta", "im_beta", "W",
              "log10_abs_W"]
    return run_io.write_csv(out / "fig4_wigner.csv", header, rows)


def _export_branch_frequencies(manifest: RunManifest, out: Path) -> list[Path]:
    rel = manifest.sweep_outputs.get("branches")
    if rel is None:
        raise MissingRunError("sweep was run without the 'branches' output")
    rows = []
    with open(manifest.root / rel, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for branch, n, _energy, _raw, smooth in reader:
            if smooth:
                rows.append([int(branch), int(n), float(smooth)])
    omega_r = manifest.config["system"]["omega_r"]
    paths = [
        run_io.write_csv(out / "fig5_branches.csv", ["branch", "n", "omega_smooth"], rows),
        run_io.write_csv(out / "fig5_reference.csv", ["omega_r"], [[omega_r]]),
    ]
    return paths


def _export_delta_nr(manifest: RunManifest, out: Path, figure: str) -> list[Path]:
    paths = []
    rel = manifest.sweep_outputs.get("delta_nr")
    if rel is None:
        raise MissingRunError("sweep was run without the 'delta_nr' output")
    with open(manifest.root / rel, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(a), float(t), float(d)] for a, t, d in reader]
    paths.append(run_io.write_csv(out / f"{figure}_semiclassical.csv", header, rows))

    # master-equation counterpart: pair up the two initial states per amplitude
    by_amp: dict[float, dict[int, RunRecord]] = {}
    for rec in manifest.runs:
        if rec.status == "ok" and "timeseries" in rec.outputs:
            by_amp.setdefault(rec.drive_amp, {})[rec.initial_state] = rec
    me_rows = []
    for amp in sorted(by_amp):
        pair = by_amp[amp]
        if 0 not in pair or 1 not in pair:
            continue
        d0 = run_io.read_timeseries_csv(manifest.root / pair[0].outputs["timeseries"])
        d1 = run_io.read_timeseries_csv(manifest.root / pair[1].outputs["timeseries"])
        n = min(len(d0["t_ns"]), len(d1["t_ns"]))
        for k in range(n):
            me_rows.append([amp, d0["t_ns"][k], d1["N_r"][k] - d0["N_r"][k]])
    if me_rows:
        paths.append(run_io.write_csv(
            out / f"{figure}_master_equation.csv",
            ["drive_amp", "t_ns", "delta_nr"], me_rows,
        ))
    return paths


def export_figure_data(
    manifest: RunManifest | str | Path, figure: str, out_dir: str | Path | None = None
) -> list[Path]:
    """Write tidy CSV inputs for one figure; returns the written paths.

    Raises :class:`MissingRunError` when the manifest lacks the runs or sweep
    products the figure needs.
    """
    if not isinstance(manifest, RunManifest):
        manifest = load_manifest(manifest)
    if figure not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {figure!r}; expected one of {FIGURE_IDS}")
    out = Path(out_dir) if out_dir is not None else manifest.root / "export"
    out.mkdir(parents=True, exist_ok=True)

    if figure == "fig2":
        return [
            _export_timeseries_table(manifest, out, "fig2_timeseries.csv",
                                     ["t_ns", "N_r", "N_t", "purity"]),
            _export_levels_table(manifest, out),
        ]
    if figure in ("fig3a", "fig6a"):
        return [_export_timeseries_table(manifest, out, f"{figure}_parametric.csv",
                                         ["t_ns", "N_r", "N_t"])]
    if figure == "fig4":
        return [_export_wigner(manifest, out)]
    if figure == "fig5":
        return _export_branch_frequencies(manifest, out)
    # fig7 / fig8
    return _export_delta_nr(manifest, out, figure)
