#!/usr/bin/env python3
"""Run the full main-sample amplitude sweep and export every figure table.

The stock preset takes hours at full size; --quick shrinks it to a smoke
version (small spaces, two amplitudes, short horizon) that finishes in
about a minute on one core.
"""

import argparse
from pathlib import Path

from transmon_ionization.harness import FIGURE_IDS, export_figure_data, run_preset


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/main_paper", help="output directory")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--quick", action="store_true",
                    help="shrunken smoke version of the sweep")
    ap.add_argument("--dim-cap", type=int, default=None,
                    help="override the adaptive dimension cap")
    return ap.parse_args()


def main():
    args = parse_args()
    overrides = {}
    if args.quick:
        overrides = {
            "system": {"dim_t": 8, "dim_r": 16},
            "propagator": {"taylor_order": 8, "steps_per_drive_period": 30,
                           "initial_dim_r": 16, "max_dim_r": 64,
                           "dtype": "complex128"},
            "initial_states": [0, 1],
            "drive_amps": [0.0, 0.1],
            "t_end": 2.0,
            "wigner_times": [1.0, 2.0],
        }
    if args.dim_cap is not None:
        overrides.setdefault("propagator", {})["max_dim_r"] = args.dim_cap

    manifest = run_preset("main_paper", out_dir=args.out, workers=args.workers,
                          overrides=overrides or None)
    for rec in manifest.runs:
        print(f"{rec.status:5s}  {rec.run_id}  {rec.wall_time_s:8.1f} s"
              + (f"  {rec.error}" if rec.error else ""))

    export_dir = Path(manifest.root) / "export"
    for figure in FIGURE_IDS:
        try:
            paths = export_figure_data(manifest, figure, out_dir=export_dir)
        except Exception as exc:  # noqa: BLE001 - report and continue
            print(f"{figure}: skipped ({exc})")
            continue
        for p in paths:
            print(f"{figure}: {p}")


if __name__ == "__main__":
    main()
