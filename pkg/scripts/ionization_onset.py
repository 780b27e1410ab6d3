#!/usr/bin/env python3
"""Locate the drive amplitude where the transmon escapes its initial level.

Runs (or reuses) an amplitude sweep from a fixed initial level, then scans
the final transmon excitation N_t across amplitudes: the onset is the first
amplitude whose final N_t exceeds the weakest-drive baseline by the chosen
margin.  Prints one row per amplitude plus the onset summary.
"""

import argparse
import sys
from pathlib import Path

from transmon_ionization.config import load_config
from transmon_ionization.harness import load_manifest, run_sweep
from transmon_ionization.io import read_timeseries_csv
from transmon_ionization.presets import preset_config


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="YAML experiment file")
    src.add_argument("--preset", help="preset name (e.g. walter)")
    src.add_argument("--manifest", help="reuse a finished sweep directory")
    ap.add_argument("--out", default="runs/onset", help="output directory")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--margin", type=float, default=0.5,
                    help="N_t excess over baseline that counts as escaped")
    return ap.parse_args()


def main():
    args = parse_args()
    if args.manifest:
        manifest = load_manifest(args.manifest)
    else:
        cfg = load_config(args.config) if args.config else preset_config(args.preset)
        manifest = run_sweep(cfg, out_dir=args.out, workers=args.workers)

    state = manifest.config["initial_states"][0]
    rows = []
    for rec in manifest.runs:
        if rec.initial_state != state or rec.status != "ok":
            continue
        ts = read_timeseries_csv(Path(manifest.root) / rec.dir / "timeseries.csv")
        rows.append((rec.drive_amp, ts["N_t"][-1], ts["N_r"].mean(), ts["N_r"][-1]))
    if not rows:
        print("no completed runs for the initial state", file=sys.stderr)
        return 1
    rows.sort()

    baseline = rows[0][1]
    onset = None
    print(f"{'amp GHz':>9} {'N_t(end)':>10} {'mean N_r':>10} {'N_r(end)':>10}")
    for amp, nt_end, nr_mean, nr_end in rows:
        mark = ""
        if onset is None and nt_end > baseline + args.margin:
            onset = (amp, nr_mean)
            mark = "  <- onset"
        print(f"{amp:>9.4f} {nt_end:>10.4f} {nr_mean:>10.3f} {nr_end:>10.3f}{mark}")

    if onset is None:
        print(f"\nno amplitude exceeded baseline + {args.margin}")
        return 1
    print(f"\nonset at amp {onset[0]:.4f} GHz with sweep-mean N_r = {onset[1]:.2f} "
          f"(baseline N_t = {baseline:.4f})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
