#!/usr/bin/env python3
"""Map the photon-number ladders of a coupled transmon-resonator system.

Prints the branch table (smoothed frequency at the bottom and top of each
ladder) and every near-degeneracy between ladders strong enough to matter,
then writes the full tables as CSV.
"""

import argparse
from pathlib import Path

from transmon_ionization.branches import analyze_ladders, frequency_curve
from transmon_ionization.config import load_config
from transmon_ionization.dressed import dressed_spectrum
from transmon_ionization.io import write_branches_csv, write_resonances_csv
from transmon_ionization.presets import preset_config


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="YAML experiment file")
    src.add_argument("--preset", help="preset name (e.g. main_paper)")
    ap.add_argument("--branches", type=int, default=10, help="ladders to follow")
    ap.add_argument("--n-max", type=int, default=None,
                    help="rungs per ladder (default: dim_r - 6)")
    ap.add_argument("--threshold", type=float, default=0.01,
                    help="minimum window-integrated leak to report")
    ap.add_argument("--out", default="runs/branch_map", help="output directory")
    return ap.parse_args()


def main():
    args = parse_args()
    cfg = load_config(args.config) if args.config else preset_config(args.preset)
    p = cfg.system
    print(f"system: dim_t={p.dim_t} dim_r={p.dim_r} g={p.g} GHz")
    d = dressed_spectrum(p)
    n_branches = min(args.branches, p.dim_t)
    n_max = args.n_max if args.n_max is not None else max(2, p.dim_r - 6)
    branches, report = analyze_ladders(d, n_branches, n_max,
                                       threshold=args.threshold)

    print(f"\n{'branch':>6} {'omega(0) GHz':>14} {'omega(top) GHz':>15}")
    curves = []
    for b in branches:
        curve = frequency_curve(b)
        curves.append(curve)
        lo, _ = curve.evaluate(0.0)
        hi, _ = curve.evaluate(float(b.n_max - 1))
        print(f"{b.label:>6} {lo:>14.6f} {hi:>15.6f}")

    if report.entries:
        print(f"\nresonances (leak threshold {report.threshold}):")
        for e in report.entries:
            print(f"  {{{e.branch_a}}}-{{{e.branch_b}}} at n={e.n}  "
                  f"leak={e.overlap:.4f}")
    else:
        print("\nno resonances above threshold")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_branches_csv(out / "branches.csv", branches)
    write_resonances_csv(out / "resonances.csv", report)
    print(f"\ntables in {out}/")


if __name__ == "__main__":
    main()
