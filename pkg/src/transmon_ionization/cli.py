"""Command-line entry point.

Subcommands::

    transmon-ionization simulate <config.yaml>     run the configured sweep
    transmon-ionization preset <name>              run a named preset sweep
    transmon-ionization branches <config.yaml>     ladder + resonance tables only
    transmon-ionization semiclassical <config.yaml>  branch-flow products only
    transmon-ionization export <manifest> <figure>   tidy CSVs for one figure

Common flags: ``--out DIR`` redirects output, ``--workers N`` parallelizes a
sweep over processes, ``--dim-cap N`` caps the adaptive resonator dimension,
``--magnus-commutator`` enables the higher-order averaged propagator.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, SimulationError
from .harness import FIGURE_IDS, export_figure_data, run_preset, run_sweep
from .presets import PRESET_NAMES

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transmon-ionization",
        description="driven transmon-resonator master-equation sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, sweep: bool):
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory (default: from the config)")
        if sweep:
            p.add_argument("--workers", metavar="N", type=int, default=None,
                           help="worker processes (default: from the config)")
            p.add_argument("--dim-cap", metavar="N", type=int, default=None,
                           help="cap on the adaptive resonator dimension")
            p.add_argument("--magnus-commutator", action="store_true",
                           help="include the first commutator correction in each step")

    p = sub.add_parser("simulate", help="run the sweep described by a config file")
    p.add_argument("config", help="YAML experiment file")
    add_common(p, sweep=True)

    p = sub.add_parser("preset", help="run a named preset sweep")
    p.add_argument("name", choices=PRESET_NAMES)
    add_common(p, sweep=True)

    p = sub.add_parser("branches", help="write ladder and resonance tables only")
    p.add_argument("config", help="YAML experiment file")
    add_common(p, sweep=False)

    p = sub.add_parser("semiclassical", help="write branch-flow products only")
    p.add_argument("config", help="YAML experiment file")
    add_common(p, sweep=False)

    p = sub.add_parser("export", help="write tidy figure-input CSVs from a manifest")
    p.add_argument("manifest", help="manifest.json (or its directory)")
    p.add_argument("figure", choices=FIGURE_IDS)
    add_common(p, sweep=False)
    return parser


def _apply_flags(cfg, args):
    prop = cfg.propagator
    if getattr(args, "dim_cap", None) is not None:
        prop = dataclasses.replace(prop, max_dim_r=args.dim_cap)
    if getattr(args, "magnus_commutator", False):
        prop = dataclasses.replace(prop, magnus_commutator=True)
    return dataclasses.replace(cfg, propagator=prop)


def _print_manifest(manifest) -> None:
    for rec in manifest.runs:
        mark = "ok   " if rec.status == "ok" else "ERROR"
        line = (f"  {mark} {rec.run_id}  ({rec.wall_time_s:.1f} s)")
        if rec.error:
            line += f"  {rec.error}"
        print(line)
    print(f"manifest: {manifest.path}")


def _cmd_simulate(args) -> int:
    cfg = _apply_flags(load_config(args.config), args)
    manifest = run_sweep(cfg, out_dir=args.out, workers=args.workers)
    _print_manifest(manifest)
    return 0 if all(r.status == "ok" for r in manifest.runs) else 1


def _cmd_preset(args) -> int:
    overrides = {}
    prop = {}
    if args.dim_cap is not None:
        prop["max_dim_r"] = args.dim_cap
    if args.magnus_commutator:
        prop["magnus_commutator"] = True
    if prop:
        overrides["propagator"] = prop
    manifest = run_preset(args.name, out_dir=args.out, workers=args.workers,
                          overrides=overrides or None)
    _print_manifest(manifest)
    return 0 if all(r.status == "ok" for r in manifest.runs) else 1


def _cmd_tables(args, which: str) -> int:
    cfg = load_config(args.config)
    wanted = ("branches",) if which == "branches" else ("branches", "semiclassical", "delta_nr")
    cfg = dataclasses.replace(cfg, outputs=wanted)
    root = Path(args.out if args.out is not None else cfg.out_dir)
    root.mkdir(parents=True, exist_ok=True)

    from .harness import _branch_products, _semiclassical_products

    sweep_outputs: dict[str, str] = {}
    curves = _branch_products(cfg, root, sweep_outputs)
    if which == "semiclassical":
        _semiclassical_products(cfg, curves, root, sweep_outputs)
    for name, rel in sorted(sweep_outputs.items()):
        print(f"  {name}: {root / rel}")
    return 0


def _cmd_export(args) -> int:
    paths = export_figure_data(args.manifest, args.figure, out_dir=args.out)
    for path in paths:
        print(f"  {path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "preset":
            return _cmd_preset(args)
        if args.command == "branches":
            return _cmd_tables(args, "branches")
        if args.command == "semiclassical":
            return _cmd_tables(args, "semiclassical")
        return _cmd_export(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
