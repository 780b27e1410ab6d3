"""Experiment configuration: dataclass, YAML loading, strict validation.

A single YAML file describes one sweep: the physical system, the propagator
settings, which initial states and drive amplitudes to run, how long to
evolve, and which outputs to produce.  Loading is strict -- unknown keys are
rejected and every error names the offending field by its dotted path, so a
typo like ``system.kapa`` fails loudly instead of silently using a default.

Frequencies in the file are cyclic (over 2 pi) in GHz, matching
:class:`~transmon_ionization.dressed.SystemParams`.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml

from .dressed import SystemParams
from .errors import ParseError, ValidationError
from .propagator import PropagatorConfig
from .transmon import TransmonParams

__all__ = [
    "ExperimentConfig",
    "OUTPUT_KINDS",
    "load_config",
    "config_from_mapping",
    "config_to_mapping",
    "config_hash",
]

#: output products a sweep may request
OUTPUT_KINDS = ("timeseries", "wigner", "branches", "semiclassical", "delta_nr")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one sweep.

    ``drive_amps`` is the list of drive amplitudes (GHz); the sweep runs one
    trajectory per (amplitude, initial state) pair.  ``initial_states`` are
    bare transmon level labels.  ``wigner_times`` (ns) are the instants at
    which resonator Wigner snapshots are recorded when the ``wigner`` output
    is requested.
    """

    system: SystemParams
    propagator: PropagatorConfig = field(default_factory=PropagatorConfig)
    initial_states: tuple[int, ...] = (0,)
    drive_amps: tuple[float, ...] = (0.0,)
    t_end: float = 1.0
    outputs: tuple[str, ...] = ("timeseries",)
    wigner_times: tuple[float, ...] = ()
    preset: str | None = None
    out_dir: str = "runs"
    workers: int = 1

    def __post_init__(self):
        if not self.drive_amps:
            raise ValidationError("drive_amps", "must not be empty")
        if any(a < 0 for a in self.drive_amps):
            raise ValidationError("drive_amps", "amplitudes must be non-negative")
        if not self.initial_states:
            raise ValidationError("initial_states", "must not be empty")
        for s in self.initial_states:
            if not 0 <= s < self.system.dim_t:
                raise ValidationError(
                    "initial_states",
                    f"level {s} outside the transmon truncation [0, {self.system.dim_t})",
                )
        if not self.t_end > 0:
            raise ValidationError("t_end", f"must be positive, got {self.t_end}")
        for o in self.outputs:
            if o not in OUTPUT_KINDS:
                raise ValidationError("outputs", f"unknown output kind {o!r}")
        if any(t < 0 for t in self.wigner_times):
            raise ValidationError("wigner_times", "snapshot times must be non-negative")
        if self.workers < 1:
            raise ValidationError("workers", f"must be >= 1, got {self.workers}")

    @property
    def runs(self) -> list[tuple[float, int]]:
        """Deterministic (amplitude, initial state) enumeration of the sweep."""
        return [(a, s) for a in self.drive_amps for s in self.initial_states]


# ---------------------------------------------------------------------------
# schema tables: {yaml key: (attribute, converter)} per section
# ---------------------------------------------------------------------------


def _as_float(path: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(path, f"expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ValidationError(path, f"must be finite, got {value!r}")
    return out


def _as_int(path: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(path, f"expected an integer, got {value!r}")
    return value


def _as_bool(path: str, value: Any) -> bool:
    if not isinstance(value, bool):
        raise ValidationError(path, f"expected true/false, got {value!r}")
    return value


def _as_str(path: str, value: Any) -> str:
    if not isinstance(value, str):
        raise ValidationError(path, f"expected a string, got {value!r}")
    return value


_TRANSMON_KEYS = {"e_c": _as_float, "e_j": _as_float, "charge_cutoff": _as_int}

_SYSTEM_KEYS = {
    "e_c": _as_float,
    "e_j": _as_float,
    "charge_cutoff": _as_int,
    "omega_r": _as_float,
    "g": _as_float,
    "kappa": _as_float,
    "drive_freq": _as_float,
    "dim_t": _as_int,
    "dim_r": _as_int,
}

_PROPAGATOR_KEYS = {
    "taylor_order": _as_int,
    "steps_per_drive_period": _as_int,
    "truncation_threshold": _as_float,
    "max_dim_r": _as_int,
    "record_every": _as_int,
    "initial_dim_r": _as_int,
    "backend": _as_str,
    "dtype": _as_str,
    "magnus_commutator": _as_bool,
}

_TOP_KEYS = (
    "preset",
    "system",
    "propagator",
    "initial_states",
    "drive_amps",
    "t_end",
    "outputs",
    "wigner_times",
    "out_dir",
    "workers",
)


def _require_mapping(path: str, value: Any) -> dict:
    if not isinstance(value, Mapping):
        raise ValidationError(path, f"expected a mapping, got {type(value).__name__}")
    return dict(value)


def _check_keys(path: str, mapping: Mapping, allowed) -> None:
    for key in mapping:
        if key not in allowed:
            where = f"{path}.{key}" if path else str(key)
            raise ValidationError(where, "unknown key")


def _system_from_mapping(raw: Mapping) -> SystemParams:
    _check_keys("system", raw, _SYSTEM_KEYS)
    for required in ("e_c", "e_j", "omega_r", "g"):
        if required not in raw:
            raise ValidationError(f"system.{required}", "missing required key")
    values = {k: conv(f"system.{k}", raw[k]) for k, conv in _SYSTEM_KEYS.items() if k in raw}
    transmon = {k: values.pop(k) for k in ("e_c", "e_j", "charge_cutoff") if k in values}
    try:
        tp = TransmonParams(
            E_C=transmon["e_c"],
            E_J=transmon["e_j"],
            **({"charge_cutoff": transmon["charge_cutoff"]} if "charge_cutoff" in transmon else {}),
        )
    except Exception as exc:  # re-raise with the field path attached
        raise ValidationError("system", str(exc)) from exc
    if values.get("kappa", 0.0) < 0:
        raise ValidationError("system.kappa", f"must be non-negative, got {values['kappa']}")
    if values.get("drive_freq", 0.0) < 0:
        raise ValidationError("system.drive_freq", f"must be non-negative, got {values['drive_freq']}")
    try:
        return SystemParams(transmon=tp, **values)
    except Exception as exc:
        raise ValidationError("system", str(exc)) from exc


def _propagator_from_mapping(raw: Mapping) -> PropagatorConfig:
    _check_keys("propagator", raw, _PROPAGATOR_KEYS)
    values = {k: conv(f"propagator.{k}", raw[k]) for k, conv in _PROPAGATOR_KEYS.items() if k in raw}
    try:
        return PropagatorConfig(**values)
    except Exception as exc:
        raise ValidationError("propagator", str(exc)) from exc


def _amp_list(path: str, value: Any) -> tuple[float, ...]:
    """Either an explicit list or a {start, stop, count} description."""
    if isinstance(value, Mapping):
        _check_keys(path, value, ("start", "stop", "count"))
        for required in ("start", "stop", "count"):
            if required not in value:
                raise ValidationError(f"{path}.{required}", "missing required key")
        start = _as_float(f"{path}.start", value["start"])
        stop = _as_float(f"{path}.stop", value["stop"])
        count = _as_int(f"{path}.count", value["count"])
        if count < 1:
            raise ValidationError(f"{path}.count", f"must be >= 1, got {count}")
        if count == 1:
            return (start,)
        step = (stop - start) / (count - 1)
        return tuple(start + step * i for i in range(count))
    if isinstance(value, Sequence) and not isinstance(value, (str, bytes)):
        return tuple(_as_float(f"{path}[{i}]", v) for i, v in enumerate(value))
    raise ValidationError(path, "expected a list of numbers or {start, stop, count}")


def config_from_mapping(raw: Mapping) -> ExperimentConfig:
    """Build and validate an :class:`ExperimentConfig` from plain data.

    ``raw`` follows the YAML schema.  When ``preset`` is present the named
    preset supplies the base document and the remaining keys override it
    section by section (scalar sections replace, mapping sections merge).
    """
    raw = _require_mapping("", raw)
    _check_keys("", raw, _TOP_KEYS)

    if raw.get("preset") is not None:
        from .presets import preset_mapping  # local import: presets builds on config

        name = _as_str("preset", raw["preset"])
        base = preset_mapping(name)
        merged = dict(base)
        for key, value in raw.items():
            if key == "preset":
                merged[key] = value
            elif key in ("system", "propagator") and isinstance(value, Mapping):
                section = dict(_require_mapping(key, merged.get(key, {})))
                section.update(value)
                merged[key] = section
            else:
                merged[key] = value
        raw = merged

    if "system" not in raw:
        raise ValidationError("system", "missing required section")
    system = _system_from_mapping(_require_mapping("system", raw["system"]))
    propagator = _propagator_from_mapping(_require_mapping("propagator", raw.get("propagator", {})))

    kwargs: dict[str, Any] = {"system": system, "propagator": propagator}
    if "initial_states" in raw:
        value = raw["initial_states"]
        if not isinstance(value, Sequence) or isinstance(value, (str, bytes)):
            raise ValidationError("initial_states", "expected a list of levels")
        kwargs["initial_states"] = tuple(
            _as_int(f"initial_states[{i}]", v) for i, v in enumerate(value)
        )
    if "drive_amps" in raw:
        kwargs["drive_amps"] = _amp_list("drive_amps", raw["drive_amps"])
    if "t_end" in raw:
        kwargs["t_end"] = _as_float("t_end", raw["t_end"])
    if "outputs" in raw:
        value = raw["outputs"]
        if not isinstance(value, Sequence) or isinstance(value, (str, bytes)):
            raise ValidationError("outputs", "expected a list of output kinds")
        kwargs["outputs"] = tuple(_as_str(f"outputs[{i}]", v) for i, v in enumerate(value))
    if "wigner_times" in raw:
        value = raw["wigner_times"]
        if not isinstance(value, Sequence) or isinstance(value, (str, bytes)):
            raise ValidationError("wigner_times", "expected a list of times (ns)")
        kwargs["wigner_times"] = tuple(
            _as_float(f"wigner_times[{i}]", v) for i, v in enumerate(value)
        )
    if raw.get("preset") is not None:
        kwargs["preset"] = raw["preset"]
    if "out_dir" in raw:
        kwargs["out_dir"] = _as_str("out_dir", raw["out_dir"])
    if "workers" in raw:
        kwargs["workers"] = _as_int("workers", raw["workers"])
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a YAML experiment file, validate it, and fill defaults.

    Raises :class:`ParseError` for malformed YAML and
    :class:`ValidationError` (with the dotted field path) for unknown keys,
    missing required fields or out-of-range values.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if raw is None:
        raw = {}
    return config_from_mapping(raw)


# ---------------------------------------------------------------------------
# round-tripping and hashing
# ---------------------------------------------------------------------------


def config_to_mapping(cfg: ExperimentConfig) -> dict:
    """Plain-data form of a config (the schema ``load_config`` accepts)."""
    system = {
        "e_c": cfg.system.transmon.E_C,
        "e_j": cfg.system.transmon.E_J,
        "charge_cutoff": cfg.system.transmon.charge_cutoff,
        "omega_r": cfg.system.omega_r,
        "g": cfg.system.g,
        "kappa": cfg.system.kappa,
        "drive_freq": cfg.system.drive_freq,
        "dim_t": cfg.system.dim_t,
        "dim_r": cfg.system.dim_r,
    }
    propagator = {f.name: getattr(cfg.propagator, f.name) for f in dataclasses.fields(cfg.propagator)}
    out = {
        "system": system,
        "propagator": propagator,
        "initial_states": list(cfg.initial_states),
        "drive_amps": list(cfg.drive_amps),
        "t_end": cfg.t_end,
        "outputs": list(cfg.outputs),
        "wigner_times": list(cfg.wigner_times),
        "out_dir": cfg.out_dir,
        "workers": cfg.workers,
    }
    if cfg.preset is not None:
        out["preset"] = cfg.preset
    return out


def config_hash(cfg: ExperimentConfig, *, drive_amp: float | None = None,
                initial_state: int | None = None) -> str:
    """Short stable hash of the physics content of a config.

    ``out_dir`` and ``workers`` are excluded: they affect where results are
    written and how fast, never what is computed.  Passing ``drive_amp`` and
    ``initial_state`` hashes a single run within the sweep instead.
    """
    data = config_to_mapping(cfg)
    data.pop("out_dir")
    data.pop("workers")
    data.pop("preset", None)
    if drive_amp is not None:
        data["drive_amps"] = [drive_amp]
    if initial_state is not None:
        data["initial_states"] = [initial_state]
    blob = json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
