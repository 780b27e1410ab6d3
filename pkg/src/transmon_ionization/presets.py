"""Named experiment presets.

Each preset is expressed as a plain mapping in the same schema the YAML
loader accepts, so a config file can start from a preset and override
individual keys.  Two families are provided:

* ``main_paper`` and ``walter``: resonant readout-drive sweeps of two
  transmon samples, recording the full time evolution per amplitude.
* ``lz_kappa20`` / ``lz_kappa80``: the same main sample driven halfway
  between the two lowest dressed-branch frequencies, where the two branch
  responses separate cleanly; used for the semiclassical comparison maps at
  two different resonator decay rates.

All frequencies are cyclic GHz, times are ns.
"""

from __future__ import annotations

import dataclasses
import functools

from .branches import analyze_ladders, frequency_curve
from .dressed import SystemParams, dressed_spectrum
from .errors import UnknownPresetError
from .transmon import TransmonParams

__all__ = ["PRESET_NAMES", "preset_mapping", "preset_config", "lz_drive_frequency"]

PRESET_NAMES = ("main_paper", "walter", "lz_kappa20", "lz_kappa80")

#: sample A: E_J / E_C = 50
_MAIN_SYSTEM = {
    "e_c": 0.28,
    "e_j": 14.0,
    "omega_r": 7.5,
    "g": 0.25,
    "kappa": 0.02,
    "dim_t": 16,
    "dim_r": 32,
}

#: sample B: E_J / E_C = 55.47, deeper transmon read out at 4.804 GHz
_WALTER_SYSTEM = {
    "e_c": 0.314,
    "e_j": 0.314 * 55.47,
    "omega_r": 4.804,
    "g": 0.211,
    "kappa": 0.04,
    "dim_t": 16,
    "dim_r": 32,
}


@functools.lru_cache(maxsize=None)
def lz_drive_frequency() -> float:
    """Mean of the smoothed zero-photon branch frequencies of the main sample.

    Driving at (omega_0(0) + omega_1(0)) / 2 detunes the resonator response of
    the ground and excited branches symmetrically, which is the working point
    for the branch-separation sweeps.
    """
    params = SystemParams(
        transmon=TransmonParams(E_C=_MAIN_SYSTEM["e_c"], E_J=_MAIN_SYSTEM["e_j"]),
        omega_r=_MAIN_SYSTEM["omega_r"],
        g=_MAIN_SYSTEM["g"],
        dim_t=16,
        dim_r=24,
    )
    d = dressed_spectrum(params)
    branches, _ = analyze_ladders(d, n_branches=2, n_max=10)
    w0 = float(frequency_curve(branches[0])(0.0))
    w1 = float(frequency_curve(branches[1])(0.0))
    return 0.5 * (w0 + w1)


def _main_paper() -> dict:
    return {
        "system": dict(_MAIN_SYSTEM, drive_freq=_MAIN_SYSTEM["omega_r"]),
        "propagator": {
            "taylor_order": 10,
            "steps_per_drive_period": 75,
            "initial_dim_r": 16,
            "max_dim_r": 512,
            "dtype": "complex64",
        },
        "initial_states": [0, 1],
        "drive_amps": {"start": 0.0, "stop": 0.45, "count": 16},
        "t_end": 16.0,
        "outputs": ["timeseries", "wigner", "branches", "semiclassical", "delta_nr"],
        "wigner_times": [4.0, 8.0, 16.0],
        "out_dir": "runs/main_paper",
    }


def _walter() -> dict:
    return {
        "system": dict(_WALTER_SYSTEM, drive_freq=_WALTER_SYSTEM["omega_r"]),
        "propagator": {
            "taylor_order": 12,
            "steps_per_drive_period": 75,
            "initial_dim_r": 16,
            "max_dim_r": 128,
            "dtype": "complex64",
        },
        "initial_states": [1],
        "drive_amps": {"start": 0.02, "stop": 0.14, "count": 16},
        "t_end": 48.0,
        "outputs": ["timeseries", "branches"],
        "out_dir": "runs/walter",
    }


def _lz(kappa: float, tag: str) -> dict:
    return {
        "system": dict(
            _MAIN_SYSTEM, kappa=kappa, drive_freq=round(lz_drive_frequency(), 9)
        ),
        "propagator": {
            "taylor_order": 10,
            "steps_per_drive_period": 75,
            "initial_dim_r": 16,
            "max_dim_r": 512,
            "dtype": "complex64",
        },
        "initial_states": [0, 1],
        "drive_amps": {"start": 0.0, "stop": 0.45, "count": 16},
        "t_end": 16.0,
        "outputs": ["timeseries", "branches", "semiclassical", "delta_nr"],
        "out_dir": f"runs/{tag}",
    }


def preset_mapping(name: str) -> dict:
    """Plain-data document for a named preset (YAML schema)."""
    if name == "main_paper":
        return _main_paper()
    if name == "walter":
        return _walter()
    if name == "lz_kappa20":
        return _lz(0.02, "lz_kappa20")
    if name == "lz_kappa80":
        return _lz(0.08, "lz_kappa80")
    raise UnknownPresetError(
        f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
    )


def preset_config(name: str):
    """Validated :class:`~transmon_ionization.config.ExperimentConfig`."""
    from .config import config_from_mapping

    mapping = preset_mapping(name)
    mapping["preset"] = None  # the mapping already is the expansion
    cfg = config_from_mapping(mapping)
    return dataclasses.replace(cfg, preset=name)
