"""Driven transmon-resonator simulation: spectra, branch ladders, and
Lindblad time evolution with an adaptive resonator truncation.

The package is organized bottom-up:

* :mod:`.transmon` -- charge-basis transmon diagonalization
* :mod:`.dressed` -- static coupled spectrum without rotating-wave approximation
* :mod:`.branches` -- photon-number ladders and cross-branch resonances
* :mod:`.semiclassical` -- branch-following classical cavity dynamics
* :mod:`.propagator` -- Lindblad master equation in the drive frame
* :mod:`.observables` -- populations, purity, Wigner functions
* :mod:`.config` / :mod:`.presets` / :mod:`.harness` / :mod:`.cli` -- sweeps
"""

from .branches import (
    Branch,
    BranchFrequencyCurve,
    ResonanceReport,
    analyze_ladders,
    frequency_curve,
    identify_branches,
)
from .config import ExperimentConfig, load_config
from .dressed import (
    SystemParams,
    critical_photon_number,
    dispersive_shift,
    dressed_spectrum,
)
from .errors import SimulationError
from .harness import RunManifest, export_figure_data, run_preset, run_sweep
from .observables import populations, purity, reduce_resonator, reduce_transmon, wigner
from .propagator import (
    DensityMatrix,
    PropagatorConfig,
    TimeSeries,
    evolve,
    initial_state,
)
from .semiclassical import flow_field, population_difference, steady_state
from .transmon import TransmonParams, TransmonSpectrum, diagonalize_transmon

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "BranchFrequencyCurve",
    "DensityMatrix",
    "ExperimentConfig",
    "PropagatorConfig",
    "ResonanceReport",
    "RunManifest",
    "SimulationError",
    "SystemParams",
    "TimeSeries",
    "TransmonParams",
    "TransmonSpectrum",
    "analyze_ladders",
    "critical_photon_number",
    "diagonalize_transmon",
    "dispersive_shift",
    "dressed_spectrum",
    "evolve",
    "export_figure_data",
    "flow_field",
    "frequency_curve",
    "identify_branches",
    "initial_state",
    "load_config",
    "population_difference",
    "populations",
    "purity",
    "reduce_resonator",
    "reduce_transmon",
    "run_preset",
    "run_sweep",
    "steady_state",
    "wigner",
]
