"""Exception types shared across the package."""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ConvergenceError(SimulationError):
    """An iterative eigensolver failed to converge."""


class CutoffError(SimulationError):
    """A basis cutoff is too small for the states that were requested."""


class DimensionError(SimulationError):
    """A requested Hilbert-space dimension is invalid or too large."""


class IdentificationError(SimulationError):
    """Branch seeding could not uniquely associate eigenstates with labels."""


class ExhaustionError(SimulationError):
    """A branch ladder ran out of unassigned eigenstates before n_max."""


class RangeError(SimulationError):
    """A photon-number argument lies outside the tabulated ladder."""


class DomainError(SimulationError):
    """A trajectory left the domain of an interpolated frequency curve."""


class NonConvergenceError(SimulationError):
    """A fixed-point search did not settle onto a single attractor.

    Carries the list of candidate attractors found from different seeds.
    """

    def __init__(self, message, attractors=None):
        super().__init__(message)
        self.attractors = attractors if attractors is not None else []


class RootFindingError(SimulationError):
    """Polynomial root finding failed or did not pass reconstruction."""


class NumericalBlowupError(SimulationError):
    """An intermediate state in the propagator exceeded the stability bound."""


class MaxDimensionError(SimulationError):
    """Adaptive resizing would exceed the configured resonator dimension cap."""


class TruncationError(SimulationError):
    """The resonator truncation is insufficient for a requested evaluation."""


class ConfigError(SimulationError):
    """A configuration file failed to parse or validate."""


class ParseError(ConfigError):
    """A configuration file is not syntactically valid."""


class ValidationError(ConfigError):
    """A configuration value is missing, unknown, or out of range.

    The message starts with the dotted path of the offending field.
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class UnknownPresetError(ConfigError):
    """An unknown preset name was requested."""


class MissingRunError(SimulationError):
    """A figure export needs runs that are absent from the manifest."""
