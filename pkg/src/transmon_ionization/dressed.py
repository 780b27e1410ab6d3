"""Static transmon-resonator system without rotating-wave approximation.

The joint Hamiltonian is

    H = sum_i E_i |i><i| x 1  +  1 x w_r a^dag a  -  i g n_t x (a - a^dag)

with the transmon truncated to its lowest ``dim_t`` eigenstates and the
resonator to ``dim_r`` Fock states.  All frequencies and energies are cyclic
(over 2 pi) in GHz; conversions to angular units happen only inside the
dynamic modules (propagator, semiclassical).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ConvergenceError
from .transmon import TransmonParams, TransmonSpectrum, diagonalize_transmon

__all__ = [
    "SystemParams",
    "DressedSpectrum",
    "destroy",
    "build_static_hamiltonian",
    "dressed_spectrum",
    "dispersive_shift",
    "critical_photon_number",
]

#: dense diagonalization above this joint dimension is refused
_MAX_DENSE_DIM = 8192


@dataclass(frozen=True)
class SystemParams:
    """Transmon, resonator, coupling, drive and decay parameters.

    All frequencies are cyclic frequencies over 2 pi in GHz; ``kappa`` is the
    resonator decay rate over 2 pi in GHz; ``drive_amp`` is the drive
    amplitude (epsilon) in the same units.
    """

    transmon: TransmonParams
    omega_r: float
    g: float
    kappa: float = 0.0
    drive_amp: float = 0.0
    drive_freq: float = 0.0
    dim_t: int = 16
    dim_r: int = 16

    def __post_init__(self):
        if self.omega_r <= 0:
            raise ValueError(f"omega_r must be positive, got {self.omega_r}")
        if self.kappa < 0 or self.drive_amp < 0 or self.drive_freq < 0:
            raise ValueError("kappa, drive_amp and drive_freq must be non-negative")
        if self.dim_t < 2 or self.dim_r < 2:
            raise DimensionError(f"dim_t={self.dim_t}, dim_r={self.dim_r} must be >= 2")

    @property
    def dim(self) -> int:
        return self.dim_t * self.dim_r


@dataclass(frozen=True)
class DressedSpectrum:
    """Sorted eigensystem of the static coupled Hamiltonian.

    ``states[:, k]`` is the k-th eigenvector in the product basis
    ``|transmon i> x |Fock n>`` with the row index ``i * dim_r + n``.
    The phase convention matches the transmon module: the largest-magnitude
    component of each eigenvector is real positive.
    """

    params: SystemParams
    transmon: TransmonSpectrum
    energies: np.ndarray
    states: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.energies)

    def product_overlaps(self, i: int, n: int) -> np.ndarray:
        """|<eigenstate k | i, n>|^2 for all k."""
        row = i * self.params.dim_r + n
        return np.abs(self.states[row, :]) ** 2


def destroy(dim: int) -> np.ndarray:
    """Truncated annihilation operator."""
    a = np.zeros((dim, dim))
    ar = np.arange(1, dim)
    a[ar - 1, ar] = np.sqrt(ar)
    return a


def build_static_hamiltonian(p: SystemParams, spectrum: TransmonSpectrum | None = None) -> np.ndarray:
    """Dense complex-Hermitian joint Hamiltonian in the product basis.

    The drive does not enter; this is the undriven Hamiltonian whose
    eigensystem defines the dressed states and ladder branches.
    """
    if p.dim > _MAX_DENSE_DIM:
        raise DimensionError(
            f"joint dimension {p.dim} exceeds dense-diagonalization cap {_MAX_DENSE_DIM}"
        )
    if spectrum is None:
        spectrum = diagonalize_transmon(p.transmon, p.dim_t)
    if spectrum.n_levels != p.dim_t:
        raise DimensionError("transmon spectrum dimension does not match dim_t")

    a = destroy(p.dim_r)
    n_fock = np.diag(np.arange(p.dim_r, dtype=float))
    ident_r = np.eye(p.dim_r)

    h = np.kron(np.diag(spectrum.energies), ident_r).astype(complex)
    h += np.kron(np.eye(p.dim_t), p.omega_r * n_fock)
    h += -1j * p.g * np.kron(spectrum.n_matrix, a - a.T)
    return h


def dressed_spectrum(p: SystemParams, spectrum: TransmonSpectrum | None = None) -> DressedSpectrum:
    """Diagonalize the static joint Hamiltonian.

    Returns eigenvalues ascending with deterministically phased eigenvectors.
    """
    if spectrum is None:
        spectrum = diagonalize_transmon(p.transmon, p.dim_t)
    h = build_static_hamiltonian(p, spectrum)
    try:
        energies, states = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise ConvergenceError(f"joint eigensolver failed: {exc}") from exc

    idx = np.argmax(np.abs(states), axis=0)
    lead = states[idx, np.arange(states.shape[1])]
    phase = np.where(np.abs(lead) > 0, lead / np.abs(lead), 1.0)
    states = states / phase[np.newaxis, :]
    return DressedSpectrum(params=p, transmon=spectrum, energies=energies, states=states)


def _dressed_index(d: DressedSpectrum, i: int, n: int) -> int:
    """Eigenstate index with largest overlap on the product state |i, n>."""
    return int(np.argmax(d.product_overlaps(i, n)))


def dispersive_shift(d: DressedSpectrum) -> float:
    """Dispersive shift chi in GHz.

    chi = (E_{1,1} - E_{1,0} - E_{0,1} + E_{0,0}) / 2 with indices picked by
    maximum product-state overlap, i.e. half the difference between the
    resonator frequency pulled by the excited and ground transmon states.
    """
    e = d.energies
    e11 = e[_dressed_index(d, 1, 1)]
    e10 = e[_dressed_index(d, 1, 0)]
    e01 = e[_dressed_index(d, 0, 1)]
    e00 = e[_dressed_index(d, 0, 0)]
    return float((e11 - e10 - e01 + e00) / 2.0)


def critical_photon_number(p: SystemParams, s: TransmonSpectrum) -> float:
    """Dispersive-regime critical photon number (Delta / 2 g')^2.

    Uses the computed qubit splitting for Delta = omega_01 - omega_r and the
    charge-matrix-element enhanced coupling g' = (E_J / 32 E_C)^(1/4) g.
    """
    delta = s.omega_01 - p.omega_r
    g_prime = (p.transmon.E_J / (32.0 * p.transmon.E_C)) ** 0.25 * p.g
    if g_prime == 0:
        raise ValueError("critical photon number undefined for g = 0")
    return float((delta / (2.0 * g_prime)) ** 2)
