"""Bare transmon spectrum in the charge basis.

The transmon Hamiltonian ``4 E_C n^2 - E_J cos(phi)`` is represented in the
charge basis ``|m>``, ``m = -M..M``, where ``cos(phi)`` couples neighbouring
charge states.  Energies are measured in GHz (h = 1) and are kept *raw*, i.e.
referenced such that the bottom of the cosine potential sits at ``-E_J``.
States below the barrier top ``+E_J`` are the bound (qubit-like) levels; the
rest are free-rotor-like states relevant for ionization.

The offset charge is fixed to zero: the interesting levels are deep enough
that their charge dispersion is negligible, and zero offset makes parity an
exact symmetry which we exploit for checks of the charge matrix elements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, CutoffError, DimensionError

__all__ = [
    "TransmonParams",
    "TransmonSpectrum",
    "build_charge_hamiltonian",
    "diagonalize_transmon",
    "plasma_frequency",
    "count_bound_states",
]

#: weight on the outermost charge states above which the cutoff is unsafe
_EDGE_WEIGHT_TOL = 1e-6

#: eigenvalue gap below which two levels are treated as degenerate
_DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class TransmonParams:
    """Charging energy, Josephson energy (GHz) and charge-basis cutoff.

    ``charge_cutoff`` is the maximum |m| kept, so the basis has
    ``2 * charge_cutoff + 1`` states.
    """

    E_C: float
    E_J: float
    charge_cutoff: int = 32

    def __post_init__(self):
        if self.E_C <= 0:
            raise ValueError(f"E_C must be positive, got {self.E_C}")
        if self.E_J < 0:
            raise ValueError(f"E_J must be non-negative, got {self.E_J}")
        if self.charge_cutoff < 4:
            raise DimensionError(f"charge_cutoff too small: {self.charge_cutoff}")


@dataclass(frozen=True)
class TransmonSpectrum:
    """Eigenbasis data for the lowest transmon levels.

    Attributes
    ----------
    params : TransmonParams
        Parameters the spectrum was computed from.
    energies : ndarray, shape (n_keep,)
        Raw eigenenergies in GHz, ascending; the potential minimum is -E_J.
    n_matrix : ndarray, shape (n_keep, n_keep)
        Charge operator matrix elements <i|n|j> in the eigenbasis.
    parities : ndarray, shape (n_keep,)
        Parity of each eigenstate under m -> -m (+1 or -1).
    """

    params: TransmonParams
    energies: np.ndarray
    n_matrix: np.ndarray
    parities: np.ndarray

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    def energies_from_ground(self) -> np.ndarray:
        """Eigenenergies shifted so the ground state sits at zero."""
        return self.energies - self.energies[0]

    @property
    def omega_01(self) -> float:
        """Qubit splitting E_1 - E_0 in GHz."""
        return float(self.energies[1] - self.energies[0])


def build_charge_hamiltonian(p: TransmonParams) -> np.ndarray:
    """Dense real-symmetric transmon Hamiltonian in the charge basis.

    The diagonal is ``4 E_C m^2`` and ``cos(phi)`` appears as
    ``(|m><m+1| + h.c.) / 2``, giving off-diagonal entries ``-E_J / 2``.
    """
    m = np.arange(-p.charge_cutoff, p.charge_cutoff + 1, dtype=float)
    dim = len(m)
    h = np.zeros((dim, dim))
    h[np.arange(dim), np.arange(dim)] = 4.0 * p.E_C * m**2
    h[np.arange(dim - 1), np.arange(1, dim)] = -p.E_J / 2.0
    h[np.arange(1, dim), np.arange(dim - 1)] = -p.E_J / 2.0
    return h


def plasma_frequency(p: TransmonParams) -> float:
    """Plasma frequency sqrt(8 E_C E_J) in GHz."""
    return float(np.sqrt(8.0 * p.E_C * p.E_J))


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each eigenvector real positive."""
    idx = np.argmax(np.abs(vecs), axis=0)
    lead = vecs[idx, np.arange(vecs.shape[1])]
    # real input: this reduces to a sign flip
    phase = np.where(np.abs(lead) > 0, lead / np.abs(lead), 1.0)
    return vecs / phase[np.newaxis, :]


def _order_degenerate(energies: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Reorder eigenvectors inside degenerate groups by mean charge.

    Only relevant at E_J = 0 where +/-m pairs are exactly degenerate and the
    eigensolver may return them in either order; we pin ascending <m>.
    """
    cutoff = (vecs.shape[0] - 1) // 2
    m = np.arange(-cutoff, cutoff + 1, dtype=float)
    order = np.arange(len(energies))
    start = 0
    while start < len(energies):
        stop = start + 1
        while stop < len(energies) and energies[stop] - energies[stop - 1] < _DEGENERACY_TOL:
            stop += 1
        if stop - start > 1:
            mean_m = [float(m @ (np.abs(vecs[:, k]) ** 2)) for k in order[start:stop]]
            order[start:stop] = order[start:stop][np.argsort(mean_m, kind="stable")]
        start = stop
    return order


def diagonalize_transmon(p: TransmonParams, n_keep: int) -> TransmonSpectrum:
    """Diagonalize the charge-basis Hamiltonian and keep the lowest levels.

    Parameters
    ----------
    p : TransmonParams
    n_keep : int
        Number of eigenstates to keep (the joint-system transmon dimension).

    Returns
    -------
    TransmonSpectrum

    Raises
    ------
    DimensionError
        If ``n_keep`` exceeds the basis size or the cutoff is below twice
        the number of requested levels.
    CutoffError
        If the highest kept eigenvector has weight above 1e-6 on the
        outermost charge states, i.e. the cutoff truncates it.
    ConvergenceError
        If the underlying eigensolver fails.
    """
    dim = 2 * p.charge_cutoff + 1
    if n_keep < 1 or n_keep > dim:
        raise DimensionError(f"n_keep={n_keep} outside 1..{dim}")
    if p.charge_cutoff < 2 * n_keep:
        raise DimensionError(
            f"charge_cutoff={p.charge_cutoff} < 2 * n_keep={2 * n_keep}; enlarge the basis"
        )

    h = build_charge_hamiltonian(p)
    try:
        energies, vecs = scipy.linalg.eigh(h)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise ConvergenceError(f"charge-basis eigensolver failed: {exc}") from exc

    order = _order_degenerate(energies, vecs)
    energies = energies[order]
    vecs = vecs[:, order]

    vecs = _fix_phases(vecs[:, :n_keep])
    energies = energies[:n_keep].copy()

    edge_weight = float(np.abs(vecs[0, -1]) ** 2 + np.abs(vecs[-1, -1]) ** 2)
    if edge_weight > _EDGE_WEIGHT_TOL:
        raise CutoffError(
            f"highest kept state has weight {edge_weight:.2e} on the edge charge "
            f"states; raise charge_cutoff above {p.charge_cutoff}"
        )

    m = np.arange(-p.charge_cutoff, p.charge_cutoff + 1, dtype=float)
    n_matrix = vecs.T @ (m[:, np.newaxis] * vecs)
    n_matrix = 0.5 * (n_matrix + n_matrix.T)  # n is Hermitian and real here

    # parity under m -> -m; eigenstates at zero offset charge are parity eigenstates
    flipped = vecs[::-1, :]
    overlap = np.einsum("mi,mi->i", flipped, vecs)
    parities = np.where(overlap >= 0, 1, -1).astype(int)

    return TransmonSpectrum(params=p, energies=energies, n_matrix=n_matrix, parities=parities)


def count_bound_states(s: TransmonSpectrum) -> int:
    """Number of well-resolved levels below the top of the cosine barrier.

    Raw energies are referenced so the potential minimum is ``-E_J`` and the
    barrier top is ``+E_J``.  A level within half a local level spacing of
    the barrier top lives in the separatrix layer and is not counted; this
    matches the semiclassical capacity of the well, (4/pi) sqrt(E_J / 2 E_C).
    """
    top = s.params.E_J
    count = 0
    for i, e in enumerate(s.energies):
        if e >= top:
            break
        if i + 1 < len(s.energies) and e + 0.5 * (s.energies[i + 1] - e) >= top:
            break
        count += 1
    return count
