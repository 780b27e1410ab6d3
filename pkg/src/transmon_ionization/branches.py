"""Ladder branches of the dressed spectrum and their effective frequencies.

A branch {i} is the set of dressed states reached from the zero-photon seed
|i, 0> by repeatedly adding one resonator excitation.  The next rung above
|i(bar), n> is the eigenstate maximizing the normalized overlap

    C_i(n) = | <lambda| a^dag |i(bar), n>  /  <i(bar), n| a a^dag |i(bar), n> |^2

over the eigenstates not yet assigned to any branch.  At g = 0 this yields
product states with C_i(n) = 1/(n+1); strong hybridization shows up as a
reduced C and as leakage of the one-excitation image into *other* branches,
which is how multiphoton resonances between ladders are detected.

Resonance detection convention: normalizing the squared raising overlaps by
<a a^dag> turns them into fractions that sum to one over a complete basis, so
"how much of branch i's next rung actually lands on branch j" is a
well-defined probability.  An avoided crossing between ladders spreads that
leak over a number of consecutive rungs proportional to its width, so the
reported value integrates the per-rung leak over the same short odd window
used for frequency smoothing; narrow and broad features are then measured on
the same footing, which mirrors how sharp (diabatic) and wide (adiabatic)
crossings play opposite roles in the ring-up dynamics.

The effective branch frequency is the rung spacing omega_i(n) = E_{n+1} - E_n,
lightly smoothed for use in the semiclassical model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dressed import DressedSpectrum
from .errors import DimensionError, ExhaustionError, IdentificationError, RangeError

__all__ = [
    "Branch",
    "BranchFrequencyCurve",
    "ResonanceEntry",
    "ResonanceReport",
    "seed_branches",
    "identify_branches",
    "cross_branch_overlaps",
    "analyze_ladders",
    "branch_frequency",
    "smooth_frequency_curve",
    "frequency_curve",
]

_TIE_TOL = 1e-12


@dataclass(frozen=True)
class Branch:
    """One identified ladder.

    ``eigenstate_indices[n]`` is the index (into the dressed spectrum) of the
    rung with photon label n; ``ladder_overlaps[n]`` is C_i(n) for the step
    n -> n+1.  ``mean_photon`` and ``mean_transmon`` are <a^dag a> and the
    mean bare transmon level of each rung.
    """

    label: int
    eigenstate_indices: np.ndarray
    energies: np.ndarray
    ladder_overlaps: np.ndarray
    mean_photon: np.ndarray
    mean_transmon: np.ndarray
    seed_overlap: float

    @property
    def n_max(self) -> int:
        return len(self.eigenstate_indices) - 1


@dataclass(frozen=True)
class ResonanceEntry:
    branch_a: int
    branch_b: int
    n: int
    overlap: float


@dataclass(frozen=True)
class ResonanceReport:
    """Cross-branch leak fractions above threshold, sorted by photon label.

    ``entries`` holds (source branch, destination branch, source rung n,
    window-integrated leak fraction); see the module docstring for the
    convention.
    """

    threshold: float
    window: int
    entries: tuple[ResonanceEntry, ...]

    def for_pair(self, i: int, j: int) -> list[ResonanceEntry]:
        """Entries linking branches i and j, either direction."""
        pair = {i, j}
        return [e for e in self.entries if {e.branch_a, e.branch_b} == pair]

    def strongest(self, i: int, j: int) -> ResonanceEntry | None:
        entries = self.for_pair(i, j)
        if not entries:
            return None
        return max(entries, key=lambda e: e.overlap)


def _raising_overlap_matrix(d: DressedSpectrum) -> np.ndarray:
    """A[k, s] = <k| a^dag |s> between eigenstates of the joint Hamiltonian."""
    dim_t, dim_r = d.params.dim_t, d.params.dim_r
    v = d.states.reshape(dim_t, dim_r, -1)
    w = np.zeros_like(v)
    sq = np.sqrt(np.arange(1, dim_r))
    # (a^dag v)[n] = sqrt(n) v[n-1]
    w[:, 1:, :] = sq[np.newaxis, :, np.newaxis] * v[:, :-1, :]
    return d.states.conj().T @ w.reshape(-1, d.dim)


def _aadag_expectation(d: DressedSpectrum, state_index: int) -> float:
    """<s| a a^dag |s> from the Fock-resolved weights of the eigenvector."""
    dim_t, dim_r = d.params.dim_t, d.params.dim_r
    weights = np.abs(d.states[:, state_index].reshape(dim_t, dim_r)) ** 2
    return float(np.sum(weights * (np.arange(dim_r) + 1.0)[np.newaxis, :]))


def seed_branches(d: DressedSpectrum, n_branches: int) -> tuple[np.ndarray, np.ndarray]:
    """Associate each transmon level with the eigenstate closest to |i, 0>.

    Returns (indices, overlaps).  Raises IdentificationError if two levels
    select the same eigenstate, which happens when the coupling is strong
    enough that zero-photon states lose their transmon character.
    """
    if n_branches > d.params.dim_t:
        raise DimensionError(f"n_branches={n_branches} exceeds dim_t={d.params.dim_t}")
    indices = np.empty(n_branches, dtype=int)
    overlaps = np.empty(n_branches)
    for i in range(n_branches):
        ov = d.product_overlaps(i, 0)
        indices[i] = int(np.argmax(ov))
        overlaps[i] = float(ov[indices[i]])
    if len(set(indices.tolist())) != n_branches:
        raise IdentificationError(
            "zero-photon seeds are not unique; branch labels are ill-defined "
            f"(indices {indices.tolist()})"
        )
    return indices, overlaps


def _rung_populations(d: DressedSpectrum, state_index: int) -> tuple[float, float]:
    dim_t, dim_r = d.params.dim_t, d.params.dim_r
    w = np.abs(d.states[:, state_index].reshape(dim_t, dim_r)) ** 2
    mean_n = float(np.sum(w.sum(axis=0) * np.arange(dim_r)))
    mean_i = float(np.sum(w.sum(axis=1) * np.arange(dim_t)))
    return mean_n, mean_i


def analyze_ladders(
    d: DressedSpectrum,
    n_branches: int,
    n_max: int,
    threshold: float = 0.01,
    window: int = 5,
) -> tuple[list[Branch], ResonanceReport]:
    """Identify all branches and collect their cross-branch leak fractions.

    The raising-operator overlap matrix is computed once and shared between
    identification and resonance detection; use this instead of calling
    ``identify_branches`` and ``cross_branch_overlaps`` separately when the
    joint dimension is large.  ``window`` is the odd integration width for the
    reported leak (see module docstring).
    """
    needed = n_branches * (n_max + 1)
    if needed > d.dim:
        raise DimensionError(
            f"{n_branches} branches x {n_max + 1} rungs = {needed} states, but the "
            f"spectrum only has {d.dim}"
        )

    big_a = _raising_overlap_matrix(d)
    abs_a2 = np.abs(big_a) ** 2
    energies = d.energies
    omega_r = d.params.omega_r

    seed_idx, seed_ov = seed_branches(d, n_branches)
    assigned = np.zeros(d.dim, dtype=bool)
    assigned[seed_idx] = True

    all_indices = np.empty((n_branches, n_max + 1), dtype=int)
    all_overlaps = np.empty((n_branches, n_max))
    all_indices[:, 0] = seed_idx

    denom = np.empty((n_branches, n_max + 1))
    for i in range(n_branches):
        for n in range(n_max):
            s = all_indices[i, n]
            dnm = _aadag_expectation(d, s)
            denom[i, n] = dnm
            num = abs_a2[:, s].copy()
            num[assigned] = -1.0
            best = int(np.argmax(num))
            # break near-ties toward the energy expected one rung up
            ties = np.nonzero(num >= num[best] - _TIE_TOL * max(num[best], 1.0))[0]
            if len(ties) > 1:
                target = energies[s] + omega_r
                best = int(ties[np.argmin(np.abs(energies[ties] - target))])
            if num[best] < 0:
                raise ExhaustionError(
                    f"no unassigned eigenstate left for branch {i} at rung {n + 1}"
                )
            all_indices[i, n + 1] = best
            all_overlaps[i, n] = num[best] / dnm**2
            assigned[best] = True
        denom[i, n_max] = _aadag_expectation(d, all_indices[i, n_max])

    branches = []
    for i in range(n_branches):
        idx = all_indices[i]
        pops = np.array([_rung_populations(d, s) for s in idx])
        branches.append(
            Branch(
                label=i,
                eigenstate_indices=idx.copy(),
                energies=energies[idx].copy(),
                ladder_overlaps=all_overlaps[i].copy(),
                mean_photon=pops[:, 0].copy(),
                mean_transmon=pops[:, 1].copy(),
                seed_overlap=float(seed_ov[i]),
            )
        )

    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be a positive odd integer, got {window}")

    # Per-rung leak: the fraction of the normalized image a^dag|i(bar), n>
    # captured by the eigenstates assigned to each other branch.
    owner = np.full(d.dim, -1, dtype=int)
    for j in range(n_branches):
        owner[all_indices[j]] = j
    mask = owner >= 0

    entries = []
    half = window // 2
    for i in range(n_branches):
        src = all_indices[i, :n_max]
        frac = abs_a2[:, src] / denom[i, :n_max][np.newaxis, :]
        leak = np.zeros((n_branches, n_max))
        np.add.at(leak, owner[mask], frac[mask, :])
        leak[i, :] = 0.0
        csum = np.concatenate(
            (np.zeros((n_branches, 1)), np.cumsum(leak, axis=1)), axis=1
        )
        for n in range(n_max):
            h = min(half, n, n_max - 1 - n)  # symmetric shrink, as in smoothing
            integrated = csum[:, n + h + 1] - csum[:, n - h]
            for j in np.nonzero(integrated > threshold)[0]:
                if j != i:
                    entries.append(ResonanceEntry(i, int(j), int(n), float(integrated[j])))

    entries.sort(key=lambda e: (e.n, e.branch_a, e.branch_b))
    report = ResonanceReport(threshold=threshold, window=window, entries=tuple(entries))
    return branches, report


def identify_branches(d: DressedSpectrum, n_branches: int, n_max: int) -> list[Branch]:
    """Recursively assign eigenstates to ladder branches (see module doc)."""
    branches, _ = analyze_ladders(d, n_branches, n_max)
    return branches


def cross_branch_overlaps(
    d: DressedSpectrum,
    n_branches: int,
    n_max: int,
    threshold: float = 0.01,
    window: int = 5,
) -> ResonanceReport:
    """Report where a branch's raising overlap leaks into other branches."""
    _, report = analyze_ladders(d, n_branches, n_max, threshold, window)
    return report


def branch_frequency(branch: Branch) -> np.ndarray:
    """Rung spacings omega_i(n) = E_{n+1} - E_n in GHz, n = 0..n_max-1."""
    return np.diff(branch.energies)


def smooth_frequency_curve(values: np.ndarray, window: int = 5) -> np.ndarray:
    """First-order Savitzky-Golay smoothing (moving average on a uniform grid).

    A linear least-squares fit over a symmetric window, evaluated at the
    center, reduces to the window mean; near the edges the window shrinks
    symmetrically, so constants and straight lines are reproduced exactly.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be a positive odd integer, got {window}")
    values = np.asarray(values, dtype=float)
    half = window // 2
    out = np.empty_like(values)
    csum = np.concatenate(([0.0], np.cumsum(values)))
    for k in range(len(values)):
        h = min(half, k, len(values) - 1 - k)
        out[k] = (csum[k + h + 1] - csum[k - h]) / (2 * h + 1)
    return out


@dataclass(frozen=True)
class BranchFrequencyCurve:
    """Smoothed effective frequency of one branch with linear interpolation.

    Callable on real photon numbers in [0, n_max - 1].  Outside that range the
    value is clamped to the endpoints; ``evaluate`` reports whether clamping
    happened, and raises RangeError instead when ``clamp=False``.
    """

    label: int
    n_grid: np.ndarray
    omega_raw: np.ndarray
    omega_smoothed: np.ndarray
    window: int

    def evaluate(self, n_photon, clamp: bool = True):
        x = np.asarray(n_photon, dtype=float)
        clamped = bool(np.any(x < self.n_grid[0]) or np.any(x > self.n_grid[-1]))
        if clamped and not clamp:
            raise RangeError(
                f"photon number outside tabulated range [0, {self.n_grid[-1]:.0f}]"
            )
        return np.interp(x, self.n_grid, self.omega_smoothed), clamped

    def __call__(self, n_photon):
        value, _ = self.evaluate(n_photon, clamp=True)
        return value


def frequency_curve(branch: Branch, window: int = 5) -> BranchFrequencyCurve:
    """Smoothed omega_i(n) curve for one branch."""
    raw = branch_frequency(branch)
    return BranchFrequencyCurve(
        label=branch.label,
        n_grid=np.arange(len(raw), dtype=float),
        omega_raw=raw,
        omega_smoothed=smooth_frequency_curve(raw, window),
        window=window,
    )
