"""Classical cavity amplitude driven against a branch frequency curve.

Each resonator branch behaves as a driven, damped oscillator whose frequency
depends on its own photon number:

    d(alpha)/dt = -i [omega_i(|alpha|^2) - omega_d] alpha - i E/2 - kappa alpha / 2

All configured frequencies are cyclic (GHz); this module converts to angular
units internally, with time in nanoseconds.  Integration is a fixed-step
classical Runge-Kutta (RK4) so runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .branches import BranchFrequencyCurve
from .dressed import SystemParams
from .errors import DomainError, NonConvergenceError, RangeError

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SemiclassicalTrajectory:
    branch: int
    times: np.ndarray
    alpha: np.ndarray
    clamped: bool

    @property
    def n_photons(self) -> np.ndarray:
        return np.abs(self.alpha) ** 2


@dataclass(frozen=True)
class FlowField:
    """Trajectories from a set of seeds, with per-seed failures kept aside."""

    trajectories: list[SemiclassicalTrajectory]
    failures: list[tuple[complex, DomainError]]


def _drift(curve, p, drive_ang, alpha, clamp):
    omega, clamped = curve.evaluate(np.abs(alpha) ** 2, clamp=clamp)
    detuning = _TWO_PI * (omega - p.drive_freq)
    return (-1j * detuning - 0.5 * _TWO_PI * p.kappa) * alpha - 0.5j * drive_ang, clamped


def max_stable_dt(curve: BranchFrequencyCurve, p: SystemParams) -> float:
    """Step-size bound 1 / (20 max|omega_i - omega_d + kappa|) in ns."""
    rate = _TWO_PI * (np.max(np.abs(curve.omega_smoothed - p.drive_freq)) + p.kappa)
    return 1.0 / (20.0 * rate)


def integrate_branch_eom(
    curve: BranchFrequencyCurve,
    p: SystemParams,
    alpha0: complex | np.ndarray,
    t_end: float,
    dt: float,
    drive_amp: float | np.ndarray | None = None,
    clamp: bool = True,
) -> SemiclassicalTrajectory:
    """Fixed-step RK4 integration of the branch equation of motion.

    ``alpha0`` (and optionally ``drive_amp``, overriding the one in ``p``) may
    be arrays, in which case independent trajectories run in lockstep and the
    returned amplitude has shape (n_steps+1,) + alpha0.shape.  With
    ``clamp=False`` a photon number outside the curve's tabulated range raises
    DomainError instead of being clamped and flagged.
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("t_end and dt must be positive")
    if dt > max_stable_dt(curve, p) * (1 + 1e-12):
        raise ValueError(
            f"dt={dt:.4g} ns exceeds the stability bound "
            f"{max_stable_dt(curve, p):.4g} ns for this curve"
        )
    amp = p.drive_amp if drive_amp is None else drive_amp
    drive_ang = _TWO_PI * np.asarray(amp, dtype=float)

    n_steps = int(round(t_end / dt))
    alpha = np.asarray(alpha0, dtype=complex)
    out = np.empty((n_steps + 1,) + alpha.shape, dtype=complex)
    out[0] = alpha
    clamped = False
    try:
        for k in range(n_steps):
            k1, c1 = _drift(curve, p, drive_ang, alpha, clamp)
            k2, c2 = _drift(curve, p, drive_ang, alpha + 0.5 * dt * k1, clamp)
            k3, c3 = _drift(curve, p, drive_ang, alpha + 0.5 * dt * k2, clamp)
            k4, c4 = _drift(curve, p, drive_ang, alpha + dt * k3, clamp)
            alpha = alpha + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            out[k + 1] = alpha
            clamped = clamped or c1 or c2 or c3 or c4
    except RangeError as exc:
        raise DomainError(
            f"photon number left the tabulated curve range at step {k}: {exc}"
        ) from exc
    times = dt * np.arange(n_steps + 1)
    return SemiclassicalTrajectory(
        branch=curve.label, times=times, alpha=out, clamped=clamped
    )


def default_flow_seeds() -> np.ndarray:
    """Origin plus 8 points on the |alpha| = 1/2 circle (zero-point disk)."""
    angles = _TWO_PI * np.arange(8) / 8.0
    return np.concatenate(([0.0 + 0.0j], 0.5 * np.exp(1j * angles)))


def flow_field(
    curve: BranchFrequencyCurve,
    p: SystemParams,
    seeds: np.ndarray | None = None,
    t_end: float = 50.0,
    dt: float | None = None,
    clamp: bool = True,
) -> FlowField:
    """One trajectory per seed; seeds whose run leaves the curve domain are
    collected as failures rather than aborting the rest."""
    if seeds is None:
        seeds = default_flow_seeds()
    if dt is None:
        dt = 0.9 * max_stable_dt(curve, p)
    trajectories, failures = [], []
    for seed in np.asarray(seeds, dtype=complex):
        try:
            trajectories.append(
                integrate_branch_eom(curve, p, seed, t_end, dt, clamp=clamp)
            )
        except DomainError as exc:
            failures.append((complex(seed), exc))
    return FlowField(trajectories=trajectories, failures=failures)


def steady_state(
    curve: BranchFrequencyCurve,
    p: SystemParams,
    seeds: np.ndarray | None = None,
    residual_tol: float = 1e-10,
) -> complex:
    """Self-consistent amplitude with vanishing drift.

    Long integration from several seeds settles near the attractor(s); a
    damped fixed-point iteration then polishes each candidate until the drift
    residual, expressed in cyclic-frequency units, is below ``residual_tol``.
    If the seeds settle on more than one attractor (bistability) a
    NonConvergenceError carrying all of them is raised.
    """
    if seeds is None:
        kappa_ang = _TWO_PI * p.kappa
        seeds = np.concatenate(
            (default_flow_seeds(), [-1j * _TWO_PI * p.drive_amp / max(kappa_ang, 1e-12)])
        )
    dt = 0.9 * max_stable_dt(curve, p)
    t_settle = 20.0 / (_TWO_PI * p.kappa) if p.kappa > 0 else 200.0
    drive_ang = _TWO_PI * p.drive_amp
    kappa_ang = _TWO_PI * p.kappa

    def target(a: complex) -> complex:
        # fixed point of alpha = (-i E/2) / (i (omega - omega_d) + kappa/2)
        omega, _ = curve.evaluate(abs(a) ** 2)
        denom = 1j * _TWO_PI * (omega - p.drive_freq) + 0.5 * kappa_ang
        return (-0.5j * drive_ang) / denom

    def polish(alpha0: complex) -> complex:
        # The integration endpoint is already near an attractor; refine it
        # without leaving its neighborhood.  On steep curve flanks the plain
        # iteration has gain > 1 and would jump basins, so the mixing is
        # reduced until the iterate both stays local and converges.
        radius = 0.05 * (1.0 + abs(alpha0))
        for eta in (0.5, 0.05, 0.005):
            a = alpha0
            stayed = True
            for _ in range(int(60 / eta)):
                t = target(a)
                if abs(a - t) < 1e-14 + 1e-12 * abs(a):
                    return a
                a = (1.0 - eta) * a + eta * t
                if abs(a - alpha0) > radius:
                    stayed = False
                    break
            if stayed and abs(a - target(a)) < 1e-12 * max(1.0, abs(a)):
                return a
        return alpha0

    candidates = []
    for seed in np.asarray(seeds, dtype=complex):
        traj = integrate_branch_eom(curve, p, seed, t_settle, dt)
        candidates.append(polish(complex(traj.alpha[-1])))

    def residual(alpha: complex) -> float:
        omega, _ = curve.evaluate(abs(alpha) ** 2)
        drift = (
            -1j * _TWO_PI * (omega - p.drive_freq) * alpha
            - 0.5j * drive_ang
            - 0.5 * kappa_ang * alpha
        )
        return abs(drift) / _TWO_PI

    converged = [a for a in candidates if residual(a) < residual_tol]
    if not converged:
        raise NonConvergenceError(
            "no seed settled to a fixed point (oscillatory or marginal regime)",
            attractors=sorted(set(round(a.real, 6) + 1j * round(a.imag, 6) for a in candidates),
                              key=abs),
        )
    distinct: list[complex] = []
    for a in converged:
        if not any(abs(a - b) < 1e-5 * (1 + abs(b)) for b in distinct):
            distinct.append(a)
    if len(distinct) > 1:
        raise NonConvergenceError(
            f"{len(distinct)} attractors found (bistable regime)",
            attractors=sorted(distinct, key=abs),
        )
    return distinct[0]


def handoff_amplitude(
    traj: SemiclassicalTrajectory, n_resonance: float
) -> tuple[complex, float] | None:
    """Amplitude and time at which a trajectory first crosses a resonance
    photon number; None if it never does.  Used to launch a secondary-branch
    trajectory from the point where the primary one meets an avoided crossing.
    """
    n = traj.n_photons
    above = np.nonzero(n >= n_resonance)[0]
    if len(above) == 0:
        return None
    k = int(above[0])
    return complex(traj.alpha[k]), float(traj.times[k])


def population_difference(
    p: SystemParams,
    curve0: BranchFrequencyCurve,
    curve1: BranchFrequencyCurve,
    t_grid: np.ndarray,
    amp_grid: np.ndarray,
) -> np.ndarray:
    """Delta N_r(E, t) = |alpha_1|^2 - |alpha_0|^2, both started from vacuum.

    Returns an array of shape (len(amp_grid), len(t_grid)).  The time grid
    must be uniform starting at 0; the integrator subdivides it as needed.
    All amplitudes run in lockstep as one vectorized trajectory per branch.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    amp_grid = np.asarray(amp_grid, dtype=float)
    if len(t_grid) < 2 or t_grid[0] != 0.0:
        raise ValueError("t_grid must start at 0 and contain at least two points")
    spacing = t_grid[1] - t_grid[0]
    if not np.allclose(np.diff(t_grid), spacing):
        raise ValueError("t_grid must be uniform")

    bound = min(max_stable_dt(curve0, p), max_stable_dt(curve1, p))
    per_record = max(1, int(np.ceil(spacing / (0.9 * bound))))
    dt = spacing / per_record
    t_end = t_grid[-1]

    zeros = np.zeros(len(amp_grid), dtype=complex)
    n_traj = [
        integrate_branch_eom(c, p, zeros, t_end, dt, drive_amp=amp_grid).n_photons
        for c in (curve0, curve1)
    ]
    sel = np.arange(0, len(n_traj[0]), per_record)[: len(t_grid)]
    return (n_traj[1] - n_traj[0])[sel, :].T.copy()
