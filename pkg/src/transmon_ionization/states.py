"""Small constructors for Fock-space kets used across the package."""

from __future__ import annotations

import numpy as np

from .errors import DimensionError


def fock_state(dim: int, n: int) -> np.ndarray:
    if not 0 <= n < dim:
        raise DimensionError(f"Fock label {n} outside [0, {dim})")
    ket = np.zeros(dim, dtype=complex)
    ket[n] = 1.0
    return ket


def coherent_state(dim: int, alpha: complex) -> np.ndarray:
    """Truncated coherent state, renormalized on the truncated space.

    The Poisson tail beyond the truncation must be negligible for expectation
    values to be meaningful; callers should keep |alpha|^2 well below dim.
    """
    n = np.arange(dim)
    # amplitudes alpha^n / sqrt(n!) via logs to avoid overflow at large n
    with np.errstate(divide="ignore"):
        log_mag = n * np.log(np.abs(alpha)) if alpha != 0 else np.where(n == 0, 0.0, -np.inf)
    log_norm = 0.5 * np.cumsum(np.log(np.maximum(n, 1)))
    mag = np.exp(log_mag - log_norm - 0.5 * np.abs(alpha) ** 2)
    phase = np.exp(1j * n * np.angle(alpha)) if alpha != 0 else np.ones(dim)
    ket = mag * phase
    return ket / np.linalg.norm(ket)


def product_density(ket_t: np.ndarray, ket_r: np.ndarray) -> np.ndarray:
    """Joint density matrix |ket_t x ket_r><...| in the (transmon, resonator) order."""
    joint = np.kron(ket_t, ket_r)
    return np.outer(joint, joint.conj())
