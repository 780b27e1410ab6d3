"""Reduced states and the quantities recorded during time evolution.

Everything here is a pure function of a density matrix.  The joint state is
stored with the transmon index major and the resonator Fock index minor, so a
joint matrix reshapes to (dim_t, dim_r, dim_t, dim_r) and partial traces are
single contractions.  Transmon level populations are reported in the bare
transmon eigenbasis, which is the storage basis of the joint state; an
alternative single-mode basis can be supplied for the level-resolved numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, TruncationError

_WIGNER_BOUND = 2.0 / np.pi


def _as_joint(rho: np.ndarray, dim_t: int, dim_r: int) -> np.ndarray:
    dim = dim_t * dim_r
    if rho.shape == (dim, dim):
        return rho.reshape(dim_t, dim_r, dim_t, dim_r)
    if rho.shape == (dim_t, dim_r, dim_t, dim_r):
        return rho
    raise DimensionError(
        f"density matrix shape {rho.shape} does not match dims ({dim_t}, {dim_r})"
    )


def reduce_transmon(rho: np.ndarray, dim_t: int, dim_r: int) -> np.ndarray:
    """Trace out the resonator."""
    return np.einsum("injn->ij", _as_joint(rho, dim_t, dim_r))


def reduce_resonator(rho: np.ndarray, dim_t: int, dim_r: int) -> np.ndarray:
    """Trace out the transmon."""
    return np.einsum("inim->nm", _as_joint(rho, dim_t, dim_r))


@dataclass(frozen=True)
class Populations:
    """Mean photon number, mean transmon level, and per-level weights."""

    n_r: float
    n_t: float
    levels: np.ndarray


def populations(
    rho: np.ndarray,
    dim_t: int,
    dim_r: int,
    level_basis: np.ndarray | None = None,
) -> Populations:
    """N_r = <a^dag a>, N_t = sum_i i p_i, and the level weights p_i.

    ``level_basis`` optionally holds alternative single-transmon basis vectors
    as columns; by default the storage (bare eigen-) basis is used.
    """
    joint = _as_joint(rho, dim_t, dim_r)
    rho_t = np.einsum("injn->ij", joint)
    diag_r = np.einsum("inin->n", joint).real
    n_r = float(diag_r @ np.arange(dim_r))
    if level_basis is None:
        levels = np.diag(rho_t).real.copy()
    else:
        levels = np.einsum("ji,jk,ki->i", level_basis.conj(), rho_t, level_basis).real
    n_t = float(levels @ np.arange(len(levels)))
    return Populations(n_r=n_r, n_t=n_t, levels=levels)


def purity(rho_t: np.ndarray) -> float:
    """Tr[rho^2] of a reduced state; 1 for pure, 1/d for maximally mixed."""
    return float(np.einsum("ij,ji->", rho_t, rho_t).real)


@dataclass(frozen=True)
class WignerGrid:
    """W sampled on a rectangular grid of beta = re + i*im.

    ``values[j, k]`` is W at re_axis[k] + i*im_axis[j], normalized so that
    integrating over the plane gives one; values lie in [-2/pi, 2/pi].
    """

    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray

    def mass(self) -> float:
        """Trapezoidal integral over the grid; close to 1 only when the grid
        covers the support of the state."""
        trapezoid = getattr(np, "trapezoid", np.trapz)
        return float(trapezoid(trapezoid(self.values, self.re_axis, axis=1), self.im_axis))


def _wigner_kernel(rho_r: np.ndarray, beta: np.ndarray, tail_tol: float = 0.0) -> np.ndarray:
    """Displaced-parity Wigner values at the complex points ``beta``.

    Expands W = (2/pi) Tr[rho D(2beta) Pi] over Fock-basis stripes; associated
    Laguerre recurrences are evaluated with the Gaussian envelope and the
    factorial prefactors folded in, so no intermediate overflows occur even at
    the truncation-limit radius.  With ``tail_tol`` > 0, stripes whose matrix
    elements are collectively negligible are skipped; the absolute error is
    bounded by (2/pi) * tail_tol.
    """
    dim = rho_r.shape[0]
    z = 2.0 * beta.ravel()
    x = np.abs(z) ** 2
    out = np.zeros(z.shape, dtype=complex)

    log_z = np.zeros(z.shape, dtype=complex)
    nonzero = z != 0
    log_z[nonzero] = np.log(z[nonzero])

    from scipy.special import gammaln

    skip_below = tail_tol / (2.0 * dim) if tail_tol > 0 else -1.0
    for k in range(dim):
        stripe = np.diagonal(rho_r, offset=k)  # rho[m, m+k]
        if np.sum(np.abs(stripe)) <= skip_below:
            continue
        # S_m = sqrt(m!/(m+k)!) z^k e^{-x/2} L_m^{(k)}(x), built by recurrence
        if k == 0:
            s_prev = np.exp(-0.5 * x).astype(complex)
        else:
            s_prev = np.exp(k * log_z - 0.5 * gammaln(k + 1.0) - 0.5 * x)
            s_prev[~nonzero] = 0.0
        s_prev2 = np.zeros_like(s_prev)
        for m in range(dim - k):
            term = stripe[m] * (-1.0) ** m * s_prev
            out += term if k == 0 else term + term.conj()
            if m + 1 < dim - k:
                r1 = np.sqrt((m + 1.0) / (m + 1.0 + k))
                r2 = np.sqrt((m + 1.0) * m / ((m + 1.0 + k) * (m + k))) if m else 0.0
                s_next = ((2 * m + k + 1 - x) * r1 * s_prev - (m + k) * r2 * s_prev2) / (m + 1.0)
                s_prev2, s_prev = s_prev, s_next
    return (2.0 / np.pi) * out.real.reshape(beta.shape)


def wigner(
    rho_r: np.ndarray,
    re_axis: np.ndarray | None = None,
    im_axis: np.ndarray | None = None,
    tail_tol: float = 0.0,
) -> WignerGrid:
    """Wigner function of a resonator state on a rectangular grid.

    Defaults to 201 points per axis over [-16, 16].  Raises TruncationError
    when the grid reaches phase-space radii the truncated Fock space cannot
    represent (|beta|^2 >= dim_r / 2).  Cost grows with dim_r^2 times the
    number of grid points; ``tail_tol`` trades a bounded absolute error for
    skipping empty off-diagonal stripes of concentrated states.
    """
    dim = rho_r.shape[0]
    if re_axis is None:
        re_axis = np.linspace(-16.0, 16.0, 201)
    if im_axis is None:
        im_axis = np.linspace(-16.0, 16.0, 201)
    re_axis = np.asarray(re_axis, dtype=float)
    im_axis = np.asarray(im_axis, dtype=float)
    r2_max = np.max(re_axis**2) + np.max(im_axis**2)
    if r2_max >= dim / 2:
        raise TruncationError(
            f"grid extent |beta|^2 = {r2_max:.1f} needs dim_r > {2 * r2_max:.0f}, "
            f"have {dim}"
        )
    beta = re_axis[np.newaxis, :] + 1j * im_axis[:, np.newaxis]
    values = _wigner_kernel(rho_r, beta, tail_tol)
    return WignerGrid(re_axis=re_axis, im_axis=im_axis, values=values)
