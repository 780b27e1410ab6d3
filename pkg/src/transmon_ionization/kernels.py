"""Dense stencil backends for the master-equation generator.

The joint density matrix is stored padded: shape (T, R+2, T, R+2) with Fock
index 0 and R+1 identically zero.  Every ladder shift then reads a neighbor
unconditionally — no branching in the inner loop — and the padding is
preserved because only the live block is ever written.

Both backends evaluate

    out = alpha * rho + beta * ( (dvec_i,n + conj(dvec_j,m)) rho
          + kappa a rho a^dag
          + shifts(w) on rho + shifts(v) on sig/tau )

where sig = nt @ rho and tau = rho @ nt are the transmon-contracted products
(computed by BLAS outside), w is the resonator-only ladder coefficient, v the
transmon-coupled one, and dvec absorbs the diagonal Hamiltonian and decay
terms.

Output elements whose |Re| + |Im| falls below ``flush`` are stored as exact
zeros.  The far tails of rho span hundreds of orders of magnitude, and
letting them decay into subnormal floats slows the arithmetic (and the BLAS
contractions feeding on them) by well over an order of magnitude; the flush
threshold sits far below any observable scale but well above the subnormal
range of the working precision.

The return value is the largest |Re| + |Im| over the output, which the
stepper uses for divergence detection at no extra cost.

The numba version is the production path; the numpy version is a readable
reference used for cross-checking and small problems.
"""

from __future__ import annotations

import numba
import numpy as np

# coefficient vector layout for the ladder terms
#   0: -i w   * sqrt(n)   * rho[n-1, m]      (a^dag rho, resonator drive)
#   1: -i wb  * sqrt(n+1) * rho[n+1, m]      (a rho)
#   2: +i w   * sqrt(m+1) * rho[n, m+1]      (rho a^dag)
#   3: +i wb  * sqrt(m)   * rho[n, m-1]      (rho a)
#   4: -i v   * sqrt(n)   * sig[n-1, m]      (nt a^dag rho, coupling)
#   5: -i vb  * sqrt(n+1) * sig[n+1, m]
#   6: +i v   * sqrt(m+1) * tau[n, m+1]
#   7: +i vb  * sqrt(m)   * tau[n, m-1]


def ladder_coefficients(w: complex, v: complex) -> np.ndarray:
    wb, vb = np.conj(w), np.conj(v)
    return np.array(
        [-1j * w, -1j * wb, 1j * w, 1j * wb, -1j * v, -1j * vb, 1j * v, 1j * vb]
    )


@numba.njit(cache=True, fastmath=True, nogil=True)
def apply_generator_numba(
    rho, sig, tau, out, dvec, sq_raise, sq_lower, coef, kappa, alpha, beta, flush
):
    T = rho.shape[0]
    R2 = rho.shape[1]
    c0, c1, c2, c3 = coef[0], coef[1], coef[2], coef[3]
    c4, c5, c6, c7 = coef[4], coef[5], coef[6], coef[7]
    maxmag = 0.0
    for i in range(T):
        for n in range(1, R2 - 1):
            dl = dvec[i, n]
            srn = sq_raise[n]
            sln = sq_lower[n]
            for j in range(T):
                for m in range(1, R2 - 1):
                    acc = (dl + np.conj(dvec[j, m])) * rho[i, n, j, m]
                    acc += kappa * sln * sq_lower[m] * rho[i, n + 1, j, m + 1]
                    acc += c0 * srn * rho[i, n - 1, j, m]
                    acc += c1 * sln * rho[i, n + 1, j, m]
                    acc += c2 * sq_lower[m] * rho[i, n, j, m + 1]
                    acc += c3 * sq_raise[m] * rho[i, n, j, m - 1]
                    acc += c4 * srn * sig[i, n - 1, j, m]
                    acc += c5 * sln * sig[i, n + 1, j, m]
                    acc += c6 * sq_lower[m] * tau[i, n, j, m + 1]
                    acc += c7 * sq_raise[m] * tau[i, n, j, m - 1]
                    val = alpha * rho[i, n, j, m] + beta * acc
                    mag = abs(val.real) + abs(val.imag)
                    if mag < flush:
                        out[i, n, j, m] = 0.0
                    else:
                        out[i, n, j, m] = val
                        if mag > maxmag:
                            maxmag = mag
    return maxmag


@numba.njit(cache=True, nogil=True)
def hermitize_numba(rho):
    """rho <- (rho + rho^dag)/2 in place on the padded array; returns the
    largest |rho - rho^dag| element seen (the pre-symmetrization drift)."""
    T = rho.shape[0]
    R2 = rho.shape[1]
    drift = 0.0
    for i in range(T):
        for n in range(1, R2 - 1):
            row = i * R2 + n
            for j in range(T):
                for m in range(1, R2 - 1):
                    if j * R2 + m < row:
                        continue
                    a = rho[i, n, j, m]
                    b = np.conj(rho[j, m, i, n])
                    d = a - b
                    mag = abs(d.real) + abs(d.imag)
                    if mag > drift:
                        drift = mag
                    avg = 0.5 * (a + b)
                    rho[i, n, j, m] = avg
                    rho[j, m, i, n] = np.conj(avg)
    return drift


def apply_generator_numpy(
    rho, sig, tau, out, dvec, sq_raise, sq_lower, coef, kappa, alpha, beta, flush
):
    """Reference implementation of the same contraction, written with array
    slices.  Allocates temporaries freely; use only at modest dimensions."""
    R2 = rho.shape[1]
    L = slice(1, R2 - 1)
    r = rho[:, L, :, L]

    sr = sq_raise[L]
    sl = sq_lower[L]
    acc = (dvec[:, L, None, None] + np.conj(dvec)[None, None, :, L]) * r
    acc += kappa * np.einsum("n,m,injm->injm", sl, sl, rho[:, 2:, :, 2:])
    acc += coef[0] * sr[None, :, None, None] * rho[:, :-2, :, L]
    acc += coef[1] * sl[None, :, None, None] * rho[:, 2:, :, L]
    acc += coef[2] * sl[None, None, None, :] * rho[:, L, :, 2:]
    acc += coef[3] * sr[None, None, None, :] * rho[:, L, :, :-2]
    acc += coef[4] * sr[None, :, None, None] * sig[:, :-2, :, L]
    acc += coef[5] * sl[None, :, None, None] * sig[:, 2:, :, L]
    acc += coef[6] * sl[None, None, None, :] * tau[:, L, :, 2:]
    acc += coef[7] * sr[None, None, None, :] * tau[:, L, :, :-2]

    val = alpha * r + beta * acc
    mag = np.abs(val.real) + np.abs(val.imag)
    kept = mag >= flush
    val[~kept] = 0.0
    out[:, L, :, L] = val
    return float(mag[kept].max(initial=0.0))


def hermitize_numpy(rho):
    R2 = rho.shape[1]
    L = slice(1, R2 - 1)
    r = rho[:, L, :, L]
    adj = r.transpose(2, 3, 0, 1).conj()
    diff = r - adj
    drift = float(np.max(np.abs(diff.real) + np.abs(diff.imag)))
    rho[:, L, :, L] = 0.5 * (r + adj)
    return drift
