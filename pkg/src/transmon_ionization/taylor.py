"""Root factorization of the truncated exponential series.

The propagation step applies exp(dt*L) through its degree-n Taylor polynomial

    P_n(x) = sum_{i=0}^{n} x^i / i!  =  prod_{i=1}^{n} (1 - x / z_i),

so one step is a sequence of n cheap first-order factors rho <- rho - (dt/z_i) L rho
instead of one dense exponential.  The z_i are the complex roots of P_n; they
come in conjugate pairs (plus one real root when n is odd), and applying the
factors in ascending modulus with each pair adjacent keeps intermediate
amplification small in floating point.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import RootFindingError

_MAX_ORDER = 32


def taylor_coefficients(n: int) -> np.ndarray:
    """[1, 1, 1/2!, ..., 1/n!]"""
    return np.array([1.0 / math.factorial(i) for i in range(n + 1)])


def _series_tail(z: np.ndarray, n: int) -> np.ndarray:
    """sum_{i>n} z^i / i!, summed forward (no cancellation against e^z)."""
    term = np.ones_like(z)
    for i in range(1, n + 2):
        term = term * z / i
    acc = term.copy()
    for i in range(n + 2, n + 400):
        term = term * z / i
        acc += term
        if np.all(np.abs(term) < 1e-20 * np.maximum(np.abs(acc), 1.0)):
            break
    return acc


def _polish(roots: np.ndarray, n: int) -> np.ndarray:
    """Newton iterations using P_n(z) = e^z - tail(z).

    Direct Horner evaluation of P_n cancels catastrophically at the outer
    roots of high orders (|z| ~ n/2 with terms of order e^|z|); the
    exponential-minus-tail form is absolutely accurate there, and the
    derivative is the same expression one order lower.
    """
    z = roots.astype(complex)
    for _ in range(8):
        ez = np.exp(z)
        p = ez - _series_tail(z, n)
        dp = ez - _series_tail(z, n - 1)
        step = p / dp
        z = z - step
        if np.all(np.abs(step) < 1e-15 * np.abs(z)):
            break
    return z


def taylor_roots(n: int) -> np.ndarray:
    """All n roots of the degree-n truncated exponential.

    Ordered ascending in modulus with conjugate pairs adjacent; conjugate
    symmetry is enforced exactly so that products of paired factors have real
    coefficients.  Raises RootFindingError if the factored form fails to
    reproduce the Taylor coefficients to 1e-12.
    """
    if not 1 <= n <= _MAX_ORDER:
        raise RootFindingError(f"order must be in [1, {_MAX_ORDER}], got {n}")
    coeffs = taylor_coefficients(n)
    roots = np.roots(coeffs[::-1])
    roots = _polish(roots, n)

    # pair z with conj(z): sort by (|z|, Re, Im); equal-modulus conjugates land
    # adjacent, lower half-plane first; then symmetrize each pair exactly
    order = np.lexsort((roots.imag, roots.real, np.abs(roots)))
    roots = roots[order]
    out = roots.copy()
    k = 0
    while k < n:
        if k + 1 < n and abs(roots[k] - np.conj(roots[k + 1])) < 1e-8 * abs(roots[k]):
            mean = 0.5 * (roots[k] + np.conj(roots[k + 1]))
            out[k], out[k + 1] = mean, np.conj(mean)
            k += 2
        else:
            out[k] = roots[k].real  # unpaired root of an odd-order series is real
            k += 1

    check = reconstruction_error(out, coeffs)
    if check > 1e-12:
        raise RootFindingError(
            f"root factorization of order {n} off by {check:.2e} in coefficients"
        )
    return out


def reconstruction_error(roots: np.ndarray, coeffs: np.ndarray) -> float:
    """Max coefficient deviation of prod(1 - x/z_i) from the given series.

    Conjugate pairs are expanded together as real quadratics, so every partial
    product has modest real coefficients and the comparison is well
    conditioned at any order.
    """
    poly = np.array([1.0])  # ascending powers
    k, n = 0, len(roots)
    while k < n:
        z = roots[k]
        if k + 1 < n and roots[k + 1] == np.conj(z) and z.imag != 0:
            mod2 = (z * np.conj(z)).real
            factor = np.array([1.0, -2.0 * z.real / mod2, 1.0 / mod2])
            k += 2
        else:
            factor = np.array([1.0, -1.0 / z.real])
            k += 1
        poly = np.convolve(poly, factor)
    return float(np.max(np.abs(poly - coeffs)))


def amplification_bound(n: int, lam_dt: float) -> float:
    """|P_n(i*lam*dt)| — growth factor of the factored step on an eigenmode
    with purely imaginary rate.  Useful for choosing the order: the step is
    stable while this stays at 1 + O(truncation tail)."""
    coeffs = taylor_coefficients(n)
    return float(abs(np.polyval(coeffs[::-1], 1j * lam_dt)))
