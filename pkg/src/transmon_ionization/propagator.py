"""Master-equation propagation in the frame rotating at the drive frequency.

The joint transmon-resonator density matrix evolves under

    drho/dt = -i[H_I(t), rho] + kappa D[a] rho,

where, in the rotating frame, H_I(t) splits into a static part (transmon
levels, detuned resonator, static half of the drive) and oscillating parts
(the charge coupling at e^{+-i w_d t} and the counter-rotating drive at
e^{+-2i w_d t}).  Each time step averages the generator over [t, t+dt] in
closed form, then applies exp(dt*L) through its factored Taylor polynomial

    exp(dt L) ~ prod_i (1 - (dt/z_i) L),   z_i = roots of sum_{k<=n} x^k/k!,

so a step costs n sparse generator applications instead of a dense
exponential.  The resonator dimension doubles automatically whenever
probability reaches the top Fock level, with the previous step recomputed at
the larger size.

All frequencies in `SystemParams` are cyclic (GHz); the conversion to angular
units happens once, here, when operators are tabulated.  Times are in ns.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .dressed import DressedSpectrum, SystemParams
from .errors import (
    DimensionError,
    IdentificationError,
    MaxDimensionError,
    NumericalBlowupError,
)
from .kernels import (
    apply_generator_numba,
    apply_generator_numpy,
    hermitize_numba,
    hermitize_numpy,
    ladder_coefficients,
)
from .observables import WignerGrid, populations, purity, reduce_transmon, wigner
from .taylor import taylor_roots
from .transmon import TransmonSpectrum, diagonalize_transmon

_TWO_PI = 2.0 * math.pi
_BLOWUP_LIMIT = 1.0e6  # largest |Re|+|Im| of any rho element tolerated mid-step
_GL_OFFSET = 0.5 / math.sqrt(3.0)  # two-point Gauss-Legendre nodes at 1/2 +- this
_COMM_WEIGHT = math.sqrt(3.0) / 12.0


def _phi(x: float) -> complex:
    """Average of e^{i x s} for s in [0, 1]: (e^{ix} - 1)/(ix)."""
    if x == 0.0:
        return 1.0 + 0.0j
    return (cmath.exp(1j * x) - 1.0) / (1j * x)


@dataclass(frozen=True)
class PropagatorConfig:
    """Numerical knobs for the factored-exponential stepper.

    taylor_order:
        Degree of the Taylor polynomial whose roots factor the step; 8-15 is
        the practical window, 10 the default.
    steps_per_drive_period:
        Number of substeps per drive period (dt = period / this).
    truncation_threshold:
        Resize when dim_r * (top Fock population) exceeds this.
    max_dim_r:
        Hard cap on the resonator dimension; exceeding it raises
        MaxDimensionError.
    record_every:
        Observable-recording cadence in drive periods.
    initial_dim_r:
        Resonator dimension used by ``initial_state`` and fresh workspaces.
    backend:
        "numba" (compiled stencil) or "numpy" (slice-based reference).
    dtype:
        "complex128" or "complex64"; single precision halves memory and
        roughly doubles throughput for large runs.
    magnus_commutator:
        Include the two-point Gauss-Legendre commutator correction to the
        averaged generator (5x the cost per root; off by default).
    """

    taylor_order: int = 10
    steps_per_drive_period: int = 75
    truncation_threshold: float = 1.0e-6
    max_dim_r: int = 1024
    record_every: int = 1
    initial_dim_r: int = 16
    backend: str = "numba"
    dtype: str = "complex128"
    magnus_commutator: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.taylor_order <= 32:
            raise ValueError(f"taylor_order must be in [1, 32], got {self.taylor_order}")
        if self.steps_per_drive_period < 1:
            raise ValueError("steps_per_drive_period must be a positive integer")
        if self.truncation_threshold <= 0:
            raise ValueError("truncation_threshold must be positive")
        if self.initial_dim_r < 2:
            raise ValueError("initial_dim_r must be at least 2")
        if self.max_dim_r < self.initial_dim_r:
            raise ValueError("max_dim_r must not be below initial_dim_r")
        if self.record_every < 1:
            raise ValueError("record_every must be a positive integer")
        if self.backend not in ("numba", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.dtype not in ("complex128", "complex64"):
            raise ValueError(f"dtype must be complex128 or complex64, got {self.dtype!r}")


@dataclass
class DensityMatrix:
    """Joint density matrix with its factor dimensions and current time (ns)."""

    matrix: np.ndarray
    dim_t: int
    dim_r: int
    time: float = 0.0

    def __post_init__(self) -> None:
        d = self.dim_t * self.dim_r
        if self.matrix.shape != (d, d):
            raise DimensionError(
                f"matrix shape {self.matrix.shape} does not match dims "
                f"({self.dim_t}, {self.dim_r})"
            )

    def joint(self) -> np.ndarray:
        """Four-index view (dim_t, dim_r, dim_t, dim_r)."""
        return self.matrix.reshape(self.dim_t, self.dim_r, self.dim_t, self.dim_r)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


@dataclass
class TimeSeries:
    """Per-drive-period observable records from one evolution.

    ``levels`` holds transmon-eigenlevel populations, one row per record;
    ``purity`` is the purity of the reduced transmon state.  ``error`` is
    None for a clean run, otherwise a description of the failure that ended
    the run early (the records up to that point are kept).
    """

    params: SystemParams
    config: PropagatorConfig
    times: np.ndarray
    n_r: np.ndarray
    n_t: np.ndarray
    levels: np.ndarray
    purity: np.ndarray
    trace_dev: np.ndarray
    dim_r: np.ndarray
    wigner_snapshots: list[tuple[float, WignerGrid]] = field(default_factory=list)
    error: str | None = None

    def __len__(self) -> int:
        return len(self.times)


class _Workspace:
    """Padded buffers plus tabulated operators at one resonator dimension.

    The state lives in ``cur`` with one zero Fock row/column on each side, so
    ladder shifts in the kernel never branch.  ``prev`` snapshots the state
    before each step so a dimension resize can recompute that step.
    """

    def __init__(
        self,
        p: SystemParams,
        cfg: PropagatorConfig,
        dim_r: int,
        spectrum: TransmonSpectrum | None = None,
        allocate: bool = True,
    ) -> None:
        self.p = p
        self.cfg = cfg
        self.T = p.dim_t
        self.R = dim_r
        self.cdtype = np.dtype(cfg.dtype)
        self.rdtype = np.dtype(np.float32 if self.cdtype == np.complex64 else np.float64)
        if spectrum is None:
            spectrum = diagonalize_transmon(p.transmon, p.dim_t)
        self.spectrum = spectrum

        f_frame = p.drive_freq if p.drive_freq > 0 else p.omega_r
        if f_frame <= 0:
            raise ValueError("rotating-frame frequency must be positive")
        self.frame_freq = f_frame
        self.period = 1.0 / f_frame
        self.steps = cfg.steps_per_drive_period
        self.dt = self.period / self.steps
        self.omega_d_ang = _TWO_PI * f_frame

        R2 = dim_r + 2
        e_ang = _TWO_PI * spectrum.energies_from_ground()
        delta_ang = _TWO_PI * (p.omega_r - f_frame)
        kappa_ang = _TWO_PI * p.kappa
        fock = np.arange(R2, dtype=float) - 1.0
        fock[0] = 0.0
        fock[-1] = 0.0  # padding rows; values never used
        dvec = -1j * (e_ang[:, None] + delta_ang * fock[None, :]) - 0.5 * kappa_ang * fock[None, :]
        self.dvec = dvec.astype(self.cdtype)
        self.sq_raise = np.sqrt(np.maximum(np.arange(R2, dtype=float) - 1.0, 0.0)).astype(self.rdtype)
        self.sq_lower = np.sqrt(np.arange(R2, dtype=float)).astype(self.rdtype)
        self.nt = np.ascontiguousarray(spectrum.n_matrix.astype(self.cdtype))
        self.nt_T = np.ascontiguousarray(self.nt.T)
        self.kappa_ang = self.rdtype.type(kappa_ang)
        # Flush level for sub-noise tails: far below any observable scale,
        # far above the working precision's subnormal range (see kernels).
        self.flush = self.rdtype.type(1e-20 if self.cdtype == np.complex64 else 1e-150)
        self.has_coupling = p.g != 0.0
        self.roots = taylor_roots(cfg.taylor_order)

        # Per-substep generator coefficients repeat exactly every drive period:
        # w_d * t_k = 2 pi k / S, so tabulate one period of them.  The lab
        # coupling is -i g nt (a - a^dag) (same convention as
        # build_static_hamiltonian), so the n_t a^dag coefficient in the
        # rotating frame is +i g e^{+i w_d t}.
        eps_ang = _TWO_PI * p.drive_amp
        g_ang = _TWO_PI * p.g
        phi1 = _phi(_TWO_PI / self.steps)
        phi2 = _phi(2.0 * _TWO_PI / self.steps)
        self.avg_tables = []
        for k in range(self.steps):
            e1 = cmath.exp(2j * math.pi * k / self.steps)
            w = 0.5 * eps_ang * (e1 * e1 * phi2 - 1.0)
            v = 1j * g_ang * e1 * phi1
            self.avg_tables.append(ladder_coefficients(w, v).astype(self.cdtype))
        self.comm_tables: list[tuple[np.ndarray, np.ndarray]] | None = None
        if cfg.magnus_commutator:
            self.comm_tables = []
            for k in range(self.steps):
                pair = []
                for frac in (0.5 - _GL_OFFSET, 0.5 + _GL_OFFSET):
                    e1 = cmath.exp(2j * math.pi * (k + frac) / self.steps)
                    w = 0.5 * eps_ang * (e1 * e1 - 1.0)
                    v = 1j * g_ang * e1
                    pair.append(ladder_coefficients(w, v).astype(self.cdtype))
                self.comm_tables.append((pair[0], pair[1]))

        self.cur: np.ndarray | None = None
        self.nxt: np.ndarray | None = None
        self.sig: np.ndarray | None = None
        self.tau: np.ndarray | None = None
        self.prev: np.ndarray | None = None
        self._scratch: list[np.ndarray] | None = None
        if allocate:
            self._allocate()

    # -- buffers ---------------------------------------------------------

    def _zeros(self) -> np.ndarray:
        R2 = self.R + 2
        return np.zeros((self.T, R2, self.T, R2), dtype=self.cdtype)

    def _allocate(self) -> None:
        if self.cur is None:
            self.cur = self._zeros()
        self.nxt = self._zeros()
        self.sig = self._zeros()
        self.tau = self._zeros()
        self.prev = self._zeros()

    def live(self, buf: np.ndarray | None = None) -> np.ndarray:
        """View of the physical block, shape (T, R, T, R)."""
        if buf is None:
            buf = self.cur
        return buf[:, 1 : self.R + 1, :, 1 : self.R + 1]

    def load(self, matrix: np.ndarray, dim_r: int | None = None) -> None:
        """Copy a square joint matrix into the live block (embedding or
        truncating in the Fock index as needed)."""
        if dim_r is None:
            d = matrix.shape[0]
            if d % self.T:
                raise DimensionError(
                    f"matrix of size {d} is not a multiple of dim_t={self.T}"
                )
            dim_r = d // self.T
        src = matrix.reshape(self.T, dim_r, self.T, dim_r)
        m = min(dim_r, self.R)
        self.cur[...] = 0.0
        self.cur[:, 1 : m + 1, :, 1 : m + 1] = src[:, :m, :, :m]

    def extract(self) -> np.ndarray:
        """Copy of the live state as a complex128 square matrix."""
        d = self.T * self.R
        return np.ascontiguousarray(self.live()).astype(np.complex128).reshape(d, d)

    def grown(self) -> "_Workspace":
        """Workspace at twice the resonator dimension holding the pre-step
        snapshot (``prev``) as its current state."""
        ws = _Workspace(self.p, self.cfg, 2 * self.R, self.spectrum, allocate=False)
        ws.cur = ws._zeros()
        ws.cur[:, 1 : self.R + 1, :, 1 : self.R + 1] = self.live(self.prev)
        # Release this workspace's buffers before the rest are allocated so
        # the peak footprint stays near five arrays.
        self.cur = self.nxt = self.sig = self.tau = self.prev = None
        self._scratch = None
        ws._allocate()
        return ws

    # -- generator application -------------------------------------------

    def _contract(self, src: np.ndarray) -> None:
        """Fill sig = nt . rho (left) and tau = rho . nt (right)."""
        if not self.has_coupling:
            return  # buffers stay zero; coupling coefficients are zero too
        T = self.T
        R2 = self.R + 2
        np.matmul(self.nt, src.reshape(T, -1), out=self.sig.reshape(T, -1))
        np.matmul(
            self.nt_T,
            src.reshape(T * R2, T, R2),
            out=self.tau.reshape(T * R2, T, R2),
        )

    def _apply(
        self,
        src: np.ndarray,
        dst: np.ndarray,
        coef: np.ndarray,
        alpha: float,
        beta: complex,
    ) -> float:
        """dst = alpha*src + beta*(L src); returns max |Re|+|Im| over dst."""
        self._contract(src)
        a = self.rdtype.type(alpha)
        b = self.cdtype.type(beta)
        if self.cfg.backend == "numba":
            return apply_generator_numba(
                src, self.sig, self.tau, dst,
                self.dvec, self.sq_raise, self.sq_lower,
                coef, self.kappa_ang, a, b, self.flush,
            )
        return apply_generator_numpy(
            src, self.sig, self.tau, dst,
            self.dvec, self.sq_raise, self.sq_lower,
            coef, self.kappa_ang, a, b, self.flush,
        )

    def _apply_with_commutator(
        self, src: np.ndarray, dst: np.ndarray, k: int, c: complex
    ) -> float:
        """dst = src - c*(Lbar + dt*(sqrt(3)/12)*[L(t2), L(t1)]) src."""
        if self._scratch is None:
            self._scratch = [self._zeros(), self._zeros(), self._zeros()]
        s1, s2, s3 = self._scratch
        coef_avg = self.avg_tables[k % self.steps]
        coef_1, coef_2 = self.comm_tables[k % self.steps]
        self._apply(src, dst, coef_avg, 1.0, -c)
        self._apply(src, s1, coef_1, 0.0, 1.0)  # L1 src
        self._apply(src, s2, coef_2, 0.0, 1.0)  # L2 src
        self._apply(s1, s3, coef_2, 0.0, 1.0)  # L2 L1 src
        self._apply(s2, s1, coef_1, 0.0, 1.0)  # L1 L2 src
        w = -c * self.dt * _COMM_WEIGHT
        dlive = self.live(dst)
        dlive += w * (self.live(s3) - self.live(s1))
        return float(np.max(np.abs(dlive.real) + np.abs(dlive.imag)))

    def _coef_at(self, t: float) -> np.ndarray:
        """Averaged coefficients for a step starting at arbitrary time t."""
        k = t / self.dt
        k_round = round(k)
        if abs(k - k_round) < 1e-9:
            return self.avg_tables[int(k_round) % self.steps]
        eps_ang = _TWO_PI * self.p.drive_amp
        g_ang = _TWO_PI * self.p.g
        c1 = cmath.exp(1j * self.omega_d_ang * t) * _phi(self.omega_d_ang * self.dt)
        c2 = cmath.exp(2j * self.omega_d_ang * t) * _phi(2.0 * self.omega_d_ang * self.dt)
        w = 0.5 * eps_ang * (c2 - 1.0)
        v = 1j * g_ang * c1
        return ladder_coefficients(w, v).astype(self.cdtype)

    # -- stepping ---------------------------------------------------------

    def step(self, k: int) -> float:
        """Advance the state from t_k to t_{k+1}; returns the Hermiticity
        drift removed at the end of the step.

        Raises NumericalBlowupError if any intermediate element magnitude
        exceeds the divergence limit.
        """
        self.prev[...] = self.cur
        coef = self.avg_tables[k % self.steps]
        cur, nxt = self.cur, self.nxt
        for z in self.roots:
            c = self.dt / z
            if self.cfg.magnus_commutator:
                maxmag = self._apply_with_commutator(cur, nxt, k, c)
            else:
                maxmag = self._apply(cur, nxt, coef, 1.0, -c)
            cur, nxt = nxt, cur
            if maxmag > _BLOWUP_LIMIT:
                self.cur, self.nxt = cur, nxt
                raise NumericalBlowupError(
                    f"|rho| element reached {maxmag:.3e} at "
                    f"t={(k + 1) * self.dt:.4f} ns (dim_r={self.R})"
                )
        self.cur, self.nxt = cur, nxt
        if self.cfg.backend == "numba":
            return float(hermitize_numba(self.cur))
        return float(hermitize_numpy(self.cur))

    # -- monitors ---------------------------------------------------------

    def trace(self) -> float:
        return float(np.einsum("inin->", self.live()).real)

    def top_weight(self) -> float:
        """dim_r times the top-Fock-level population: the truncation monitor
        E = |1 - Tr rho [a, a^dag]| evaluated analytically."""
        top = self.cur[:, self.R, :, self.R]
        return self.R * float(np.trace(top).real)


class _GeneratorAction:
    """Action of a (time-averaged or instantaneous) generator on a density
    matrix, with operators tabulated lazily per dimension."""

    def __init__(self, p: SystemParams, w: complex, v: complex):
        self.p = p
        self.coef = ladder_coefficients(w, v)
        self._spaces: dict[int, _Workspace] = {}

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho)
        four_index = rho.ndim == 4
        if four_index:
            t1, r1, t2, r2 = rho.shape
            if t1 != t2 or r1 != r2 or t1 != self.p.dim_t:
                raise DimensionError(f"incompatible state shape {rho.shape}")
            square = rho.reshape(t1 * r1, t1 * r1)
        elif rho.ndim == 2 and rho.shape[0] == rho.shape[1]:
            square = rho
        else:
            raise DimensionError(f"expected a square or 4-index state, got {rho.shape}")
        d = square.shape[0]
        if d % self.p.dim_t:
            raise DimensionError(
                f"state size {d} is not a multiple of dim_t={self.p.dim_t}"
            )
        dim_r = d // self.p.dim_t
        ws = self._spaces.get(dim_r)
        if ws is None:
            cfg = PropagatorConfig(initial_dim_r=2, max_dim_r=max(dim_r, 2))
            ws = _Workspace(self.p, cfg, dim_r)
            self._spaces[dim_r] = ws
        ws.load(square)
        ws._apply(ws.cur, ws.nxt, self.coef.astype(ws.cdtype), 0.0, 1.0)
        out = np.ascontiguousarray(ws.live(ws.nxt)).astype(np.complex128)
        if four_index:
            return out
        return out.reshape(d, d)


def rotating_frame_generator(p: SystemParams, t: float):
    """Instantaneous rotating-frame generator L(t) as a callable rho -> L rho.

    Implemented through the same contraction kernels as the stepper; no
    superoperator matrix is ever materialized.
    """
    f_frame = p.drive_freq if p.drive_freq > 0 else p.omega_r
    omega_d_ang = _TWO_PI * f_frame
    e1 = cmath.exp(1j * omega_d_ang * t)
    w = 0.5 * _TWO_PI * p.drive_amp * (e1 * e1 - 1.0)
    v = 1j * _TWO_PI * p.g * e1
    return _GeneratorAction(p, w, v)


def averaged_generator(p: SystemParams, t: float, dt: float):
    """Time average of L over [t, t+dt] as a callable rho -> Lbar rho.

    The oscillating coefficients integrate in closed form: the e^{i m w_d t}
    term acquires the factor (e^{i m w_d dt} - 1)/(i m w_d dt).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    f_frame = p.drive_freq if p.drive_freq > 0 else p.omega_r
    omega_d_ang = _TWO_PI * f_frame
    c1 = cmath.exp(1j * omega_d_ang * t) * _phi(omega_d_ang * dt)
    c2 = cmath.exp(2j * omega_d_ang * t) * _phi(2.0 * omega_d_ang * dt)
    w = 0.5 * _TWO_PI * p.drive_amp * (c2 - 1.0)
    v = 1j * _TWO_PI * p.g * c1
    return _GeneratorAction(p, w, v)


def initial_state(d: DressedSpectrum, label: int, dim_r: int = 16) -> DensityMatrix:
    """Projector onto the dressed eigenstate that continues |label, 0>.

    The eigenvector is identified by largest overlap with the bare product
    state, truncated or zero-padded to ``dim_r`` Fock levels, renormalized,
    and returned as a pure density matrix at t=0.
    """
    p = d.params
    if not 0 <= label < p.dim_t:
        raise DimensionError(f"transmon label {label} outside [0, {p.dim_t})")
    overlaps = d.product_overlaps(label, 0)
    idx = int(np.argmax(overlaps))
    if overlaps[idx] < 0.5:
        raise IdentificationError(
            f"no dressed eigenstate holds a majority overlap with |{label},0>; "
            f"best candidate has {overlaps[idx]:.3f}"
        )
    vec = d.states[:, idx].reshape(p.dim_t, p.dim_r)
    emb = np.zeros((p.dim_t, dim_r), dtype=complex)
    m = min(dim_r, p.dim_r)
    emb[:, :m] = vec[:, :m]
    psi = emb.ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise IdentificationError("identified eigenvector truncates to zero")
    psi = psi / norm
    rho = np.outer(psi, psi.conj())
    rho /= np.trace(rho).real
    return DensityMatrix(matrix=rho, dim_t=p.dim_t, dim_r=dim_r, time=0.0)


def adapt_hilbert_space(
    rho: DensityMatrix, cfg: PropagatorConfig
) -> tuple[DensityMatrix, bool]:
    """Double dim_r (zero-padding in the Fock basis) when the truncation
    monitor E = dim_r * <top|rho_r|top> exceeds the configured threshold.

    Returns the (possibly resized) state and whether a resize happened.
    """
    joint = rho.joint()
    top = joint[:, rho.dim_r - 1, :, rho.dim_r - 1]
    e_monitor = rho.dim_r * float(np.trace(top).real)
    if e_monitor <= cfg.truncation_threshold:
        return rho, False
    new_r = 2 * rho.dim_r
    if new_r > cfg.max_dim_r:
        raise MaxDimensionError(
            f"resonator dimension {new_r} would exceed cap {cfg.max_dim_r} "
            f"(truncation monitor E={e_monitor:.3e})"
        )
    bigger = np.zeros((rho.dim_t, new_r, rho.dim_t, new_r), dtype=rho.matrix.dtype)
    bigger[:, : rho.dim_r, :, : rho.dim_r] = joint
    d = rho.dim_t * new_r
    return (
        DensityMatrix(matrix=bigger.reshape(d, d), dim_t=rho.dim_t, dim_r=new_r, time=rho.time),
        True,
    )


def step(rho: DensityMatrix, p: SystemParams, cfg: PropagatorConfig) -> DensityMatrix:
    """One averaged-generator step of length dt = period/steps_per_drive_period.

    Convenience wrapper over the workspace machinery for single states; for
    trajectories use ``evolve``, which reuses buffers across steps.
    """
    if rho.dim_t != p.dim_t:
        raise DimensionError(
            f"state dim_t={rho.dim_t} does not match params dim_t={p.dim_t}"
        )
    ws = _Workspace(p, cfg, rho.dim_r)
    ws.load(rho.matrix)
    k = rho.time / ws.dt
    k_round = int(round(k))
    if abs(k - k_round) < 1e-9:
        ws.step(k_round)
    else:
        # Off-grid start time: evaluate coefficients directly instead of from
        # the periodic table.
        coef = ws._coef_at(rho.time)
        cur, nxt = ws.cur, ws.nxt
        for z in ws.roots:
            maxmag = ws._apply(cur, nxt, coef, 1.0, -(ws.dt / z))
            cur, nxt = nxt, cur
            if maxmag > _BLOWUP_LIMIT:
                raise NumericalBlowupError(
                    f"|rho| element reached {maxmag:.3e} during step"
                )
        ws.cur, ws.nxt = cur, nxt
        if cfg.backend == "numba":
            hermitize_numba(ws.cur)
        else:
            hermitize_numpy(ws.cur)
    return DensityMatrix(
        matrix=ws.extract(), dim_t=rho.dim_t, dim_r=rho.dim_r, time=rho.time + ws.dt
    )


def evolve(
    p: SystemParams,
    cfg: PropagatorConfig,
    initial: DensityMatrix,
    t_end: float,
    *,
    wigner_times: tuple[float, ...] = (),
    wigner_axes: tuple[np.ndarray, np.ndarray] | None = None,
) -> TimeSeries:
    """Propagate ``initial`` to t_end, recording observables each
    ``record_every`` drive periods (and at t=0).

    The resonator dimension doubles whenever the truncation monitor trips,
    recomputing the step that tripped it at the larger size.  On
    NumericalBlowupError or MaxDimensionError the records so far are
    returned with the failure described in ``error``.

    ``wigner_times`` requests resonator Wigner snapshots at the first record
    at or after each listed time; ``wigner_axes`` optionally fixes the grid.
    """
    if initial.dim_t != p.dim_t:
        raise DimensionError(
            f"state dim_t={initial.dim_t} does not match params dim_t={p.dim_t}"
        )
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    ws = _Workspace(p, cfg, initial.dim_r)
    ws.load(initial.matrix)

    n_steps = math.ceil(t_end / ws.dt - 1e-9)
    steps_per_record = ws.steps * cfg.record_every

    times: list[float] = []
    n_r: list[float] = []
    n_t: list[float] = []
    levels: list[np.ndarray] = []
    purities: list[float] = []
    trace_devs: list[float] = []
    dims: list[int] = []
    snapshots: list[tuple[float, WignerGrid]] = []
    pending_wigner = sorted(wigner_times)

    def record(t: float) -> None:
        live = ws.live()
        pops = populations(live, p.dim_t, ws.R)
        rho_t = reduce_transmon(live, p.dim_t, ws.R)
        times.append(t)
        n_r.append(pops.n_r)
        n_t.append(pops.n_t)
        levels.append(pops.levels)
        purities.append(purity(rho_t))
        trace_devs.append(abs(ws.trace() - 1.0))
        dims.append(ws.R)
        while pending_wigner and t >= pending_wigner[0] - 1e-9:
            pending_wigner.pop(0)
            rho_r = np.ascontiguousarray(
                np.einsum("inim->nm", live).astype(np.complex128)
            )
            if wigner_axes is not None:
                grid = wigner(rho_r, wigner_axes[0], wigner_axes[1])
            else:
                # widest square grid whose corners stay inside the
                # representable radius |beta|^2 < dim_r / 2
                extent = 0.45 * math.sqrt(ws.R)
                axis = np.linspace(-extent, extent, 101)
                grid = wigner(rho_r, axis, axis)
            snapshots.append((t, grid))

    record(0.0)
    error: str | None = None
    try:
        for k in range(n_steps):
            ws.step(k)
            e_monitor = ws.top_weight()
            while e_monitor > cfg.truncation_threshold:
                if 2 * ws.R > cfg.max_dim_r:
                    raise MaxDimensionError(
                        f"resonator dimension {2 * ws.R} would exceed cap "
                        f"{cfg.max_dim_r} at t={(k + 1) * ws.dt:.4f} ns "
                        f"(truncation monitor E={e_monitor:.3e})"
                    )
                ws = ws.grown()
                ws.step(k)
                e_monitor = ws.top_weight()
            if (k + 1) % steps_per_record == 0:
                record((k + 1) * ws.dt)
    except (NumericalBlowupError, MaxDimensionError) as exc:
        error = f"{type(exc).__name__}: {exc}"

    return TimeSeries(
        params=p,
        config=cfg,
        times=np.asarray(times),
        n_r=np.asarray(n_r),
        n_t=np.asarray(n_t),
        levels=np.asarray(levels),
        purity=np.asarray(purities),
        trace_dev=np.asarray(trace_devs),
        dim_r=np.asarray(dims, dtype=int),
        wigner_snapshots=snapshots,
        error=error,
    )
