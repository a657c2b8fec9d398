"""Open-system dynamics of a single Kerr mode in a truncated Fock space.

Density matrices are dense ``N x N`` arrays; the Lindblad generator is built
once as a sparse superoperator acting on the row-major flattening of rho
(``vec(A rho B) = (A kron B^T) vec(rho)``). Time is in seconds and rates in rad/s.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, minimize_scalar
from scipy.special import gammaln

from .errors import PhaseTargetUnreachable, StepTooLarge, TraceDrift, TruncationTooSmall

log = logging.getLogger(__name__)

STEP_SAFETY = 0.05
TRACE_TOL = 1e-6


class FockSpace:
    """Operators on the lowest ``dimension`` Fock states. Arrays are read-only."""

    def __init__(self, dimension):
        if dimension < 2:
            raise ValueError("Fock space needs at least two levels")
        self.dimension = int(dimension)

    @staticmethod
    def _frozen(m):
        m.setflags(write=False)
        return m

    @cached_property
    def a(self):
        return self._frozen(np.diag(np.sqrt(np.arange(1, self.dimension)), 1).astype(complex))

    @cached_property
    def adag(self):
        return self._frozen(self.a.conj().T.copy())

    @cached_property
    def n(self):
        return self._frozen(np.diag(np.arange(self.dimension)).astype(complex))

    @cached_property
    def n2(self):
        return self._frozen(np.diag(np.arange(self.dimension) ** 2).astype(complex))

    @cached_property
    def identity(self):
        return self._frozen(np.eye(self.dimension, dtype=complex))

    def basis(self, k):
        v = np.zeros(self.dimension, complex)
        v[k] = 1.0
        return np.outer(v, v)


def coherent_ket(alpha, dimension):
    """Normalized truncated coherent state vector (Poisson amplitudes, renormalized)."""
    alpha = complex(alpha)
    if abs(alpha) == 0:
        psi = np.zeros(dimension, complex)
        psi[0] = 1.0
        return psi
    k = np.arange(dimension)
    log_mag = -abs(alpha) ** 2 / 2 + k * math.log(abs(alpha)) - 0.5 * gammaln(k + 1)
    psi = np.exp(log_mag + 1j * k * np.angle(alpha))
    return psi / np.linalg.norm(psi)


def coherent_state(alpha, dimension):
    """Pure-state density matrix of ``|alpha>``; refuses truncations that clip its tail."""
    if (abs(alpha) + 3) ** 2 > dimension:
        raise TruncationTooSmall(
            f"N={dimension} too small for |alpha|={abs(alpha):.3g}; need (|alpha|+3)^2 <= N")
    psi = coherent_ket(alpha, dimension)
    return np.outer(psi, psi.conj())


def cat_ket(alpha, dimension):
    """``(e^{i pi/4}|-i alpha> + e^{-i pi/4}|i alpha>)/sqrt(2)``, renormalized."""
    psi = (np.exp(1j * math.pi / 4) * coherent_ket(-1j * alpha, dimension)
           + np.exp(-1j * math.pi / 4) * coherent_ket(1j * alpha, dimension))
    return psi / np.linalg.norm(psi)


def cat_state(alpha, dimension):
    psi = cat_ket(alpha, dimension)
    return np.outer(psi, psi.conj())


def fidelity(rho, alpha, grid=360):
    """max over theta of <cat(alpha e^{i theta})| rho |cat(alpha e^{i theta})>.

    Returns ``(F, theta)``. A coarse grid is refined with a bounded scalar search.
    """
    dim = rho.shape[0]

    def overlap(theta):
        psi = cat_ket(alpha * np.exp(1j * theta), dim)
        return float(np.real(psi.conj() @ rho @ psi))

    thetas = np.linspace(0, 2 * math.pi, grid, endpoint=False)
    values = [overlap(t) for t in thetas]
    i = int(np.argmax(values))
    step = thetas[1] - thetas[0]
    res = minimize_scalar(lambda t: -overlap(t), bounds=(thetas[i] - step, thetas[i] + step),
                          method="bounded", options={"xatol": 1e-10})
    best = max(values[i], -res.fun)
    theta = float(res.x) if -res.fun >= values[i] else float(thetas[i])
    return best, theta % (2 * math.pi)


@dataclass(frozen=True)
class DriveSpec:
    amplitude: float
    frequency: float

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("drive amplitude must be non-negative")


@dataclass(frozen=True)
class Hamiltonian:
    """``H(t) = sum_j c_j(t) O_j`` in rad/s. ``c_j`` is None for a constant term.

    Coefficient callables must accept numpy arrays of times.
    """

    terms: tuple

    @classmethod
    def static(cls, operator):
        return cls(((np.asarray(operator), None),))

    @property
    def is_static(self):
        return all(c is None for _, c in self.terms)

    @property
    def dimension(self):
        return self.terms[0][0].shape[0]

    def at(self, t):
        out = np.zeros((self.dimension, self.dimension), complex)
        for op, coeff in self.terms:
            out += op if coeff is None else complex(np.asarray(coeff(np.array([t])))[0]) * op
        return out

    def spectral_range(self, times):
        """Largest eigenvalue spread of H over ``times`` (rad/s)."""
        times = [times[0]] if self.is_static else times
        spread = 0.0
        for t in times:
            h = self.at(t)
            ev = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
            spread = max(spread, ev[-1] - ev[0])
        return spread


def single_mode_hamiltonian(omega_eff, kerr, drive=None, frame="rotating", space=None):
    """``(omega - omega_d) n - (K/2) n^2 + eps (a + a^dag)`` or its lab-frame form.

    In the rotating frame a static ndarray is returned. The lab frame keeps the
    explicit drive phase, ``eps (a^dag e^{-i omega_d t} + a e^{i omega_d t})``,
    and returns a :class:`Hamiltonian`.
    """
    if space is None:
        raise ValueError("a FockSpace is required")
    if frame not in ("rotating", "lab"):
        raise ValueError(f"unknown frame {frame!r}")
    eps = 0.0 if drive is None else drive.amplitude
    wd = 0.0 if drive is None else drive.frequency
    kerr_term = -(kerr / 2) * space.n2
    if frame == "rotating":
        h = (omega_eff - wd) * space.n + kerr_term
        if eps:
            h = h + eps * (space.a + space.adag)
        return h
    terms = [(omega_eff * space.n + kerr_term, None)]
    if eps:
        terms.append((np.asarray(space.adag), lambda t: eps * np.exp(-1j * wd * t)))
        terms.append((np.asarray(space.a), lambda t: eps * np.exp(1j * wd * t)))
    return Hamiltonian(tuple(terms))


def two_mode_hamiltonian(omega, kerr, zeta=(0.0, 0.0), dims=(8, 8)):
    """Two coupled Kerr modes on a product space (mode 1 is the left factor).

    ``H = sum_m omega_m n_m - sum_{m,n} (K_mn/2) n_m n_n
    - sum_{m != n} zeta_mmn (a_n^dag a_m + a_m^dag a_n)`` with ``zeta = (zeta_112, zeta_221)``.
    """
    if max(dims) > 12:
        raise ValueError("two-mode spaces are limited to 12 levels per mode")
    s1, s2 = FockSpace(dims[0]), FockSpace(dims[1])
    i1, i2 = s1.identity, s2.identity
    a1, a2 = np.kron(s1.a, i2), np.kron(i1, s2.a)
    n1, n2 = np.kron(s1.n, i2), np.kron(i1, s2.n)
    kerr = np.asarray(kerr, float)
    ns = (n1, n2)
    h = omega[0] * n1 + omega[1] * n2
    for m in range(2):
        for k in range(2):
            h = h - (kerr[m, k] / 2) * ns[m] @ ns[k]
    hop = a2.conj().T @ a1 + a1.conj().T @ a2
    return h - (zeta[0] + zeta[1]) * hop


# --- Lindblad evolution -------------------------------------------------------

def _left(op):
    return sp.kron(sp.csr_matrix(op), sp.identity(op.shape[0], format="csr"), format="csr")


def _right(op):
    return sp.kron(sp.identity(op.shape[0], format="csr"), sp.csr_matrix(op).T, format="csr")


def hamiltonian_superoperator(op):
    """Sparse matrix of ``rho -> -i [op, rho]``."""
    return (-1j * (_left(op) - _right(op))).tocsr()


def dissipator(op):
    """Sparse matrix of ``rho -> L rho L^dag - {L^dag L, rho}/2``."""
    op = np.asarray(op)
    ldl = op.conj().T @ op
    jump = sp.kron(sp.csr_matrix(op), sp.csr_matrix(op.conj()), format="csr")
    return (jump - 0.5 * (_left(ldl) + _right(ldl))).tocsr()


DENSE_LIMIT = 1024


def _rk4_map(g, step):
    """Dense one-step RK4 propagator ``1 + hG + (hG)^2/2 + (hG)^3/6 + (hG)^4/24``."""
    eye = np.eye(g.shape[0], dtype=complex)
    hg = step * g
    return eye + hg @ (eye + hg @ (eye + hg @ (eye + hg / 4) / 3) / 2)


def _static_advance(generator):
    """RK4 for a time-independent generator.

    Small spaces use the exact RK4 step map raised to the number of steps per
    sample; large spaces apply the four stages with sparse products.
    """
    if generator.shape[0] <= DENSE_LIMIT:
        dense = generator.toarray()
        cache = {}

        def advance(v, t0, step, steps):
            key = (steps, float(f"{step:.12e}"))
            if key not in cache:
                cache[key] = np.linalg.matrix_power(_rk4_map(dense, step), steps)
            return cache[key] @ v

        return advance

    def advance(v, t0, step, steps):
        half = 0.5 * step
        for _ in range(steps):
            k1 = generator @ v
            k2 = generator @ (v + half * k1)
            k3 = generator @ (v + half * k2)
            k4 = generator @ (v + step * k3)
            k2 += k3
            k2 *= 2
            k2 += k1
            k2 += k4
            k2 *= step / 6
            v = v + k2
        return v

    return advance


def _driven_advance(generators, coeff_fns):
    def apply(coeffs, v):
        out = coeffs[0] * (generators[0] @ v)
        for c, g in zip(coeffs[1:], generators[1:]):
            out += c * (g @ v)
        return out

    def advance(v, t0, step, steps):
        starts = t0 + step * np.arange(steps)
        c0, ch, c1 = (np.stack([fn(starts + off) for fn in coeff_fns], axis=1)
                      for off in (0.0, step / 2, step))
        for s in range(steps):
            k1 = apply(c0[s], v)
            k2 = apply(ch[s], v + 0.5 * step * k1)
            k3 = apply(ch[s], v + 0.5 * step * k2)
            k4 = apply(c1[s], v + step * k3)
            v = v + (step / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        return v

    return advance


@dataclass
class Trajectory:
    times: np.ndarray
    n_mean: np.ndarray
    p1: np.ndarray
    purity: np.ndarray
    trace_drift: float
    hermiticity_error: float
    dt: float
    final_state: np.ndarray
    states: list = field(default_factory=list)

    def to_rows(self):
        return [(t * 1e9, n, p, q) for t, n, p, q in zip(self.times, self.n_mean, self.p1, self.purity)]


def _as_hamiltonian(h):
    return h if isinstance(h, Hamiltonian) else Hamiltonian.static(h)


def _coefficients(fn, times):
    if fn is None:
        return np.ones_like(times, dtype=complex)
    if isinstance(fn, (int, float, complex)):
        return np.full(times.shape, fn, dtype=complex)
    return np.asarray(fn(times), dtype=complex) * np.ones_like(times, dtype=complex)


def max_rate(hamiltonian, collapse, times):
    """Fastest rate in the generator: H eigenvalue spread or a jump rate times ``||L^dag L||``."""
    h = _as_hamiltonian(hamiltonian)
    probe = np.linspace(times[0], times[-1], min(len(times), 64))
    rate = h.spectral_range(probe)
    for op, kappa in collapse:
        k = np.max(np.abs(_coefficients(kappa, probe)))
        op = np.asarray(op)
        rate = max(rate, k * np.linalg.norm(op.conj().T @ op, 2))
    return rate


def evolve_lindblad(rho0, hamiltonian, collapse, times, dt=None, keep_states=False):
    """Fixed-step RK4 integration of the Lindblad equation.

    ``collapse`` is a sequence of ``(L, rate)`` where ``rate`` is a number or a
    vectorized callable of time; the jump term is ``rate * D[L]``. Samples are
    taken exactly at ``times``; each interval is split into equal steps no
    longer than ``dt``. When ``dt`` is omitted the largest allowed step is used.
    """
    times = np.asarray(times, float)
    if times.ndim != 1 or len(times) < 1 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    h = _as_hamiltonian(hamiltonian)
    dim = rho0.shape[0]
    limit = STEP_SAFETY / max(max_rate(h, collapse, times), 1e-300)
    if dt is None:
        dt = limit
    elif dt > limit * (1 + 1e-12):
        raise StepTooLarge(f"dt={dt:.3e} s exceeds the stability limit {limit:.3e} s")

    generators = [hamiltonian_superoperator(op) for op, _ in h.terms]
    coeff_fns = [(lambda t, c=c: _coefficients(c, t)) for _, c in h.terms]
    for op, kappa in collapse:
        generators.append(dissipator(op))
        coeff_fns.append(lambda t, k=kappa: _coefficients(k, t))

    static = all(c is None for _, c in h.terms) and all(
        isinstance(k, (int, float)) for _, k in collapse)
    if static:
        total = generators[0] * complex(coeff_fns[0](np.zeros(1))[0])
        for g, fn in zip(generators[1:], coeff_fns[1:]):
            total = total + g * complex(fn(np.zeros(1))[0])
        advance = _static_advance(total.tocsr())
    else:
        advance = _driven_advance(generators, coeff_fns)

    v = np.ascontiguousarray(rho0, dtype=complex).reshape(-1)
    diag = np.arange(dim) * (dim + 1)
    levels = np.arange(dim)
    n_mean, p1, purity, states = [], [], [], []
    drift = herm = 0.0
    used = 0.0

    def sample():
        nonlocal drift, herm
        rho = v.reshape(dim, dim)
        tr = np.real(v[diag].sum())
        drift = max(drift, abs(tr - 1))
        herm = max(herm, float(np.max(np.abs(rho - rho.conj().T))))
        n_mean.append(float(np.real(v[diag] @ levels)))
        p1.append(float(np.real(rho[1, 1])))
        purity.append(float(np.real(np.vdot(v, v))))
        if keep_states:
            states.append(rho.copy())

    sample()
    for t0, t1 in zip(times[:-1], times[1:]):
        steps = max(1, int(math.ceil((t1 - t0) / dt - 1e-9)))
        step = (t1 - t0) / steps
        used = max(used, step)
        v = advance(v, t0, step, steps)
        sample()
        if drift > TRACE_TOL:
            raise TraceDrift(f"trace drifted by {drift:.2e} at t={t1:.3e} s")
    if drift > 0:
        log.debug("maximum trace drift %.3e", drift)

    return Trajectory(times=times, n_mean=np.array(n_mean), p1=np.array(p1),
                      purity=np.array(purity), trace_drift=drift, hermiticity_error=herm,
                      dt=used, final_state=v.reshape(dim, dim).copy(), states=states)


def steady_state(hamiltonian, collapse):
    """Null vector of a time-independent Liouvillian, normalized to unit trace."""
    h = np.asarray(hamiltonian)
    dim = h.shape[0]
    gen = hamiltonian_superoperator(h)
    for op, kappa in collapse:
        gen = gen + float(kappa) * dissipator(op)
    gen = gen.tolil()
    trace_row = np.zeros(dim * dim, complex)
    trace_row[np.arange(dim) * (dim + 1)] = 1.0
    gen[0, :] = trace_row
    rhs = np.zeros(dim * dim, complex)
    rhs[0] = 1.0
    rho = spsolve(gen.tocsc(), rhs).reshape(dim, dim)
    return 0.5 * (rho + rho.conj().T)


# --- experiments --------------------------------------------------------------

def simulate_blockade(omega_r, kerr, kappa, epsilon, t_end, dimension=15, samples=801,
                      omega_d=None, frame="rotating", dt=None):
    """Drive the vacuum at ``omega_d = omega_r - K/2`` and record ``<n>(t)`` and ``P_1(t)``."""
    space = FockSpace(dimension)
    omega_d = omega_r - kerr / 2 if omega_d is None else omega_d
    drive = DriveSpec(epsilon, omega_d)
    if frame == "rotating":
        h = single_mode_hamiltonian(omega_r, kerr, drive, "rotating", space)
    else:
        h = single_mode_hamiltonian(omega_r, kerr, drive, "lab", space)
    times = np.linspace(0.0, t_end, samples)
    return evolve_lindblad(space.basis(0), h, [(space.a, kappa)], times, dt=dt)


def blockade_steady_state(kerr, kappa, epsilon, dimension, detuning=None):
    """Steady ``<n>`` of the rotating-frame blockade model; ``detuning`` defaults to ``K/2``."""
    space = FockSpace(dimension)
    detuning = kerr / 2 if detuning is None else detuning
    h = single_mode_hamiltonian(detuning, kerr, DriveSpec(epsilon, 0.0), "rotating", space)
    rho = steady_state(h, [(space.a, kappa)])
    return float(np.real(np.diag(rho)) @ np.arange(dimension))


def rings(n_mean, rel=0.05):
    """True when ``<n>(t)`` overshoots and then falls back by more than ``rel``."""
    n = np.asarray(n_mean)
    peak = int(np.argmax(n))
    return 0 < peak < len(n) - 1 and n[peak:].min() < (1 - rel) * n[peak]


def rabi_periods(p1):
    """Number of distinct maxima of ``P_1(t)`` above half its range."""
    p1 = np.asarray(p1)
    lo, hi = p1.min(), p1.max()
    if hi - lo < 1e-6:
        return 0
    above = p1 > lo + 0.5 * (hi - lo)
    rises = np.count_nonzero(above[1:] & ~above[:-1]) + int(above[0])
    return int(rises)


@dataclass(frozen=True)
class FluxPulse:
    """Raised-cosine ramp from ``start`` to ``peak``, a plateau, and the mirror ramp."""

    start: float
    peak: float
    t_ramp: float
    t_plateau: float

    @property
    def duration(self):
        return 2 * self.t_ramp + self.t_plateau

    def __call__(self, t):
        t = np.asarray(t, float)
        rise = 0.5 * (1 - np.cos(math.pi * np.clip(t, 0, self.t_ramp) / self.t_ramp))
        tail = t - self.t_ramp - self.t_plateau
        fall = 0.5 * (1 + np.cos(math.pi * np.clip(tail, 0, self.t_ramp) / self.t_ramp))
        shape = np.where(t < self.t_ramp, rise, np.where(tail <= 0, 1.0, fall))
        shape = np.where((t < 0) | (t > self.duration), 0.0, shape)
        return self.start + (self.peak - self.start) * shape


@dataclass(frozen=True)
class KerrSweep:
    """Tabulated linear frequency, Kerr rate and loss rate versus flux (rad/s)."""

    flux: np.ndarray
    omega: np.ndarray
    kerr: np.ndarray
    kappa: np.ndarray

    @cached_property
    def _log_kerr(self):
        return CubicSpline(self.flux, np.log(self.kerr))

    @cached_property
    def _kappa(self):
        return CubicSpline(self.flux, self.kappa)

    def kerr_at(self, flux):
        return np.exp(self._log_kerr(flux))

    def kappa_at(self, flux):
        return self._kappa(flux)


def kerr_sweep(spec, flux_values, count=3, executor=None):
    """Mode-1 sweep used by the dynamics experiments."""
    from .nonlinear import analyze

    flux_values = [float(f) for f in flux_values]
    mapper = map if executor is None else executor.map
    points = list(mapper(analyze, [spec] * len(flux_values), flux_values, [count] * len(flux_values)))
    return KerrSweep(
        flux=np.array(flux_values),
        omega=np.array([p.basis[1].omega for p in points]),
        kerr=np.array([p.couplings.self_kerr(1) for p in points]),
        kappa=np.array([p.kappa[0] for p in points]),
    )


def accumulated_phase(sweep, pulse):
    """``int K(Phi(t)) dt`` over the whole pulse."""
    f = lambda t: float(sweep.kerr_at(pulse(t)))
    ramp = quad(f, 0, pulse.t_ramp, epsabs=0, epsrel=1e-12, limit=200)[0]
    return 2 * ramp + float(sweep.kerr_at(pulse.peak)) * pulse.t_plateau


def phase_matched_pulse(sweep, start, peak, t_ramp, target=math.pi, max_plateau=1e-6):
    """Choose the plateau so that the Kerr phase equals ``target`` within 1e-4."""
    trial = FluxPulse(start, peak, t_ramp, 0.0)
    ramp_phase = accumulated_phase(sweep, trial)
    k_peak = float(sweep.kerr_at(peak))
    plateau = (target - ramp_phase) / k_peak
    if plateau < 0:
        raise PhaseTargetUnreachable(
            f"ramps alone accumulate {ramp_phase:.4f} rad > {target:.4f}; shorten t_ramp")
    if plateau > max_plateau:
        raise PhaseTargetUnreachable(
            f"plateau of {plateau:.3e} s needed; Kerr rate at the peak flux is too small")
    pulse = FluxPulse(start, peak, t_ramp, plateau)
    if abs(accumulated_phase(sweep, pulse) - target) > 1e-4:
        raise PhaseTargetUnreachable("could not match the target Kerr phase to 1e-4")
    return pulse


@dataclass
class CatResult:
    final_state: np.ndarray
    fidelity: float
    theta: float
    tau_used: float
    pulse: FluxPulse
    trajectory: Trajectory


def simulate_cat(sweep, alpha, start=0.3, peak=0.5, t_ramp=5e-9, dimension=40,
                 constant_kappa=None, samples=201, dt=None):
    """Kerr evolution of ``|alpha>`` under a phase-matched flux pulse.

    The frame co-rotates with the instantaneous linear frequency, so only
    ``-(K(t)/2) n^2`` and photon loss act. ``constant_kappa`` replaces the
    swept loss rate by a fixed value (use 0 for the lossless control).
    """
    pulse = phase_matched_pulse(sweep, start, peak, t_ramp)
    space = FockSpace(dimension)
    rho0 = coherent_state(alpha, dimension)
    h = Hamiltonian(((-0.5 * np.asarray(space.n2), lambda t: sweep.kerr_at(pulse(t))),))
    if constant_kappa is None:
        collapse = [(space.a, lambda t: sweep.kappa_at(pulse(t)))]
    elif constant_kappa > 0:
        collapse = [(space.a, float(constant_kappa))]
    else:
        collapse = []
    times = np.linspace(0.0, pulse.duration, samples)
    traj = evolve_lindblad(rho0, h, collapse, times, dt=dt)
    f, theta = fidelity(traj.final_state, alpha)
    return CatResult(final_state=traj.final_state, fidelity=f, theta=theta,
                     tau_used=pulse.duration, pulse=pulse, trajectory=traj)


def flux_for_ratio(sweep, target, bounds=None):
    """Flux where ``K/kappa`` is closest to ``target`` (exact root when bracketed)."""
    lo, hi = bounds or (sweep.flux[0], sweep.flux[-1])
    g = lambda f: math.log(float(sweep.kerr_at(f)) / float(sweep.kappa_at(f))) - math.log(target)
    grid = np.linspace(lo, hi, 401)
    vals = np.array([g(f) for f in grid])
    sign = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    if len(sign):
        i = sign[0]
        return brentq(g, grid[i], grid[i + 1], xtol=1e-12)
    return float(grid[np.argmin(np.abs(vals))])


# --- Wigner function ------------------------------------------------------------

def wigner(rho, xvec, pvec):
    """``W(x, p) = (1/pi) Tr[rho D(beta) P D(beta)^dag]`` with ``beta = (x + i p)/sqrt(2)``.

    Evaluated by the Laguerre-polynomial recursion over matrix elements, which
    avoids building displacement operators. Returns an array indexed ``[p, x]``.
    """
    rho = np.asarray(rho)
    dim = rho.shape[0]
    x, p = np.meshgrid(np.asarray(xvec, float), np.asarray(pvec, float))
    beta2 = 2.0 * (x + 1j * p) / math.sqrt(2)
    w_list = [np.exp(-0.5 * np.abs(beta2) ** 2) + 0j]
    w = np.real(rho[0, 0]) * np.real(w_list[0])
    for n in range(1, dim):
        w_list.append(beta2 * w_list[n - 1] / math.sqrt(n))
        w = w + 2 * np.real(rho[0, n] * w_list[n])
    for m in range(1, dim):
        prev = w_list[m].copy()
        w_list[m] = (np.conj(beta2) * prev - math.sqrt(m) * w_list[m - 1]) / math.sqrt(m)
        w = w + np.real(rho[m, m] * w_list[m])
        for n in range(m + 1, dim):
            nxt = (beta2 * w_list[n - 1] - math.sqrt(m) * prev) / math.sqrt(n)
            prev = w_list[n].copy()
            w_list[n] = nxt
            w = w + 2 * np.real(rho[m, n] * w_list[n])
    return w / math.pi
