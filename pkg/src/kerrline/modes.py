"""Normal modes of the linearized resonator + junction circuit.

Each mode envelope is a sinusoid on either side of the junction,

    u(x) = a_left  sin(k (x + l) - phi_i)      for x <= x_J
    u(x) = a_right sin(k' (x - l) + phi_o)     for x >  x_J,

with ``k' v_r = k v_l``. The port phases follow from the capacitive boundary
condition, ``tan(phi) = 1/(omega C_port Z)``, which gives phi = pi/2 (open end)
for a vanishing port capacitor.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .circuit import effective_josephson_energy, inverse_josephson_inductance
from .constants import E_CHARGE, H_PLANCK, REDUCED_PHI_0
from .errors import DegenerateBracket, FewerRootsThanRequested, SumRuleViolation

ROOT_RTOL = 1e-12
BLIND_THRESHOLD = 1e-9
SUM_RULE_TOL = 1e-6


def _phases(k, spec):
    omega = k * spec.left.velocity
    phi_i = np.arctan2(1.0, omega * spec.ports.c_in * spec.left.impedance)
    phi_o = np.arctan2(1.0, omega * spec.ports.c_out * spec.right.impedance)
    return omega, phi_i, phi_o


def _angles(k, spec):
    """Junction-side phases theta_l, theta_r of the left and right sinusoids."""
    l = spec.half_length
    xj = spec.junction_position
    omega, phi_i, phi_o = _phases(k, spec)
    kp = k * spec.left.velocity / spec.right.velocity
    th_l = k * (xj + l) - phi_i
    th_r = kp * (xj - l) + phi_o
    return omega, phi_i, phi_o, th_l, th_r


def eigenvalue_residual(k, spec, ej_hz):
    """Pole-free residual of the wavevector eigenvalue equation.

    The tangent form is multiplied through by ``cos(theta_l) cos(theta_r)``; the
    result is proportional to the determinant of the junction boundary
    conditions, so its zeros (k > 0) are exactly the normal modes. It is scaled
    by ``1/(1 + L_l l / L_J)`` so the short-junction limit stays finite.
    """
    k = np.asarray(k, dtype=float)
    _, _, _, th_l, th_r = _angles(k, spec)
    z_ratio = spec.right.impedance / spec.left.impedance
    cl, sl = np.cos(th_l), np.sin(th_l)
    cr, sr = np.cos(th_r), np.sin(th_r)
    mismatch = z_ratio * sr * cl - sl * cr
    inv_lj = inverse_josephson_inductance(ej_hz)
    if spec.junction.is_short or math.isinf(inv_lj):
        return mismatch
    l = spec.half_length
    kl = k * l
    lin = spec.left.l_per_m * l * inv_lj
    stiffness = lin - kl**2 * spec.junction.cj / (spec.left.c_per_m * l)
    return (stiffness * mismatch - kl * cl * cr) / (1.0 + lin)


@dataclass(frozen=True)
class ModeEnvelope:
    index: int
    k: float
    omega: float
    k_right: float
    a_left: float
    a_right: float
    phi_i: float
    phi_o: float
    delta_u: float
    half_length: float = field(repr=False)
    junction_position: float = field(repr=False)
    junction_blind: bool = False

    @property
    def A(self):
        return self.a_left

    @property
    def B(self):
        return self.a_right / self.a_left if self.a_left != 0 else math.inf

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        l, xj = self.half_length, self.junction_position
        left = self.a_left * np.sin(self.k * (x + l) - self.phi_i)
        right = self.a_right * np.sin(self.k_right * (x - l) + self.phi_o)
        return np.where(x <= xj, left, right)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        l, xj = self.half_length, self.junction_position
        left = self.a_left * self.k * np.cos(self.k * (x + l) - self.phi_i)
        right = self.a_right * self.k_right * np.cos(self.k_right * (x - l) + self.phi_o)
        return np.where(x <= xj, left, right)

    def at_ports(self):
        return -self.a_left * math.sin(self.phi_i), self.a_right * math.sin(self.phi_o)

    def max_amplitude(self):
        return max(abs(self.a_left), abs(self.a_right))

    def to_record(self):
        return {
            "m": self.index,
            "k_per_m": self.k,
            "omega_rad_s": self.omega,
            "A": self.A,
            "B": self.B,
            "phi_i": self.phi_i,
            "phi_o": self.phi_o,
            "delta_u": self.delta_u,
        }


@dataclass(frozen=True)
class ModeBasis:
    circuit: object
    modes: tuple
    total_capacitance: float
    ej_hz: float
    flux: float = 0.0

    def __len__(self):
        return len(self.modes)

    def __getitem__(self, m):
        """Mode by 1-based index."""
        return self.modes[m - 1]

    @property
    def frequencies(self):
        return np.array([mode.omega for mode in self.modes])

    def to_records(self):
        return [mode.to_record() for mode in self.modes]


def _default_k_max(spec, count):
    ratio = spec.left.velocity / spec.right.velocity
    return (count + 4) * math.pi / (spec.half_length * (1.0 + ratio))


def _scan_roots(spec, ej_hz, k_max, points):
    k = np.linspace(k_max / points, k_max, points + 1)
    r = eigenvalue_residual(k, spec, ej_hz)
    mid = eigenvalue_residual(0.5 * (k[1:] + k[:-1]), spec, ej_hz)
    s = np.sign(r)
    roots = []
    for i in np.flatnonzero(s == 0):
        roots.append(float(k[i]))
    crossing = s[:-1] * s[1:] < 0
    hidden = (s[:-1] * s[1:] > 0) & (np.sign(mid) != s[:-1])
    if np.any(hidden):
        i = int(np.flatnonzero(hidden)[0])
        raise DegenerateBracket(
            f"two roots inside scan cell [{k[i]:.9g}, {k[i + 1]:.9g}] 1/m; increase scan_points"
        )

    def f(x):
        return float(eigenvalue_residual(x, spec, ej_hz))

    for i in np.flatnonzero(crossing):
        roots.append(brentq(f, k[i], k[i + 1], xtol=1e-300, rtol=ROOT_RTOL, maxiter=200))
    return sorted(roots)


def _build_envelope(index, k, spec, ej_hz):
    l = spec.half_length
    xj = spec.junction_position
    zl, zr = spec.left.impedance, spec.right.impedance
    omega, phi_i, phi_o, th_l, th_r = _angles(k, spec)
    omega, phi_i, phi_o, th_l, th_r = map(float, (omega, phi_i, phi_o, th_l, th_r))
    cl, sl, cr, sr = math.cos(th_l), math.sin(th_l), math.cos(th_r), math.sin(th_r)

    # Null vector of the two junction conditions; use the better-conditioned row.
    row_current = (cl / zl, -cr / zr)
    inv_lj = inverse_josephson_inductance(ej_hz)
    if spec.junction.is_short or math.isinf(inv_lj):
        row_kink = (sl, -sr)
    else:
        stiff = inv_lj - omega**2 * spec.junction.cj
        scale = abs(stiff) + omega / zl
        row_kink = ((omega / zl * cl + stiff * sl) / scale, -stiff * sr / scale)
    n_cur = math.hypot(*row_current) * zl
    n_kink = math.hypot(*row_kink)
    p, q = row_current if n_cur >= n_kink else row_kink
    a_left, a_right = q, -p

    kp = k * spec.left.velocity / spec.right.velocity
    xl, xr = xj + l, l - xj
    c0l, c0r = spec.left.c_per_m, spec.right.c_per_m
    norm = (
        a_left**2 * c0l * _int_sin_sin(k, -phi_i, k, -phi_i, 0.0, xl)
        + a_right**2 * c0r * _int_sin_sin(kp, phi_o, kp, phi_o, -xr, 0.0)
        + spec.ports.c_in * (a_left * math.sin(phi_i)) ** 2
        + spec.ports.c_out * (a_right * math.sin(phi_o)) ** 2
        + spec.junction.cj * (a_right * sr - a_left * sl) ** 2
    )
    scale = math.sqrt(spec.total_capacitance / norm)
    if a_left < 0 or (a_left == 0 and a_right < 0):
        scale = -scale
    a_left *= scale
    a_right *= scale
    delta_u = a_right * sr - a_left * sl
    blind = abs(delta_u) < BLIND_THRESHOLD * max(abs(a_left), abs(a_right))
    return ModeEnvelope(
        index=index, k=float(k), omega=omega, k_right=float(kp), a_left=a_left, a_right=a_right,
        phi_i=phi_i, phi_o=phi_o, delta_u=delta_u, half_length=l, junction_position=xj,
        junction_blind=blind,
    )


def find_modes(spec, flux=0.0, count=5, scan_points=None, k_max=None):
    """Solve for the ``count`` lowest normal modes at external flux ``flux`` (units of Phi_0)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    ej = effective_josephson_energy(spec.junction, flux)
    if not ej > 0:
        raise ValueError(f"effective Josephson energy must be positive, got {ej}")
    if k_max is None:
        k_max = _default_k_max(spec, count)
    if scan_points is None:
        scan_points = 2000 * (count + 4)
    roots = _scan_roots(spec, ej, k_max, int(scan_points))
    if len(roots) < count:
        raise FewerRootsThanRequested(len(roots), count, k_max)
    modes = tuple(_build_envelope(i + 1, k, spec, ej) for i, k in enumerate(roots[:count]))
    return ModeBasis(circuit=spec, modes=modes, total_capacitance=spec.total_capacitance,
                     ej_hz=ej, flux=flux)


# --- closed-form segment integrals ------------------------------------------

def _int_cos(kappa, c, s0, s1):
    """Integral of cos(kappa s + c) over [s0, s1]."""
    length = s1 - s0
    mid = 0.5 * (s0 + s1)
    return length * math.cos(kappa * mid + c) * float(np.sinc(kappa * length / (2 * math.pi)))


def _int_sin_sin(k1, c1, k2, c2, s0, s1):
    return 0.5 * (_int_cos(k1 - k2, c1 - c2, s0, s1) - _int_cos(k1 + k2, c1 + c2, s0, s1))


def _int_cos_cos(k1, c1, k2, c2, s0, s1):
    return 0.5 * (_int_cos(k1 - k2, c1 - c2, s0, s1) + _int_cos(k1 + k2, c1 + c2, s0, s1))


def _segment_terms(basis, m, n, derivative):
    spec = basis.circuit
    um, un = basis[m], basis[n]
    l, xj = spec.half_length, spec.junction_position
    integral = _int_cos_cos if derivative else _int_sin_sin
    left = um.a_left * un.a_left * integral(um.k, -um.phi_i, un.k, -un.phi_i, 0.0, xj + l)
    right = um.a_right * un.a_right * integral(
        um.k_right, um.phi_o, un.k_right, un.phi_o, -(l - xj), 0.0)
    if derivative:
        left *= um.k * un.k
        right *= um.k_right * un.k_right
    return left, right


def inner_product(m, n, basis):
    """Capacitance-weighted overlap of modes m and n (F); equals C_Sigma delta_mn."""
    spec = basis.circuit
    left, right = _segment_terms(basis, m, n, derivative=False)
    um, un = basis[m], basis[n]
    (im, om), (in_, on) = um.at_ports(), un.at_ports()
    return (spec.left.c_per_m * left + spec.right.c_per_m * right
            + spec.ports.c_in * im * in_ + spec.ports.c_out * om * on
            + spec.junction.cj * um.delta_u * un.delta_u)


def resonator_inductive_product(m, n, basis):
    """Line-only part of the derivative product, without the junction term (1/H)."""
    spec = basis.circuit
    left, right = _segment_terms(basis, m, n, derivative=True)
    return left / spec.left.l_per_m + right / spec.right.l_per_m


def derivative_inner_product(m, n, basis):
    """Inductive overlap of modes m and n (1/H); equals delta_mn / L_m."""
    inv_lj = inverse_josephson_inductance(basis.ej_hz)
    line = resonator_inductive_product(m, n, basis)
    du = basis[m].delta_u * basis[n].delta_u
    if math.isinf(inv_lj):
        return line
    return line + inv_lj * du


# --- effective lumped parameters --------------------------------------------

@dataclass(frozen=True)
class ModeProperties:
    index: int
    omega: float
    delta_u: float
    resonator_capacitance: float
    resonator_inductance: float
    mode_inductance: float
    junction_blind: bool
    rescaled_capacitance: float | None = None
    rescaled_inductance: float | None = None
    eta_c: float | None = None
    eta_l: float | None = None
    charging_energy_hz: float | None = None


def mode_properties(basis, check=True):
    """Per-mode effective lumped parameters and junction participation ratios."""
    spec = basis.circuit
    c_sigma = basis.total_capacitance
    inv_lj = inverse_josephson_inductance(basis.ej_hz)
    out = []
    for mode in basis.modes:
        m = mode.index
        c_res = inner_product(m, m, basis) - spec.junction.cj * mode.delta_u**2
        inv_l_res = resonator_inductive_product(m, m, basis)
        l_mode = 1.0 / (c_sigma * mode.omega**2)
        if mode.junction_blind or spec.junction.is_short or math.isinf(inv_lj):
            out.append(ModeProperties(
                index=m, omega=mode.omega, delta_u=mode.delta_u, resonator_capacitance=c_res,
                resonator_inductance=1.0 / inv_l_res, mode_inductance=l_mode, junction_blind=True))
            continue
        c_resc = c_sigma / mode.delta_u**2
        l_resc = l_mode * mode.delta_u**2
        eta_c = spec.junction.cj / c_resc
        eta_l = l_resc * inv_lj
        props = ModeProperties(
            index=m, omega=mode.omega, delta_u=mode.delta_u, resonator_capacitance=c_res,
            resonator_inductance=1.0 / inv_l_res, mode_inductance=l_mode, junction_blind=False,
            rescaled_capacitance=c_resc, rescaled_inductance=l_resc, eta_c=eta_c, eta_l=eta_l,
            charging_energy_hz=E_CHARGE**2 / (2 * c_resc) / H_PLANCK,
        )
        if check:
            cap_sum = eta_c + c_res / c_sigma
            ind_sum = eta_l + l_mode * inv_l_res
            if abs(cap_sum - 1) > SUM_RULE_TOL or abs(ind_sum - 1) > SUM_RULE_TOL:
                raise SumRuleViolation(
                    f"mode {m}: capacitive sum {cap_sum:.12g}, inductive sum {ind_sum:.12g}")
        out.append(props)
    return out


def junction_inductance_energy_hz(inductance):
    """Inductive energy (Phi_0/2pi)^2 / L expressed in Hz."""
    return REDUCED_PHI_0**2 / inductance / H_PLANCK


def calibrate_velocity(half_length, impedance, c_in, c_out, target_hz, bracket=(1e7, 3e8)):
    """Phase velocity giving a junction-free fundamental at ``target_hz`` (bisection)."""
    from scipy.optimize import bisect

    from .circuit import CircuitSpec, JunctionSpec, LineSegmentSpec, PortSpec

    def fundamental(v):
        seg = LineSegmentSpec.from_impedance_velocity(impedance, v)
        spec = CircuitSpec(half_length, 0.0, seg, seg, PortSpec(c_in, c_out), JunctionSpec.short())
        return find_modes(spec, count=1).modes[0].omega / (2 * math.pi) - target_hz

    return bisect(fundamental, *bracket, xtol=1e-6, rtol=1e-15, maxiter=200)
