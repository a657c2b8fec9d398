"""Reduced qubit/oscillator models and coupling strengths extracted from exact modes."""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import minimize_scalar

from .circuit import effective_josephson_energy
from .constants import ALPHA_FS, E_CHARGE, H_PLANCK, REDUCED_PHI_0, Z_VACUUM
from .errors import NoCrossingFound, NotConverged
from .modes import find_modes, mode_properties
from .nonlinear import self_kerr

TWO_PI = 2 * math.pi


def charging_energy_hz(capacitance):
    return E_CHARGE**2 / (2 * capacitance) / H_PLANCK


def inductive_energy_hz(inductance):
    return REDUCED_PHI_0**2 / inductance / H_PLANCK


@dataclass(frozen=True)
class InlineTransmonModel:
    """``H/h = 4 E_C n^2 + (E_L/2) phi^2 - E_J cos(phi)`` with energies in Hz."""

    ec_hz: float
    el_hz: float
    ej_hz: float

    def __post_init__(self):
        if not self.ec_hz > 0:
            raise ValueError("E_C must be positive")
        if self.el_hz < 0 or self.ej_hz < 0:
            raise ValueError("E_L and E_J must be non-negative")

    @classmethod
    def from_basis(cls, basis, mode=1):
        """Effective single-mode model of a junction-coupled mode of ``basis``."""
        props = mode_properties(basis)[mode - 1]
        du = props.delta_u
        ec = (E_CHARGE * du) ** 2 / (2 * basis.total_capacitance) / H_PLANCK
        el = inductive_energy_hz(props.resonator_inductance * du**2)
        return cls(ec_hz=ec, el_hz=el, ej_hz=basis.ej_hz)


@dataclass(frozen=True)
class TransmonSpectrum:
    levels_hz: np.ndarray
    omega_01: float
    anharmonicity: float
    omega_01_estimate: float
    anharmonicity_estimate: float
    grid_points: int
    phi_max: float


def _sinc_kinetic(n, spacing, ec):
    i = np.arange(n)
    d = i[:, None] - i[None, :]
    with np.errstate(divide="ignore"):
        t = 2.0 * (-1.0) ** np.abs(d) / d.astype(float) ** 2
    np.fill_diagonal(t, math.pi**2 / 3)
    return 4 * ec / spacing**2 * t


def _periodic_kinetic(n, ec):
    charges = np.arange(n) - (n - 1) // 2
    phi = 2 * math.pi * np.arange(n) / n
    phase = np.exp(1j * np.outer(phi, charges))
    return 4 * ec * np.real(phase @ np.diag(charges.astype(float) ** 2) @ phase.conj().T) / n


def inline_transmon_spectrum(model, basis_size=31, levels=6, boundary_tol=1e-10, max_points=8001):
    """Lowest levels of the in-line transmon Hamiltonian on a phase grid.

    A sinc-DVR grid on ``[-phi_max, phi_max]`` is used when ``E_L > 0``; the box
    is doubled until the ground state vanishes at the edges. For ``E_L = 0``
    the problem is 2pi-periodic and a periodic Fourier grid is used instead.
    ``basis_size`` is the minimum number of grid points (odd, >= 31).
    """
    if basis_size < 31 or basis_size % 2 == 0:
        raise ValueError("basis_size must be odd and >= 31")
    ec, el, ej = model.ec_hz, model.el_hz, model.ej_hz
    n_charge = 12 + 10 * ((ej + el) / (8 * ec)) ** 0.25
    spacing = math.pi / n_charge

    if el == 0:
        n = max(basis_size, 2 * int(math.ceil(n_charge)) + 1)
        n += 1 - n % 2
        phi = 2 * math.pi * np.arange(n) / n - math.pi
        h = _periodic_kinetic(n, ec) - np.diag(ej * np.cos(phi))
        energies = eigh(h, eigvals_only=True, subset_by_index=[0, min(levels, n) - 1])
        phi_max = math.pi
    else:
        phi_max = 2 * math.pi
        while True:
            n = max(basis_size, 2 * int(math.ceil(phi_max / spacing)) + 1)
            n += 1 - n % 2
            if n > max_points:
                raise NotConverged(f"phase grid would need more than {max_points} points")
            phi = np.linspace(-phi_max, phi_max, n)
            h = _sinc_kinetic(n, phi[1] - phi[0], ec)
            h[np.diag_indices(n)] += 0.5 * el * phi**2 - ej * np.cos(phi)
            energies, vecs = eigh(h, subset_by_index=[0, min(levels, n) - 1])
            ground = np.abs(vecs[:, 0])
            edge = max(ground[0], ground[-1]) / ground.max()
            if edge < boundary_tol:
                break
            phi_max *= 2

    omega_01 = TWO_PI * (energies[1] - energies[0])
    anharm = TWO_PI * ((energies[2] - energies[1]) - (energies[1] - energies[0]))
    return TransmonSpectrum(
        levels_hz=np.asarray(energies),
        omega_01=omega_01,
        anharmonicity=anharm,
        omega_01_estimate=TWO_PI * math.sqrt(8 * ec * (el + ej)),
        anharmonicity_estimate=-TWO_PI * ec * ej / (ej + el) if ej + el > 0 else 0.0,
        grid_points=n,
        phi_max=phi_max,
    )


@dataclass(frozen=True)
class CouplingReport:
    omega_r: float
    omega_p: float
    g: float
    anharmonicity: float
    model: str
    provenance: dict = field(default_factory=dict)

    @property
    def ratio(self):
        return self.g / self.omega_p


def current_biased_coupling(inductance, capacitance, cj, ej_hz):
    """Junction biased by the current of a lumped LC oscillator.

    ``g/omega_p = (omega_r/2omega_p) sqrt(Z_vac/(8 pi alpha Z_r)) [E_C/(8(E_J+E_L))]^(1/4)``.
    """
    ec = charging_energy_hz(cj)
    el = REDUCED_PHI_0**2 / (4 * inductance) / H_PLANCK
    if ej_hz + el <= 10 * ec:
        warnings.warn("E_J + E_L is not large compared to E_C; the harmonic qubit "
                      "approximation behind this coupling is unreliable",
                      RuntimeWarning, stacklevel=2)
    omega_p = TWO_PI * math.sqrt(8 * ec * (ej_hz + el))
    omega_r = 1 / math.sqrt(inductance * capacitance)
    z_r = math.sqrt(inductance / capacitance)
    ratio = (omega_r / (2 * omega_p)) * math.sqrt(Z_VACUUM / (8 * math.pi * ALPHA_FS * z_r)) \
        * (ec / (8 * (ej_hz + el))) ** 0.25
    return CouplingReport(
        omega_r=omega_r, omega_p=omega_p, g=ratio * omega_p,
        anharmonicity=-TWO_PI * ec * ej_hz / (ej_hz + el), model="current_biased",
        provenance={"L": inductance, "C": capacitance, "cj": cj, "ej_hz": ej_hz,
                    "ec_hz": ec, "el_hz": el, "z_r": z_r},
    )


def end_coupled_ratio(z_r_renorm, ej_hz, ec_hz):
    """``g/omega_p = sqrt(2 pi Z'_r alpha / Z_vac) (E_J/2E_C)^(1/4)``."""
    return math.sqrt(2 * math.pi * z_r_renorm * ALPHA_FS / Z_VACUUM) * (ej_hz / (2 * ec_hz)) ** 0.25


def end_coupled_model(spec, flux=0.0, omega_r=None):
    """Junction a short distance from the right end, coupled to the lambda/2 mode."""
    lq = spec.distance_to_right_end
    two_l = 2 * spec.half_length
    if lq / two_l > 0.1:
        warnings.warn(f"l_q/2l = {lq / two_l:.3g} is not small; single-mode picture is poor",
                      RuntimeWarning, stacklevel=2)
    c0 = spec.left.c_per_m
    cj = spec.junction.cj
    c_r = (two_l * c0 + cj) / 2
    c_island = lq * spec.right.c_per_m
    c_q = cj + c_island
    ec = charging_energy_hz(c_q)
    ej = effective_josephson_energy(spec.junction, flux)
    if omega_r is None:
        omega_r = find_modes(spec.without_junction(), count=1).modes[0].omega
    z_r = 1 / (omega_r * c_r)
    omega_p = TWO_PI * math.sqrt(8 * ec * ej)
    ratio = end_coupled_ratio(z_r, ej, ec)
    charge_coupling = cj / (c_q * c_r)
    return CouplingReport(
        omega_r=omega_r, omega_p=omega_p, g=ratio * omega_p, anharmonicity=-TWO_PI * ec,
        model="end_coupled",
        provenance={"l_q": lq, "c_r": c_r, "c_q": c_q, "c_island": c_island, "ec_hz": ec,
                    "ej_hz": ej, "z_r_renorm": z_r, "charge_coupling_per_f": charge_coupling,
                    "charge_coupling_negligible": bool(5 * cj < c_island and 5 * c_island < two_l * c0)},
    )


@dataclass(frozen=True)
class CrossingPoint:
    flux: float
    omega_1: float
    omega_2: float
    kerr_11: float
    kerr_22: float
    eta_l1: float
    eta_l2: float
    omega_r_eff: float
    omega_p_eff: float


def _two_modes(spec, flux, count):
    basis = find_modes(spec, flux, count=count)
    return basis


def _crossing_point(spec, flux, count, omega_r):
    basis = _two_modes(spec, flux, count)
    props = mode_properties(basis)
    eff = end_coupled_model(spec, flux, omega_r=omega_r)

    def kerr(p):
        return 0.0 if p.junction_blind else self_kerr(p)

    def eta(p):
        return 0.0 if p.junction_blind else p.eta_l

    return CrossingPoint(flux=flux, omega_1=basis[1].omega, omega_2=basis[2].omega,
                         kerr_11=kerr(props[0]), kerr_22=kerr(props[1]),
                         eta_l1=eta(props[0]), eta_l2=eta(props[1]),
                         omega_r_eff=eff.omega_r, omega_p_eff=eff.omega_p)


def avoided_crossing(spec, flux_range=(0.0, 0.5), n_points=101, count=3, executor=None):
    """Locate the minimum splitting of modes 1 and 2 over a flux sweep.

    Returns a :class:`CouplingReport` (``g`` = half the minimum splitting of the
    linear modes, ``omega_p`` = their mean there) and the sweep table.
    """
    fluxes = np.linspace(flux_range[0], flux_range[1], n_points)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        omega_r = find_modes(spec.without_junction(), count=1).modes[0].omega
        args = [(spec, float(f), count, omega_r) for f in fluxes]
        if executor is None:
            table = [_crossing_point(*a) for a in args]
        else:
            table = list(executor.map(_crossing_point_star, args))
    split = np.array([p.omega_2 - p.omega_1 for p in table])
    i = int(np.argmin(split))
    if i == 0 or i == len(split) - 1:
        raise NoCrossingFound("mode splitting is monotone over the flux range")

    def splitting(f):
        b = find_modes(spec, f, count=2)
        return b[2].omega - b[1].omega

    res = minimize_scalar(splitting, bounds=(fluxes[i - 1], fluxes[i + 1]), method="bounded",
                          options={"xatol": 1e-9})
    f0 = float(res.x)
    best = find_modes(spec, f0, count=2)
    g = 0.5 * (best[2].omega - best[1].omega)
    omega_p = 0.5 * (best[2].omega + best[1].omega)
    return CouplingReport(
        omega_r=omega_r, omega_p=omega_p, g=g, anharmonicity=float("nan"),
        model="exact_numeric", provenance={"flux": f0, "n_points": n_points},
    ), table


def _crossing_point_star(args):
    return _crossing_point(*args)


@dataclass(frozen=True)
class LengthPoint:
    total_length: float
    omega_1: float
    omega_p: float
    kerr_11: float
    ec_transmon_hz: float
    eta_l1: float
    inline: InlineTransmonModel

    @property
    def frequency_ratio(self):
        return self.omega_1 / self.omega_p

    @property
    def kerr_ratio(self):
        return self.kerr_11 / (TWO_PI * self.ec_transmon_hz)


def length_point(spec, total_length, flux=0.0, count=2):
    """Mode 1 of ``spec`` rescaled to ``total_length``, compared with the lumped transmon."""
    s = spec.scaled_length(total_length / 2)
    basis = find_modes(s, flux, count=count)
    p = mode_properties(basis)[0]
    ec_t = charging_energy_hz(total_length * s.left.c_per_m / 4 + s.junction.cj)
    ej = basis.ej_hz
    return LengthPoint(total_length=total_length, omega_1=p.omega,
                       omega_p=TWO_PI * math.sqrt(8 * ec_t * ej), kerr_11=self_kerr(p),
                       ec_transmon_hz=ec_t, eta_l1=p.eta_l,
                       inline=InlineTransmonModel.from_basis(basis))


def length_sweep(spec, lengths, flux=0.0, executor=None):
    lengths = [float(x) for x in lengths]
    if executor is None:
        return [length_point(spec, x, flux) for x in lengths]
    return list(executor.map(length_point, [spec] * len(lengths), lengths, [flux] * len(lengths)))
