"""Quartic-order couplings, flux-pump amplitudes, port losses and critical photon numbers."""

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .circuit import effective_josephson_energy
from .constants import H_PLANCK, HBAR, PHI_0
from .errors import IdentityViolation, NearHalfQuantum, NotASquid
from .modes import find_modes, mode_properties

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class NonlinearCouplings:
    """Couplings among junction-coupled modes. All rates in rad/s.

    ``modes`` holds the 1-based indices of the coupled modes; array axes follow
    that order. ``zeta`` maps ``(l, m, n)`` with ``m < n`` to the beam-splitter
    amplitude.
    """

    modes: tuple
    omega: np.ndarray
    shifted_omega: np.ndarray
    kerr: np.ndarray
    zeta: dict

    def self_kerr(self, m):
        i = self.modes.index(m)
        return self.kerr[i, i]

    def cross_kerr(self, m, n):
        return self.kerr[self.modes.index(m), self.modes.index(n)]

    def beam_splitter(self, l, m, n):
        return self.zeta[(l, min(m, n), max(m, n))]


def self_kerr(props):
    """K_mm (rad/s) of one junction-coupled mode."""
    return TWO_PI * props.charging_energy_hz * props.eta_l


def nonlinear_couplings(props, ej_hz=None):
    """Self/cross-Kerr matrix, beam-splitter tensor and shifted frequencies.

    ``ej_hz`` is accepted for interface symmetry; the couplings depend on it
    only through the participation ratios already stored in ``props``.
    """
    coupled = [p for p in props if not p.junction_blind]
    if not coupled:
        raise ValueError("no junction-coupled modes")
    idx = tuple(p.index for p in coupled)
    kdiag = np.array([self_kerr(p) for p in coupled])
    kerr = 2.0 * np.sqrt(np.outer(kdiag, kdiag))
    np.fill_diagonal(kerr, kdiag)
    zeta = {}
    for a, l in enumerate(idx):
        for b, m in enumerate(idx):
            for c in range(b + 1, len(idx)):
                n = idx[c]
                factor = 0.5 if l == m else 1.0
                zeta[(l, m, n)] = factor * (kdiag[a] ** 2 * kdiag[b] * kdiag[c]) ** 0.25
    omega = np.array([p.omega for p in coupled])
    shifts = kerr.sum(axis=1)
    if len(idx) > 1:
        last = kerr[:-1, -1]
        if np.any(np.abs(last) > 0.01 * np.abs(shifts[:-1])):
            warnings.warn(
                "frequency shifts not converged in the mode count: the highest solved mode "
                "contributes more than 1% of the shift; solve more modes",
                RuntimeWarning, stacklevel=2)
    return NonlinearCouplings(modes=idx, omega=omega, shifted_omega=omega - shifts,
                              kerr=kerr, zeta=zeta)


@dataclass(frozen=True)
class PumpAmplitudes:
    modes: tuple
    one_photon: np.ndarray
    two_photon: np.ndarray
    flux_dc: float
    flux_rf: float
    omega_d: float

    def g(self, m, n=None):
        if n is None:
            return self.one_photon[self.modes.index(m)]
        return self.two_photon[self.modes.index(m), self.modes.index(n)]


def pump_amplitudes(spec, basis, props, flux, flux_rf, omega_d=0.0):
    """One- and two-photon flux-pump amplitudes g_m, g_mn (rad/s)."""
    j = spec.junction
    if not j.is_squid:
        raise NotASquid("flux pumping requires a SQUID junction")
    if abs(flux_rf) > 0.1:
        warnings.warn(f"rf flux amplitude {flux_rf} Phi_0 is not small; expansion may fail",
                      RuntimeWarning, stacklevel=2)
    coupled = [p for p in props if not p.junction_blind]
    idx = tuple(p.index for p in coupled)
    phi_x = TWO_PI * flux
    phi_rf = TWO_PI * flux_rf
    ej_joule = H_PLANCK * j.ejsigma_hz
    c = np.array([p.rescaled_capacitance for p in coupled])
    w = np.array([p.omega for p in coupled])
    g1 = (TWO_PI / PHI_0) * j.asymmetry * ej_joule * math.cos(phi_x / 2) \
        / np.sqrt(8 * HBAR * c * w) * phi_rf
    g2 = (TWO_PI / PHI_0) ** 2 * ej_joule * math.sin(phi_x / 2) \
        / (4 * np.sqrt(np.outer(c * w, c * w))) * phi_rf
    return PumpAmplitudes(modes=idx, one_photon=g1, two_photon=g2, flux_dc=flux,
                          flux_rf=flux_rf, omega_d=omega_d)


def pump_amplitude_from_derivatives(spec, m, n, flux, flux_rf, step=1e-4, count=None):
    """Two-photon amplitude from the flux slopes of the mode frequencies (rad/s).

    Central differences re-solve the mode basis at ``flux +- step``. Only
    meaningful for a nearly symmetric SQUID away from half a flux quantum.
    """
    j = spec.junction
    if not j.is_squid:
        raise NotASquid("flux derivative requires a SQUID junction")
    if j.asymmetry >= 0.1:
        raise NearHalfQuantum(f"asymmetry d={j.asymmetry} is not small (needs d < 0.1)")
    if abs(abs(flux % 1.0) - 0.5) <= step:
        raise NearHalfQuantum(f"flux {flux} within {step} of Phi_0/2")
    count = count or max(m, n)
    up = find_modes(spec, flux + step, count=count).frequencies
    down = find_modes(spec, flux - step, count=count).frequencies
    slope = (up - down) / (2 * step)
    return math.sqrt(abs(slope[m - 1] * slope[n - 1])) * flux_rf


def decay_rates(spec, basis):
    """Photon loss rate of each mode through the capacitive ports (rad/s).

    Perturbative model: each port capacitor loads the mode with the external
    impedance, ``kappa = sum_port omega^2 C^2 Z_ext u(x_port)^2 / C_Sigma``.
    """
    ports = spec.ports
    out = []
    for mode in basis.modes:
        u_in, u_out = mode.at_ports()
        rate = (ports.c_in**2 * u_in**2 + ports.c_out**2 * u_out**2) \
            * mode.omega**2 * ports.z_ext / basis.total_capacitance
        out.append(rate)
    return np.array(out)


def critical_photon_number(props, ej_hz, omega=None, rtol=1e-9):
    """Photon number at which the mode energy reaches the Josephson energy.

    Returns ``E_J / (hbar omega)`` after checking it against the two equivalent
    forms written with the participation ratio and charging energy or Kerr rate.
    """
    if props.junction_blind:
        raise ValueError(f"mode {props.index} does not couple to the junction")
    omega = props.omega if omega is None else omega
    direct = TWO_PI * ej_hz / omega
    via_charging = math.sqrt(props.eta_l) * math.sqrt(ej_hz / (8 * props.charging_energy_hz))
    kerr_hz = self_kerr(props) / TWO_PI
    via_kerr = props.eta_l * math.sqrt(ej_hz / (8 * kerr_hz))
    for other in (via_charging, via_kerr):
        if abs(other - direct) > rtol * abs(direct):
            raise IdentityViolation(
                f"critical photon number forms disagree: {direct!r}, {via_charging!r}, {via_kerr!r}")
    return direct


@dataclass(frozen=True)
class FluxPoint:
    flux: float
    ej_hz: float
    basis: object
    props: list
    couplings: NonlinearCouplings | None
    kappa: np.ndarray


def analyze(spec, flux=0.0, count=5, **solver):
    """Modes, lumped properties, couplings and decay rates at one flux point."""
    basis = find_modes(spec, flux, count=count, **solver)
    props = mode_properties(basis)
    ej = effective_josephson_energy(spec.junction, flux)
    couplings = None
    if any(not p.junction_blind for p in props):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            couplings = nonlinear_couplings(props, ej)
    return FluxPoint(flux=flux, ej_hz=ej, basis=basis, props=props, couplings=couplings,
                     kappa=decay_rates(spec, basis))
