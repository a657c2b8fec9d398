import dataclasses
import math
import warnings

import numpy as np
import pytest

from kerrline.circuit import JunctionSpec
from kerrline.errors import IdentityViolation, NearHalfQuantum, NotASquid
from kerrline.modes import ModeProperties, find_modes, mode_properties
from kerrline.nonlinear import (analyze, critical_photon_number, decay_rates, nonlinear_couplings,
                                pump_amplitude_from_derivatives, pump_amplitudes, self_kerr)

from conftest import HALF, TWO_PI, make_spec


def _synthetic(index, ec_hz, eta):
    return ModeProperties(index=index, omega=TWO_PI * index * 1e9, delta_u=1.0,
                          resonator_capacitance=1e-12, resonator_inductance=1e-9,
                          mode_inductance=1e-9, junction_blind=False, rescaled_capacitance=1e-12,
                          rescaled_inductance=1e-9, eta_c=0.0, eta_l=eta, charging_energy_hz=ec_hz)


def test_cross_kerr_identity(jpc_spec):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        nl = analyze(jpc_spec, 0.37, count=4).couplings
    for i in range(len(nl.modes)):
        for j in range(len(nl.modes)):
            if i != j:
                assert nl.kerr[i, j] / math.sqrt(nl.kerr[i, i] * nl.kerr[j, j]) == pytest.approx(2, rel=1e-14)
    np.testing.assert_allclose(nl.shifted_omega, nl.omega - nl.kerr.sum(axis=1), rtol=1e-15)


def test_kerr_over_participation_is_two_pi(cat_spec):
    for flux in (0.0, 0.3, 0.5):
        p = mode_properties(find_modes(cat_spec, flux, count=1))[0]
        assert self_kerr(p) / (p.charging_energy_hz * p.eta_l) == pytest.approx(TWO_PI, rel=1e-15)


def test_beam_splitter_half_factor_with_equal_kerr():
    props = [_synthetic(m, 100e6, 0.3) for m in (1, 2, 3)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        nl = nonlinear_couplings(props)
    assert nl.beam_splitter(1, 1, 2) / nl.beam_splitter(3, 1, 2) == pytest.approx(0.5, rel=1e-14)
    assert nl.beam_splitter(3, 2, 1) == nl.beam_splitter(3, 1, 2)
    assert all(m < n for (_, m, n) in nl.zeta)


def test_beam_splitter_formula():
    props = [_synthetic(1, 50e6, 0.1), _synthetic(2, 80e6, 0.4), _synthetic(3, 30e6, 0.2)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        nl = nonlinear_couplings(props)
    k = np.diag(nl.kerr)
    assert nl.zeta[(3, 1, 2)] == pytest.approx((k[2] ** 2 * k[0] * k[1]) ** 0.25, rel=1e-14)
    assert nl.zeta[(2, 2, 3)] == pytest.approx(0.5 * (k[1] ** 3 * k[2]) ** 0.25, rel=1e-14)


def test_truncation_warning_when_last_mode_dominates():
    props = [_synthetic(1, 1e6, 0.01), _synthetic(2, 500e6, 0.9)]
    with pytest.warns(RuntimeWarning, match="not converged"):
        nonlinear_couplings(props)


def test_blind_modes_excluded(centered_spec):
    nl = analyze(centered_spec, 0.0, count=4).couplings
    assert nl.modes == (1, 3)


def test_pump_one_photon_vanishes_for_symmetric_squid(jpc_spec):
    basis = find_modes(jpc_spec, 0.37, count=3)
    pumps = pump_amplitudes(jpc_spec, basis, mode_properties(basis), 0.37, 0.02)
    assert np.all(pumps.one_photon == 0)
    np.testing.assert_allclose(pumps.two_photon, pumps.two_photon.T, rtol=0)


def test_pump_two_photon_vanishes_at_zero_flux(jpc_spec):
    basis = find_modes(jpc_spec, 0.0, count=3)
    pumps = pump_amplitudes(jpc_spec, basis, mode_properties(basis), 0.0, 0.02)
    assert np.all(pumps.two_photon == 0)


def test_pump_requires_squid(centered_spec):
    basis = find_modes(centered_spec, count=1)
    with pytest.raises(NotASquid):
        pump_amplitudes(centered_spec, basis, mode_properties(basis), 0.1, 0.02)
    with pytest.raises(NotASquid):
        pump_amplitude_from_derivatives(centered_spec, 1, 1, 0.1, 0.02)


def test_large_rf_warns(jpc_spec):
    basis = find_modes(jpc_spec, 0.3, count=2)
    with pytest.warns(RuntimeWarning, match="rf flux"):
        pump_amplitudes(jpc_spec, basis, mode_properties(basis), 0.3, 0.2)


def test_derivative_form_guards(jpc_spec, cat_spec):
    with pytest.raises(NearHalfQuantum):
        pump_amplitude_from_derivatives(jpc_spec, 1, 2, 0.49995, 0.02)
    with pytest.raises(NearHalfQuantum):
        pump_amplitude_from_derivatives(jpc_spec.with_junction(asymmetry=0.2), 1, 2, 0.3, 0.02)


def test_derivative_form_step_halving(jpc_spec):
    g1 = pump_amplitude_from_derivatives(jpc_spec, 1, 2, 0.37, 0.02, step=1e-4)
    g2 = pump_amplitude_from_derivatives(jpc_spec, 1, 2, 0.37, 0.02, step=5e-5)
    assert abs(g1 - g2) / g1 < 1e-3


def test_both_pump_forms_vanish_near_zero_flux(jpc_spec):
    basis = find_modes(jpc_spec, 1e-3, count=2)
    g = pump_amplitudes(jpc_spec, basis, mode_properties(basis), 1e-3, 0.02).g(1, 2)
    g_fd = pump_amplitude_from_derivatives(jpc_spec, 1, 2, 1e-3, 0.02, step=1e-4)
    ref = pump_amplitudes(jpc_spec, find_modes(jpc_spec, 0.37, count=2),
                          mode_properties(find_modes(jpc_spec, 0.37, count=2)), 0.37, 0.02).g(1, 2)
    assert g < 0.01 * ref and g_fd < 0.01 * ref


def test_closed_resonator_has_no_loss():
    spec = make_spec(JunctionSpec.single(100e9), 0.2 * HALF, c_ports=0.0)
    assert np.all(decay_rates(spec, find_modes(spec, count=3)) == 0)


def test_loss_quadratic_in_port_capacitance(cat_spec):
    k1 = decay_rates(cat_spec, find_modes(cat_spec, count=2))
    doubled = cat_spec.with_ports(c_in=5e-15, c_out=5e-15)
    k2 = decay_rates(doubled, find_modes(doubled, count=2))
    np.testing.assert_allclose(k2 / k1, 4, rtol=0.05)


def test_critical_photon_number_forms_and_regimes(cat_spec):
    strong = analyze(cat_spec, 0.5, count=1)
    weak = analyze(cat_spec, 0.0, count=1)
    n_strong = critical_photon_number(strong.props[0], strong.ej_hz)
    n_weak = critical_photon_number(weak.props[0], weak.ej_hz)
    assert 3 < n_strong < 30
    assert n_weak > 100


def test_critical_photon_number_detects_inconsistency(cat_spec):
    pt = analyze(cat_spec, 0.5, count=1)
    bad = dataclasses.replace(pt.props[0], eta_l=pt.props[0].eta_l * 1.01)
    with pytest.raises(IdentityViolation):
        critical_photon_number(bad, pt.ej_hz)


def test_couplings_are_bit_deterministic(jpc_spec):
    a = analyze(jpc_spec, 0.37, count=3)
    b = analyze(jpc_spec, 0.37, count=3)
    assert a.couplings.kerr.tobytes() == b.couplings.kerr.tobytes()
    assert a.kappa.tobytes() == b.kappa.tobytes()
