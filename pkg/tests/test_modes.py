import math

import numpy as np
import pytest

from kerrline.circuit import JunctionSpec
from kerrline.errors import DegenerateBracket, FewerRootsThanRequested
from kerrline.modes import (calibrate_velocity, derivative_inner_product, eigenvalue_residual,
                            find_modes, inner_product, mode_properties)

from conftest import HALF, TWO_PI, make_spec

UNIT = math.pi / (2 * HALF)


def test_bare_open_line_roots_are_half_wavelengths():
    spec = make_spec(JunctionSpec.short(), 0.0, c_ports=0.0)
    ks = np.arange(1, 8) * UNIT
    assert np.max(np.abs(eigenvalue_residual(ks, spec, math.inf))) < 1e-12
    basis = find_modes(spec, count=7)
    np.testing.assert_allclose([m.k for m in basis.modes], ks, rtol=1e-12)


@pytest.mark.parametrize("ej", [1e9, 50e9, 5e12])
def test_centered_junction_leaves_even_modes_alone(ej):
    spec = make_spec(JunctionSpec.single(ej), 0.0, c_ports=0.0)
    assert abs(eigenvalue_residual(2 * UNIT, spec, ej)) < 1e-12
    assert abs(eigenvalue_residual(4 * UNIT, spec, ej)) < 1e-12
    basis = find_modes(spec, count=4)
    assert basis[2].k == pytest.approx(2 * UNIT, rel=1e-12)
    assert basis[4].k == pytest.approx(4 * UNIT, rel=1e-12)


def test_residual_changes_sign_at_each_root(centered_spec):
    basis = find_modes(centered_spec, count=6)
    k = np.linspace(1e-3, basis[6].k * 1.02, 10_000)
    r = eigenvalue_residual(k, centered_spec, basis.ej_hz)
    crossings = k[:-1][np.sign(r[:-1]) != np.sign(r[1:])]
    assert len(crossings) == 6
    for m, c in zip(basis.modes, crossings):
        assert abs(m.k - c) <= k[1] - k[0]


def test_bare_fundamental_is_calibrated(bare_spec):
    f1 = find_modes(bare_spec, count=1)[1].omega / TWO_PI
    assert f1 == pytest.approx(4.95e9, rel=1e-9)


def test_velocity_calibration_recovers_shipped_value():
    v = calibrate_velocity(HALF, 50.0, 10e-15, 10e-15, 4.95e9)
    assert v == pytest.approx(119987783.31377363, rel=1e-9)


def test_even_mode_is_junction_blind_at_center(centered_spec):
    basis = find_modes(centered_spec, count=4)
    for m in (2, 4):
        assert abs(basis[m].delta_u) < 1e-9 * basis[m].max_amplitude()
        assert basis[m].junction_blind
    assert not basis[1].junction_blind and not basis[3].junction_blind


def test_huge_ej_approaches_bare_line(bare_spec):
    near_short = bare_spec.with_junction(kind="single", ej_hz=1e15)
    f_short = find_modes(bare_spec, count=1)[1].omega
    f_near = find_modes(near_short, count=1)[1].omega
    assert f_near == pytest.approx(f_short, rel=1e-3)


def test_envelope_record_fields(centered_spec):
    rec = find_modes(centered_spec, count=2).to_records()[0]
    assert set(rec) == {"m", "k_per_m", "omega_rad_s", "A", "B", "phi_i", "phi_o", "delta_u"}
    assert rec["m"] == 1


def _gauss(f, a, b, panels=10_000, order=8):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    x = 0.5 * (edges[:-1] + edges[1:])[:, None] + half * nodes
    return float(np.sum(f(x) * half * weights))


def _quadrature_inner(basis, m, n, derivative=False):
    """Independent oracle: composite Gauss-Legendre over each segment."""
    from scipy.constants import e, h

    spec = basis.circuit
    um, un = basis[m], basis[n]
    l, xj = spec.half_length, spec.junction_position
    f = (lambda x: um.derivative(x) * un.derivative(x)) if derivative else (lambda x: um(x) * un(x))
    left = _gauss(f, -l, xj)
    right = _gauss(f, np.nextafter(xj, 1.0), l)
    if derivative:
        inv_lj = h * basis.ej_hz / (h / (2 * e) / TWO_PI) ** 2
        return left / spec.left.l_per_m + right / spec.right.l_per_m + inv_lj * um.delta_u * un.delta_u
    (im, om), (in_, on) = um.at_ports(), un.at_ports()
    return (spec.left.c_per_m * left + spec.right.c_per_m * right + spec.ports.c_in * im * in_
            + spec.ports.c_out * om * on + spec.junction.cj * um.delta_u * un.delta_u)


@pytest.fixture
def asymmetric_basis():
    spec = make_spec(JunctionSpec.single(80e9, cj=4e-15), 0.37 * HALF)
    return find_modes(spec, count=4)


def test_inner_product_orthonormal(asymmetric_basis):
    cs = asymmetric_basis.total_capacitance
    for m in range(1, 5):
        assert inner_product(m, m, asymmetric_basis) / cs == pytest.approx(1, abs=1e-10)
        for n in range(m + 1, 5):
            assert abs(inner_product(m, n, asymmetric_basis)) / cs < 1e-8


def test_derivative_product_gives_mode_inductance(asymmetric_basis):
    cs = asymmetric_basis.total_capacitance
    for m in range(1, 5):
        lm = 1 / (cs * asymmetric_basis[m].omega ** 2)
        for n in range(1, 5):
            assert abs(derivative_inner_product(m, n, asymmetric_basis) * lm - (m == n)) < 1e-6


@pytest.mark.parametrize("m, n", [(1, 1), (1, 2), (2, 3), (3, 3), (2, 4)])
def test_closed_forms_match_quadrature(asymmetric_basis, m, n):
    cs = asymmetric_basis.total_capacitance
    closed = inner_product(m, n, asymmetric_basis)
    assert abs(closed - _quadrature_inner(asymmetric_basis, m, n)) < 1e-10 * cs
    scale = cs * asymmetric_basis[max(m, n)].omega ** 2
    closed_d = derivative_inner_product(m, n, asymmetric_basis)
    assert abs(closed_d - _quadrature_inner(asymmetric_basis, m, n, True)) < 1e-10 * scale


def test_participation_sum_rules(asymmetric_basis):
    for p in mode_properties(asymmetric_basis):
        assert p.eta_c + p.resonator_capacitance / asymmetric_basis.total_capacitance == pytest.approx(1, abs=1e-6)
        assert p.eta_l + p.mode_inductance / p.resonator_inductance == pytest.approx(1, abs=1e-6)
        assert 0 <= p.eta_l <= 1


def test_blind_modes_have_no_rescaled_quantities(centered_spec):
    props = mode_properties(find_modes(centered_spec, count=2))
    assert props[1].junction_blind and props[1].eta_l is None and props[1].rescaled_capacitance is None


def test_participation_vanishes_for_strong_junction():
    spec = make_spec(JunctionSpec.single(1e16), 0.3 * HALF)
    assert mode_properties(find_modes(spec, count=1))[0].eta_l < 1e-4


def test_participation_tends_to_one_for_short_line():
    spec = make_spec(JunctionSpec.single(20e9, cj=5e-15), 0.0, c_ports=0.0)
    etas = [mode_properties(find_modes(spec.scaled_length(h), count=1))[0].eta_l
            for h in (6e-3, 6e-4, 6e-5)]
    assert etas[0] < etas[1] < etas[2]
    assert etas[2] > 0.999


def test_frequencies_monotone_in_ej():
    base = make_spec(JunctionSpec.single(1e9), 0.4 * HALF)
    ejs = np.geomspace(1e9, 1e14, 20)
    freqs = np.array([find_modes(base.with_junction(ej_hz=ej), count=3).frequencies for ej in ejs])
    assert np.all(np.diff(freqs, axis=0) >= -1e-6 * freqs[1:])


def test_root_completeness_against_finer_scan(centered_spec):
    cutoff = TWO_PI * 30e9
    count = 8
    coarse = find_modes(centered_spec, count=count)
    fine = find_modes(centered_spec, count=count, scan_points=10 * 2000 * (count + 4))
    n_coarse = int(np.sum(coarse.frequencies < cutoff))
    n_fine = int(np.sum(fine.frequencies < cutoff))
    assert n_coarse == n_fine
    np.testing.assert_allclose(coarse.frequencies, fine.frequencies, rtol=1e-11)


def test_too_small_window_reports_count(bare_spec):
    with pytest.raises(FewerRootsThanRequested) as err:
        find_modes(bare_spec, count=5, k_max=2.5 * UNIT)
    assert err.value.found == 2 and err.value.requested == 5


def test_two_roots_in_one_cell_detected():
    spec = make_spec(JunctionSpec.short(), 0.0, c_ports=0.0)
    with pytest.raises(DegenerateBracket):
        find_modes(spec, count=2, k_max=9.6 * UNIT, scan_points=3)


def test_unequal_segments_preserve_orthogonality():
    from kerrline.circuit import LineSegmentSpec

    right = LineSegmentSpec.from_impedance_velocity(70.0, 1.0e8)
    spec = make_spec(JunctionSpec.single(30e9, cj=2e-15), -0.2 * HALF, right=right)
    basis = find_modes(spec, count=5)
    for m in range(1, 6):
        for n in range(m + 1, 6):
            assert abs(inner_product(m, n, basis)) / basis.total_capacitance < 1e-8
    mode_properties(basis)
