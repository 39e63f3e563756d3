import csv
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emviscosity import asymptotics as asy
from emviscosity import spectral_density as sd
from emviscosity import units
from emviscosity.force import mu_blackbody_integral
from emviscosity.materials import ConstantEpsilon, Drude, resistivity_rho


def test_planck_derivative_closed_form():
    T, E = 300.0, 0.05
    x = E / units.thermal_frequency(T)
    w = E / units.HBAR_EVS
    ref = units.HBAR * w**3 / (math.pi**2 * units.C**3) * x * math.exp(x) / math.expm1(x) ** 2
    assert sd.planck_derivative(E, T) == pytest.approx(ref, rel=1e-12)


def test_planck_derivative_numeric_temperature_derivative():
    E, T, h = 0.1, 300.0, 1e-3

    def rho(T):
        w = E / units.HBAR_EVS
        return units.HBAR * w**3 / (math.pi**2 * units.C**3) / math.expm1(
            E / units.thermal_frequency(T))
    deriv = T * (rho(T + h) - rho(T - h)) / (2 * h)
    assert sd.planck_derivative(E, T) == pytest.approx(deriv, rel=1e-7)


@given(st.floats(1e-6, 50.0), st.floats(1.0, 3000.0))
def test_planck_derivative_nonnegative(E, T):
    assert sd.planck_derivative(E, T) >= 0


def test_planck_derivative_decays_at_both_ends():
    assert sd.planck_derivative(1e-8, 300.0) < 1e-12 * sd.planck_derivative(0.1, 300.0)
    assert sd.planck_derivative(30.0, 300.0) == 0.0


def test_planck_derivative_peak():
    assert sd.planck_derivative_peak() == pytest.approx(3.8300, abs=1e-4)
    pk = sd.find_peak(lambda E: sd.planck_derivative(E, 300.0), 0.01, 0.5)
    assert pk / units.thermal_frequency(300.0) == pytest.approx(3.83, rel=5e-3)


def test_room_temperature_peak_fraction_of_resonance(atom):
    pk = sd.planck_derivative_peak() * units.thermal_frequency(300.0)
    assert 0.05 < pk / atom.omega_a < 0.09


def test_planck_derivative_needs_positive_T():
    with pytest.raises(ValueError):
        sd.planck_derivative(0.1, 0.0)


def test_nearfield_height_scaling(atom, gold):
    a = sd.eta_nearfield(atom, gold, 1.0, 0.3)
    assert sd.eta_nearfield(atom, gold, 2.0, 0.3) == pytest.approx(a / 256, rel=1e-12)


def test_lossless_surface_has_no_density(atom):
    assert sd.eta_nearfield(atom, ConstantEpsilon(4.0 + 0j), 1.0, 0.3) == 0.0


def test_lowfreq_limit_of_nearfield(atom, gold):
    for E in (1e-5, 1e-4):
        ratio = sd.eta_nearfield(atom, gold, 1.0, E) / sd.eta_lowfreq(atom, gold, 1.0, E)
        assert ratio == pytest.approx(1.0, abs=1e-6)


def test_lowfreq_resistivity_squared(atom):
    a = sd.eta_lowfreq(atom, Drude(9.0, 0.1), 1.0, 1e-3)
    b = sd.eta_lowfreq(atom, Drude(9.0, 0.2), 1.0, 1e-3)
    assert b / a == pytest.approx(4.0, rel=1e-12)


def test_lowfreq_gold_one_meV(atom, gold):
    val = sd.eta_lowfreq(atom, gold, 1.0, 1e-3)
    assert np.isfinite(val) and val > 0


def _static_dressing_ratio(atom, z):
    """eta_full / eta_lowfreq as w -> 0 with the image-dressed static alpha (r = 1)."""
    v0 = atom.alpha0_volume
    ax = 1 / (1 / v0 - 1 / (8 * z**3))
    az = 1 / (1 / v0 - 2 / (8 * z**3))
    return (12 * ax**2 + 24 * az**2 - 18 * ax * az) / (18 * v0**2)


def test_full_density_low_frequency(atom, gold):
    for E in (1e-3, 1e-2):
        ratio = sd.eta_full(atom, gold, 5.0, E) / sd.eta_lowfreq(atom, gold, 5.0, E)
        assert ratio == pytest.approx(1.0, abs=0.02)


def test_full_density_low_frequency_close_to_surface(atom, gold):
    # at 1 nm the image dipole raises the static polarizability by about 1%
    ratio = sd.eta_full(atom, gold, 1.0, 1e-4) / sd.eta_lowfreq(atom, gold, 1.0, 1e-4)
    assert ratio == pytest.approx(_static_dressing_ratio(atom, 1.0), rel=1e-5)


def test_nearfield_form_includes_rotational_channel(atom, gold):
    # the translational channel alone would be twice as large
    E = 1e-3
    assert sd.eta_full(atom, gold, 5.0, E) / sd.eta_nearfield(atom, gold, 5.0, E) == \
        pytest.approx(1.0, abs=1e-3)


def test_full_density_vectorised(atom, gold):
    E = np.array([0.01, 0.1])
    assert np.allclose(sd.eta_full(atom, gold, 1.0, E),
                       [sd.eta_full(atom, gold, 1.0, e) for e in E])


def test_peaks(atom, gold):
    wsp = gold.surface_resonance()
    p = sd.find_peak(lambda E: sd.eta_full(atom, gold, 1.0, E), 0.9 * wsp, 1.1 * wsp)
    assert p == pytest.approx(wsp, rel=0.02)
    p = sd.find_peak(lambda E: sd.eta_full(atom, gold, 1.0, E), 1.0, 1.5)
    assert p == pytest.approx(atom.omega_a, rel=0.02)


def test_filter_reproduces_thermal_viscosity(atom, gold):
    for T in (3.0, 30.0):
        mu = sd.mu_from_filter(atom, gold, 5.0, T)
        assert mu / asy.mu_general_thermal(atom, gold, 5.0, T) == pytest.approx(1.0, abs=0.05)


def test_filter_with_nearfield_density_equals_mu_T(atom, gold):
    from emviscosity.quadrature import quad
    T = 3.0
    kT = units.thermal_frequency(T)
    r = quad(lambda E: sd.eta_nearfield(atom, gold, 5.0, E) * sd.planck_derivative(E, T),
             0.0, 60 * kT, breakpoints=(kT,), rtol=1e-10)
    mu = -r.value / units.HBAR_EVS
    ref = asy.mu_t_planar(atom, resistivity_rho(gold), 5e-9, T)[0]
    assert mu / ref == pytest.approx(1.0, abs=1e-3)


def test_vacuum_filter_equals_blackbody_friction(atom):
    for T in (30.0, 300.0):
        mu = sd.mu_from_filter(atom, None, 1.0, T, kind="vacuum")
        assert mu / mu_blackbody_integral(atom, T)[0] == pytest.approx(1.0, abs=0.01)


def test_filter_zero_temperature(atom, gold):
    assert sd.mu_from_filter(atom, gold, 5.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        sd.mu_from_filter(atom, gold, 5.0, 3.0, kind="bulk")


def test_log_grid_density():
    g = sd.log_grid(1e-3, 10.0)
    assert len(g) == 4 * 64 + 1
    assert g[0] == pytest.approx(1e-3) and g[-1] == pytest.approx(10.0)
    with pytest.raises(ValueError):
        sd.log_grid(1.0, 1.0)


def test_filter_curves_and_csv(atom, gold, tmp_path):
    curves = sd.filter_curves(atom, gold, 1.0, 300.0, 1e-3, 10.0)
    eta, pd = curves
    assert eta.kind == "eta_full" and pd.kind == "planck_derivative"
    assert eta.values[0] == pytest.approx(_static_dressing_ratio(atom, 1.0), rel=1e-3)
    assert pd.values.max() == pytest.approx(2.0, rel=1e-3)
    assert eta.metadata["eta_normalization"] == "eta_lowfreq"
    p = tmp_path / "c.csv"
    sd.write_curves_csv(curves, p)
    rows = list(csv.reader(open(p)))
    assert rows[0] == ["omega_eV", "value", "kind"]
    assert len(rows) == 1 + 2 * len(eta.omega)


def test_curve_kind_validated():
    with pytest.raises(ValueError):
        sd.SpectralCurve(np.ones(2), np.ones(2), "other")
