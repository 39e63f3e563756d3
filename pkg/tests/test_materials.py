import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emviscosity import units
from emviscosity.materials import (ConstantEpsilon, Drude, Material, NonOhmicError, PoleError,
                                   Tabulated,
                                   fresnel_tm_quasistatic, gold_drude, lambda_rho,
                                   ohmic_exponent, permittivity, resistivity_rho)

energies = st.floats(1e-4, 50.0)


def test_drude_permittivity_value():
    m = Drude(9.0, 0.1)
    w = 2.0
    assert m.permittivity(w) == pytest.approx(1 - 81 / (w * (w + 0.1j)), rel=1e-14)


def test_drude_pole_at_zero():
    with pytest.raises(PoleError):
        Drude(9.0, 0.1).permittivity(0.0)


def test_drude_fresnel_regular_at_zero():
    assert Drude(9.0, 0.1).fresnel(0.0) == pytest.approx(1.0)


@given(energies)
def test_drude_stable_fresnel_matches_definition(w):
    m = Drude(9.0, 0.1)
    eps = m.permittivity(w)
    assert m.fresnel(w) == pytest.approx((eps - 1) / (eps + 1), rel=1e-9)


@given(energies)
def test_crossing_symmetry(w):
    m = gold_drude()
    assert m.fresnel(-w) == pytest.approx(np.conj(m.fresnel(w)), rel=1e-13)
    assert m.permittivity(-w) == pytest.approx(np.conj(m.permittivity(w)), rel=1e-13)


@given(energies)
def test_passivity(w):
    assert np.imag(gold_drude().fresnel(w)) >= 0


@given(st.floats(-20, 20).filter(lambda x: abs(x) > 1e-6))
def test_im_r_over_omega_closed_form(w):
    m = gold_drude()
    assert m.im_r_over_omega(w) == pytest.approx(np.imag(m.fresnel(w)) / w, rel=1e-8)


def test_lossless_surface_plasmon_pole():
    with pytest.raises(PoleError):
        Drude(9.0, 0.0).fresnel(9.0 / math.sqrt(2))


def test_constant_eps_minus_one_pole():
    with pytest.raises(PoleError):
        ConstantEpsilon(-1.0 + 0j).fresnel(1.0)


def test_surface_resonance():
    assert gold_drude().surface_resonance() == pytest.approx(9 / math.sqrt(2))


def test_drude_resistivity_closed_form():
    # rho = gamma / (eps0 omega_p^2) with frequencies in rad/s
    rho = resistivity_rho(gold_drude())
    g = 0.1 / units.HBAR_EVS
    wp = 9.0 / units.HBAR_EVS
    assert rho == pytest.approx(g / (units.EPS0 * wp**2), rel=1e-12)
    assert rho == pytest.approx(9.18e-8, rel=2e-3)


class _Wrapped(Material):
    """Drude response seen only through the generic Material interface."""

    def __init__(self, inner):
        self.inner = inner

    def permittivity(self, omega):
        return self.inner.permittivity(omega)

    def fresnel(self, omega):
        return self.inner.fresnel(omega)


def test_generic_slope_fit_matches_drude_closed_form():
    m = gold_drude()
    assert resistivity_rho(_Wrapped(m)) == pytest.approx(resistivity_rho(m), rel=1e-6)


def test_ohmic_exponent_drude():
    assert ohmic_exponent(gold_drude()) == pytest.approx(1.0, abs=1e-6)


def test_non_ohmic_material_rejected():
    with pytest.raises(NonOhmicError):
        resistivity_rho(ConstantEpsilon(2.0 + 0.5j))


def test_lambda_rho():
    rho = resistivity_rho(gold_drude())
    assert lambda_rho(gold_drude()) == pytest.approx(4 * math.pi * units.EPS0 * units.C * rho)
    assert lambda_rho(rho) == lambda_rho(gold_drude())


def test_drude_validation():
    with pytest.raises(ValueError):
        Drude(0.0, 0.1)
    with pytest.raises(ValueError):
        Drude(9.0, -0.1)


def test_tabulated_pchip_and_range(tmp_path):
    p = tmp_path / "eps.csv"
    w = np.linspace(0.5, 5.0, 10)
    eps = 2.0 + 0.1 * w + 0.05j * w
    np.savetxt(p, np.column_stack([w, eps.real, eps.imag]), delimiter=",",
               header="omega_eV,re,im", comments="")
    m = Tabulated.from_csv(p)
    assert m.permittivity(2.0) == pytest.approx(2.2 + 0.1j, rel=1e-10)
    assert m.permittivity(-2.0) == pytest.approx(2.2 - 0.1j, rel=1e-10)
    with pytest.raises(ValueError):
        m.permittivity(10.0)


def test_tabulated_requires_header(tmp_path):
    p = tmp_path / "eps.csv"
    p.write_text("1.0,2.0,0.1\n2.0,2.0,0.1\n")
    with pytest.raises(ValueError):
        Tabulated.from_csv(p)


def test_tabulated_rejects_unsorted():
    with pytest.raises(ValueError):
        Tabulated((1.0, 0.5), (1.0, 1.0), (0.0, 0.0))


def test_helpers_delegate():
    m = gold_drude()
    assert permittivity(m, 1.0) == m.permittivity(1.0)
    assert fresnel_tm_quasistatic(m, 1.0) == m.fresnel(1.0)
