"""Unit system and physical constants.

Internally energies are in eV (``E = hbar * omega``), lengths in nm,
polarizabilities are polarizability volumes ``alpha / (4 pi eps0)`` in nm^3
and Green-tensor kernels are multiplied by ``4 pi eps0`` (units nm^-2 in the
mixed q-representation).  Velocities enter in m/s, temperatures in K.
Forces and viscosities leave the package in SI (N, kg/s).
"""
import math

from scipy import constants as _c

HBAR = _c.hbar                      # J s
HBAR_EVS = 6.582119569e-16          # eV s
C = _c.c                            # m/s
KB = _c.k                           # J/K
KB_EVK = _c.k / _c.e                # eV/K
EPS0 = _c.epsilon_0                 # F/m
E_CHARGE = _c.e                     # J/eV
NM = 1e-9
HBARC_EVNM = HBAR_EVS * C / NM      # eV nm
ANGSTROM3_TO_NM3 = 1e-3

# eV/nm -> N
FORCE_EV_PER_NM = E_CHARGE / NM


def ev_to_rad_s(energy):
    return energy / HBAR_EVS


def rad_s_to_ev(omega):
    return omega * HBAR_EVS


def nm_to_m(length):
    return length * NM


def m_to_nm(length):
    return length / NM


def volume_nm3_to_si(volume):
    """Polarizability volume (nm^3) -> SI polarizability (C m^2 / V)."""
    return 4.0 * math.pi * EPS0 * volume * NM**3


def si_to_volume_nm3(alpha):
    return alpha / (4.0 * math.pi * EPS0 * NM**3)


def thermal_energy(T):
    """k_B T in eV; same as ``thermal_frequency``."""
    return KB_EVK * T


def thermal_frequency(T):
    """hbar * omega_th = k_B T in eV."""
    if T < 0:
        raise ValueError(f"temperature must be non-negative, got {T}")
    return KB_EVK * T


def thermal_wavelength(T):
    """Reduced thermal wavelength hbar c / (k_B T) in metres."""
    if not T > 0:
        raise ValueError(f"thermal wavelength needs T > 0, got {T}")
    return HBAR * C / (KB * T)
