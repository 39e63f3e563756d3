"""Permittivity models, the quasi-static TM reflection coefficient and the
Ohmic resistivity extracted from its low-frequency slope.

Frequencies are photon energies in eV and may be negative; all models obey
``eps(-w) = conj(eps(w))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import units

OHMIC_FIT_WINDOW = (1e-8, 1e-4)   # eV
OHMIC_SLOPE_TOL = 0.05


class PoleError(ArithmeticError):
    """Evaluation hit a pole (or a surface resonance) of a response function."""

    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


class NonOhmicError(ValueError):
    """Low-frequency reflection is not linear in frequency."""

    def __init__(self, exponent):
        super().__init__(f"material is not Ohmic: Im r ~ omega^{exponent:.4g} at low frequency")
        self.exponent = exponent


class Material:
    """Common interface; subclasses implement ``permittivity``."""

    def permittivity(self, omega):
        raise NotImplementedError

    def fresnel(self, omega):
        eps = self.permittivity(omega)
        den = eps + 1.0
        if np.any(den == 0):
            bad = np.asarray(omega)[np.asarray(den == 0)] if np.ndim(omega) else omega
            raise PoleError("surface resonance eps = -1", bad)
        return (eps - 1.0) / den

    def im_r_over_omega(self, omega):
        """Im r(w) / w, finite at w = 0 for Ohmic materials."""
        omega = np.asarray(omega, dtype=float)
        return np.imag(self.fresnel(omega)) / omega

    def surface_resonance(self):
        """Energy of the surface resonance, or None when not defined."""
        return None


@dataclass(frozen=True)
class Drude(Material):
    omega_p: float
    gamma: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError("Drude plasma frequency must be positive")
        if self.gamma < 0:
            raise ValueError("Drude damping must be non-negative")

    def permittivity(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega == 0):
            raise PoleError("Drude permittivity has a pole at omega = 0", 0.0)
        eps = 1.0 - self.omega_p**2 / (omega * (omega + 1j * self.gamma))
        return eps[()] if eps.ndim == 0 else eps

    def fresnel(self, omega):
        # (eps-1)/(eps+1) multiplied through by omega(omega+i gamma); regular at 0
        omega = np.asarray(omega, dtype=float)
        wp2 = self.omega_p**2
        den = wp2 - 2.0 * omega**2 - 2j * omega * self.gamma
        if np.any(den == 0):
            raise PoleError("lossless surface plasmon pole", self.omega_p / math.sqrt(2))
        r = wp2 / den
        return r[()] if r.ndim == 0 else r

    def im_r_over_omega(self, omega):
        omega = np.asarray(omega, dtype=float)
        wp2 = self.omega_p**2
        out = 2.0 * self.gamma * wp2 / ((wp2 - 2.0 * omega**2) ** 2
                                        + 4.0 * omega**2 * self.gamma**2)
        return out[()] if out.ndim == 0 else out

    def surface_resonance(self):
        return self.omega_p / math.sqrt(2.0)


@dataclass(frozen=True)
class ConstantEpsilon(Material):
    eps: complex

    def permittivity(self, omega):
        omega = np.asarray(omega, dtype=float)
        e = complex(self.eps)
        out = np.where(omega >= 0, e, e.conjugate())
        return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class Tabulated(Material):
    """Sampled permittivity, PCHIP-interpolated; no extrapolation."""
    omega: tuple
    eps_re: tuple
    eps_im: tuple
    _re: object = field(init=False, repr=False, compare=False)
    _im: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        if w.ndim != 1 or w.size < 2 or np.any(np.diff(w) <= 0) or w[0] < 0:
            raise ValueError("tabulated frequencies must be non-negative and increasing")
        object.__setattr__(self, "_re", PchipInterpolator(w, np.asarray(self.eps_re, float),
                                                          extrapolate=False))
        object.__setattr__(self, "_im", PchipInterpolator(w, np.asarray(self.eps_im, float),
                                                          extrapolate=False))

    @classmethod
    def from_csv(cls, path):
        """Load ``omega_eV, re_eps, im_eps`` columns; a header row is required."""
        with open(path) as fh:
            header = fh.readline()
        try:
            float(header.split(",")[0])
        except ValueError:
            pass
        else:
            raise ValueError(f"{path}: header row required")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 3:
            raise ValueError(f"{path}: expected 3 columns, got {data.shape[1]}")
        return cls(tuple(data[:, 0]), tuple(data[:, 1]), tuple(data[:, 2]))

    def permittivity(self, omega):
        omega = np.asarray(omega, dtype=float)
        a = np.abs(omega)
        re, im = self._re(a), self._im(a)
        if np.any(np.isnan(re)):
            raise ValueError(f"frequency outside tabulated range "
                             f"[{self.omega[0]}, {self.omega[-1]}] eV")
        out = re + 1j * np.where(omega >= 0, im, -im)
        return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------

def permittivity(m: Material, omega):
    return m.permittivity(omega)


def fresnel_tm_quasistatic(m: Material, omega):
    """r = (eps - 1) / (eps + 1)."""
    return m.fresnel(omega)


def ohmic_exponent(m: Material):
    w = np.logspace(math.log10(OHMIC_FIT_WINDOW[0]), math.log10(OHMIC_FIT_WINDOW[1]), 9)
    im = np.imag(m.fresnel(w))
    if np.any(im <= 0):
        return 0.0 if np.all(im == 0) else float("nan")
    return float(np.polyfit(np.log(w), np.log(im), 1)[0])


def resistivity_rho(m: Material):
    """Effective resistivity in Ohm m from Im r ~ 2 eps0 rho omega."""
    if isinstance(m, Drude):
        return units.HBAR_EVS * m.gamma / (units.EPS0 * m.omega_p**2)
    p = ohmic_exponent(m)
    if not abs(p - 1.0) <= OHMIC_SLOPE_TOL:
        raise NonOhmicError(p)
    w0 = OHMIC_FIT_WINDOW[0]
    return float(m.im_r_over_omega(w0)) * units.HBAR_EVS / (2.0 * units.EPS0)


def lambda_rho(m_or_rho):
    """4 pi eps0 c rho in metres; accepts a material or a resistivity."""
    rho = m_or_rho if isinstance(m_or_rho, (int, float)) else resistivity_rho(m_or_rho)
    return 4.0 * math.pi * units.EPS0 * units.C * rho


def gold_drude():
    """Drude parameters used for the gold-like reference surface."""
    return Drude(omega_p=9.0, gamma=0.1)
