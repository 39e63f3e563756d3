"""Closed-form viscosities, critical scales and the regime classifier.

Closed forms take SI inputs (m, m/s, K, Ohm m) apart from the atom, whose
polarizability volume is converted with ``AtomParams.alpha0_si``.
All viscosities are in kg/s and negative (drag).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import units
from .green import kappa_bessel, spin_sign
from .materials import resistivity_rho
from .polarizability import U_SCALE, AtomParams
from .quadrature import Axis, IntegralSpec, integrate

REGIMES = ("QuantumFriction", "SurfaceThermal", "BlackBody", "Resonant")
RESONANT_FRACTION = 0.5


def mu_qf_planar(atom: AtomParams, rho, z, v):
    """-(18/pi^3) hbar alpha0^2 rho^2 v^2 / (2z)^10, z in m."""
    a0 = atom.alpha0_si
    return -(18.0 / math.pi**3) * units.HBAR * a0**2 * rho**2 * v**2 / (2.0 * z) ** 10


def mu_t_planar(atom: AtomParams, rho, z, T):
    """(mu_T, mu_T^t, mu_T^r) with mu_T = -(3/pi) hbar alpha0^2 rho^2 (kT/hbar)^2/(2z)^8."""
    a0 = atom.alpha0_si
    mu = -(3.0 / math.pi) * units.HBAR * a0**2 * rho**2 * (units.KB * T / units.HBAR) ** 2 \
        / (2.0 * z) ** 8
    return mu, 2.0 * mu, -mu


def mu_bb_lowT(atom: AtomParams, T):
    """-(32 pi^5/135) hbar (alpha0/eps0)^2 (kT/hbar c)^8."""
    a0 = atom.alpha0_si
    return -(32.0 * math.pi**5 / 135.0) * units.HBAR * (a0 / units.EPS0) ** 2 \
        * (units.KB * T / (units.HBAR * units.C)) ** 8


def mu_bb_resonant(atom: AtomParams, T):
    """Black-body viscosity from a sharp resonance,

    -(alpha0/4 pi eps0) (hbar wa^5 / 6 c^5) x / sinh^2(x/2),  x = hbar wa / kT.

    This is the free-space force integral evaluated with
    Im alpha = alpha0 wa pi delta(w - wa) / 2.
    """
    if T == 0:
        return 0.0
    wa = atom.omega_a / units.HBAR_EVS
    x = atom.omega_a / units.thermal_frequency(T)
    vol = atom.alpha0_volume * units.NM**3
    # x / sinh^2(x/2) = 4 x e^-x / (1 - e^-x)^2 without overflow
    weight = 4.0 * x * math.exp(-x) / (-math.expm1(-x)) ** 2
    if weight == 0.0:
        return 0.0
    return -vol * units.HBAR * wa**5 / (6.0 * units.C**5) * weight


# --------------------------------------------------------------------------
# double wavevector integrals over the frequency-derivative kernel

def _kernel_products(ut, u):
    """Tr[kappa(ut) kappa(u)] split into symmetric and spin parts, shape (n, 2)."""
    a = kappa_bessel(ut)
    b = kappa_bessel(u)
    sym = (a[..., :3] * b[..., :3]).sum(axis=-1)
    spin = 2.0 * a[..., 3] * b[..., 3]
    return np.stack([sym, spin], axis=-1)


@functools.lru_cache(maxsize=16)
def q_double_moment(power, rtol=1e-9):
    """int du int dut (u - ut)^power Tr[kappa(ut) kappa(u)] as (sym, spin).

    Dimensionless, so results are cached per (power, rtol).
    """
    def f(u, ut):
        w = (u - ut) ** power
        return w[:, None] * _kernel_products(ut, np.full_like(ut, u))

    axis = Axis(-np.inf, np.inf, (0.0,), U_SCALE)
    res = integrate(IntegralSpec((axis, axis), rtol=(rtol, rtol * 0.1), atol=1e-300), f)
    vals = np.asarray(res.value)
    vals.setflags(write=False)
    return vals, res.error


def _split_result(vals, part):
    t, r = float(vals[0]), spin_sign() * float(vals[1])
    if part == "total":
        return t + r
    if part == "t":
        return t
    if part == "r":
        return r
    raise ValueError(f"part must be 'total', 't' or 'r', got {part!r}")


def mu_general_thermal(atom: AtomParams, material, z, T, part="total"):
    """Low-velocity thermal viscosity from the double q-integral, z in nm.

    -(pi (kT)^2 / 3 hbar) (2 eps0 rho)^2 alpha0_vol^2 int int (q - qt)^2 Tr[k k]
    """
    rho = resistivity_rho(material)
    vals, _ = q_double_moment(2)
    scale = 1.0 / (4.0 * math.pi * z**3) ** 2 / (2.0 * z) ** 2    # nm^-8
    kT = units.KB * T
    pref = -math.pi * kT**2 / (3.0 * units.HBAR) * (2.0 * units.EPS0 * rho) ** 2 \
        * atom.alpha0_volume**2 / units.NM**2
    return pref * scale * _split_result(vals, part)


def mu_qf_general(atom: AtomParams, material, z, v, part="total"):
    """Quantum-friction viscosity from the double q-integral with (q - qt)^4 / 12."""
    rho = resistivity_rho(material)
    vals, _ = q_double_moment(4)
    scale = 1.0 / (4.0 * math.pi * z**3) ** 2 / (2.0 * z) ** 4    # nm^-10
    pref = -(units.HBAR / math.pi) * v**2 * (2.0 * units.EPS0 * rho) ** 2 \
        * atom.alpha0_volume**2 / units.NM**4 / 12.0
    return pref * scale * _split_result(vals, part)


# --------------------------------------------------------------------------
# critical scales

@dataclass(frozen=True)
class CriticalScales:
    """Crossover scales in SI.  ``rough_*`` are order-of-magnitude forms."""
    lambda_c: float | None = None
    ell_c: float | None = None
    v_c: float | None = None
    T_c: float | None = None
    T_vac: float | None = None
    rough_v_c: float | None = None
    rough_lambda_c: float | None = None
    rough_T_c: float | None = None


def lambda_c(v, T):
    """sqrt(3/2pi^2) (v/c) hbar c / kT: z where mu_T = mu_QF."""
    return math.sqrt(3.0 / (2.0 * math.pi**2)) * (v / units.C) * units.thermal_wavelength(T)


def ell_c(lam_rho, v, T):
    """(sqrt2/4) [sqrt(5/2) lambda_rho / lambda_th]^(1/4) (c/v) lambda_c."""
    lth = units.thermal_wavelength(T)
    return (math.sqrt(2.0) / 4.0) * (math.sqrt(2.5) * lam_rho / lth) ** 0.25 \
        * (units.C / v) * lambda_c(v, T)


def ell_c_direct(lam_rho, T):
    """Velocity-free form of ell_c: (405/131072)^(1/8)/pi lambda_rho^(1/4) lambda_th^(3/4)."""
    lth = units.thermal_wavelength(T)
    return (405.0 / 131072.0) ** 0.125 / math.pi * lam_rho**0.25 * lth**0.75


def v_c(z, T):
    """sqrt(2/3) pi kT z / hbar."""
    return math.sqrt(2.0 / 3.0) * math.pi * units.KB * T * z / units.HBAR


def T_c(z, v):
    """sqrt(3/2pi^2) hbar v / (k z)."""
    return math.sqrt(3.0 / (2.0 * math.pi**2)) * units.HBAR * v / (units.KB * z)


def T_vac(z, v, lam_rho):
    """(sqrt2/8)(c/v)(sqrt30/pi lambda_rho/z)^(1/3) T_c: mu_T^vac = mu_T."""
    return (math.sqrt(2.0) / 8.0) * (units.C / v) \
        * (math.sqrt(30.0) / math.pi * lam_rho / z) ** (1.0 / 3.0) * T_c(z, v)


def rough_scales(z, v, T):
    kT = units.KB * T
    return (kT * z / units.HBAR if T > 0 else None,
            units.HBAR * v / kT if T > 0 else None,
            units.HBAR * v / (units.KB * z) if z else None)


def critical_scales(z=None, v=None, T=None, lam_rho=None):
    """All scales that the supplied arguments determine (SI)."""
    kw = {}
    if v and T:
        kw["lambda_c"] = lambda_c(v, T)
        if lam_rho is not None:
            kw["ell_c"] = ell_c(lam_rho, v, T)
    if z and T:
        kw["v_c"] = v_c(z, T)
        kw["rough_v_c"] = units.KB * T * z / units.HBAR
    if z and v:
        kw["T_c"] = T_c(z, v)
        kw["rough_T_c"] = units.HBAR * v / (units.KB * z)
        if lam_rho is not None:
            kw["T_vac"] = T_vac(z, v, lam_rho)
    if v and T:
        kw["rough_lambda_c"] = units.HBAR * v / (units.KB * T)
    return CriticalScales(**kw)


# --------------------------------------------------------------------------
# regimes

def boundary_qf_thermal(z, v):
    """Temperature on the mu_QF = mu_T line: z T = sqrt(3/2) hbar v / (k pi)."""
    return math.sqrt(1.5) * units.HBAR * v / (units.KB * math.pi) / np.asarray(z)


def boundary_thermal_vacuum(z, lam_rho):
    """Temperature on the mu_T = mu_T^vac line.

    z T = [(9/2) sqrt10 lambda_rho / lambda_th]^(1/4) hbar c / (4 pi k), solved for T.
    """
    z = np.asarray(z, dtype=float)
    a = units.HBAR * units.C / (4.0 * math.pi * units.KB)
    b = 4.5 * math.sqrt(10.0) * lam_rho * units.KB / (units.HBAR * units.C)
    return (a**4 * b / z**4) ** (1.0 / 3.0)


def asymptotic_viscosities(atom: AtomParams, rho, z, v, T):
    """(mu_QF, mu_T, mu_T^vac) from the closed forms, z in m."""
    mu_qf = mu_qf_planar(atom, rho, z, v)
    mu_t = mu_t_planar(atom, rho, z, T)[0]
    mu_vac = mu_bb_lowT(atom, T)
    return mu_qf, mu_t, mu_vac


def classify_regime(z, T, v, material, atom: AtomParams):
    """Dominant mechanism at height z (m), temperature T (K), speed v (m/s)."""
    wa = atom.omega_a
    if abs(v) * units.HBAR_EVS / z > RESONANT_FRACTION * wa \
            or units.KB_EVK * T > RESONANT_FRACTION * wa:
        return "Resonant"
    rho = resistivity_rho(material)
    mus = np.abs(asymptotic_viscosities(atom, rho, z, v, T))
    return REGIMES[int(np.argmax(mus))]


@dataclass
class ViscosityBreakdown:
    mu: float
    mu_t: float
    mu_r: float
    mu_qf: float
    mu_T: float
    mu_T_t: float
    mu_T_r: float
    mu_vac_resonant: float
    mu_vac_lowT: float
    regime: str
    scales: CriticalScales
    error: float = 0.0
    route: str = ""
    resonant: bool = False
    seconds: float = 0.0

    def as_dict(self):
        d = {k: getattr(self, k) for k in (
            "mu", "mu_t", "mu_r", "mu_qf", "mu_T", "mu_T_t", "mu_T_r", "mu_vac_resonant",
            "mu_vac_lowT", "regime", "error", "route", "resonant", "seconds")}
        d["mu_over_mu_qf"] = self.mu / self.mu_qf if self.mu_qf else math.nan
        d["mu_over_mu_T"] = self.mu / self.mu_T if self.mu_T else math.nan
        d["scales"] = {k: v for k, v in self.scales.__dict__.items() if v is not None}
        return d
