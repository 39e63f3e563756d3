"""Thermal occupation, the nonequilibrium field spectrum and the dipole spectrum.

Spectra carry ``hbar = 1`` with energies in eV: ``kappa`` is in nm^-3 per eV
of bandwidth and ``S`` in nm^3 (times 4 pi eps0 factors as elsewhere).
Multiplying by hbar[eV s] and the SI conversions of ``units`` recovers SI.

Products of a Bose factor with a reflection coefficient are always formed
from ``x n(x)`` and ``Im r(x) / x`` so they stay finite at ``x = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import units
from .green import assemble, dagger, kappa_bessel
from .materials import PoleError
from .polarizability import U_SCALE, AtomParams, doppler_energy, dress, u_breakpoints
from .quadrature import Axis, IntegralSpec, integrate


def bose_n(omega, T):
    """Bose occupation 1/(exp(w/kT) - 1); at T = 0 it is 0 for w > 0 and -1 for w < 0."""
    omega = np.asarray(omega, dtype=float)
    kT = units.thermal_frequency(T)
    if kT == 0:
        out = np.where(omega > 0, 0.0, np.where(omega < 0, -1.0, np.nan))
        if np.any(omega == 0):
            raise PoleError("Bose factor undefined at omega = 0", 0.0)
    else:
        if np.any(omega == 0):
            raise PoleError("Bose factor has a pole at omega = 0", 0.0)
        with np.errstate(over="ignore"):
            out = 1.0 / np.expm1(omega / kT)
    return out[()] if out.ndim == 0 else out


def x_bose(x, kT):
    """x n(x), finite everywhere; kT in eV."""
    x = np.asarray(x, dtype=float)
    if kT == 0:
        return np.where(x < 0, -x, 0.0)
    y = x / kT
    small = np.abs(y) < 1e-8
    ys = np.where(small, 1.0, y)
    with np.errstate(over="ignore"):
        val = np.where(small, 1.0 - 0.5 * y, ys / np.expm1(ys))
    return kT * val


def x_coth(x, kT):
    """x coth(x / 2kT) = x + 2 x n(x)."""
    return np.asarray(x, dtype=float) + 2.0 * x_bose(x, kT)


@dataclass
class SurfaceIntegrals:
    """q-integrals at fixed photon energy (all 3x3, nm^-3 or nm^-4).

    G  : int G(q, w_q)                         (complex; dressing)
    P  : int Im r(w_q) K                       (Hermitian part of G)
    N0 : int n Im r(w_q) K
    N1 : int q n Im r(w_q) K
    Q  : int q Im r(w_q) K
    """
    G: np.ndarray
    P: np.ndarray
    N0: np.ndarray
    N1: np.ndarray
    Q: np.ndarray
    error: float
    evaluations: int


def surface_integrals(material, z, v, omega, T, lte=False, rtol=1e-9):
    """Evaluate the Doppler-shifted q-integrals needed by the force at one energy.

    In LTE mode the occupation in ``N0`` (the field-spectrum term) is taken at
    ``omega`` instead of the shifted energy; ``N1`` always uses the shifted one.
    """
    omega = float(omega)
    kT = units.thermal_frequency(T)
    e_v = doppler_energy(v, z)
    pref = 1.0 / (4.0 * math.pi * z**3)
    qfac = 1.0 / (2.0 * z)
    if lte:
        n_fixed = float(bose_n(omega, T)) if (kT > 0 or omega != 0) else 0.0

    def f(u):
        x = omega + u * e_v
        k = kappa_bessel(u)
        r = material.fresnel(x)
        ir = material.im_r_over_omega(x)
        imr = x * ir
        nimr = x_bose(x, kT) * ir
        nimr0 = n_fixed * imr if lte else nimr
        uq = u * qfac
        cols = [r.real[:, None] * k, r.imag[:, None] * k, imr[:, None] * k,
                nimr0[:, None] * k, (uq * nimr)[:, None] * k, (uq * imr)[:, None] * k]
        return np.concatenate(cols, axis=1)

    if e_v == 0:
        # no Doppler shift: the kernel factorizes, moments are closed form
        m0 = np.array([0.5, 0.5, 1.0, 0.0]) * math.pi
        m1 = np.array([0.0, 0.0, 0.0, 1.5 * math.pi]) * qfac
        x = np.array([omega])
        r = complex(material.fresnel(x)[0])
        imr = float(x[0] * material.im_r_over_omega(x)[0])
        nimr = float((x_bose(x, kT) * material.im_r_over_omega(x))[0])
        nimr0 = n_fixed * imr if lte else nimr
        vals = np.concatenate([r.real * m0, r.imag * m0, imr * m0, nimr0 * m0, nimr * m1,
                               imr * m1])
        err, evals = 0.0, 0
    else:
        spec = IntegralSpec((Axis(-np.inf, np.inf, u_breakpoints(material, omega, e_v),
                                  U_SCALE),), rtol=rtol, atol=1e-300)
        res = integrate(spec, f)
        vals, err, evals = np.asarray(res.value), res.error, res.evaluations
    c = vals.reshape(6, 4) * pref
    return SurfaceIntegrals(G=assemble(c[0] + 1j * c[1]), P=assemble(c[2]),
                            N0=assemble(c[3]), N1=assemble(c[4]), Q=assemble(c[5]),
                            error=err * pref, evaluations=evals)


@dataclass(frozen=True)
class SpectrumPoint:
    omega: float
    kappa: np.ndarray
    S: np.ndarray
    alpha: np.ndarray
    lte: bool


def kappa_v(material, z, v, omega, T, lte=False, rtol=1e-9):
    """Field power spectrum (1/pi) int dq/2pi [1 + n] Im G at the shifted energy."""
    si = surface_integrals(material, z, v, omega, T, lte, rtol)
    return (si.P + si.N0) / math.pi


def dipole_spectrum(atom: AtomParams, material, z, v, omega, T, lte=False,
                    include_vacuum=False, rtol=1e-9):
    """S = alpha kappa alpha^dagger with the self-consistently dressed alpha."""
    si = surface_integrals(material, z, v, omega, T, lte, rtol)
    G = si.G
    kappa = (si.P + si.N0) / math.pi
    if include_vacuum:
        from .green import vacuum_im_g_local
        g0 = vacuum_im_g_local(omega)
        G = G + 1j * g0 * np.eye(3)
        kappa = kappa + _vacuum_occupied(omega, T, g0) * np.eye(3) / math.pi
    alpha = dress(atom, omega, G)
    return SpectrumPoint(omega, kappa, alpha @ kappa @ dagger(alpha), alpha, lte)


def _vacuum_occupied(omega, T, g0):
    kT = units.thermal_frequency(T)
    if omega == 0:
        return 0.0
    return g0 * (1.0 + float(x_bose(np.array([omega]), kT)[0]) / omega)
