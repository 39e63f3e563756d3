"""Bare and environment-dressed polarizability of an isotropic oscillator.

Polarizabilities are polarizability volumes ``alpha / (4 pi eps0)`` in nm^3
and the integrated Green tensor is ``4 pi eps0`` times the SI one (nm^-3),
so the dressing reads ``alpha = (1/alpha_B - G)^-1`` without constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import units
from .green import assemble, dagger, im_hermitian, kappa_bessel, vacuum_im_g_local
from .materials import PoleError
from .quadrature import Axis, IntegralSpec, integrate

# decay scale of the e^{-|u|} u^n kernels for the semi-infinite map
U_SCALE = 2.0
# kernel is below 1e-80 beyond this |u|; resonance breakpoints past it are dropped
U_RELEVANT = 200.0


@dataclass(frozen=True)
class AtomParams:
    """Isotropic oscillator: static polarizability volume (nm^3) and resonance (eV).

    ``gamma_num`` is the numerical linewidth used wherever the bare
    polarizability appears outside the dressing; ``None`` means 1e-6 omega_a.
    """
    alpha0_volume: float
    omega_a: float
    gamma_num: float | None = None

    def __post_init__(self):
        if not self.alpha0_volume > 0:
            raise ValueError("alpha0_volume must be positive")
        if not self.omega_a > 0:
            raise ValueError("omega_a must be positive")
        if self.gamma_num is not None and self.gamma_num < 0:
            raise ValueError("gamma_num must be non-negative")

    @property
    def gamma(self):
        return 1e-6 * self.omega_a if self.gamma_num is None else self.gamma_num

    @property
    def alpha0_si(self):
        return units.volume_nm3_to_si(self.alpha0_volume)

    @property
    def transition_wavelength(self):
        """c / omega_a in nm."""
        return units.HBARC_EVNM / self.omega_a


def rb_like():
    """47.28 cubic angstrom, 1.3 eV."""
    return AtomParams(alpha0_volume=47.28 * units.ANGSTROM3_TO_NM3, omega_a=1.3)


def alpha_bare(atom: AtomParams, omega, gamma=None):
    """alpha0 wa^2 / (wa^2 - (w + i gamma/2)^2), volume units."""
    g = atom.gamma if gamma is None else gamma
    w = np.asarray(omega, dtype=float) + 0.5j * g
    out = atom.alpha0_volume * atom.omega_a**2 / (atom.omega_a**2 - w * w)
    return out[()] if np.ndim(out) == 0 else out


def inverse_bare(atom: AtomParams, omega):
    """1 / alpha_B at vanishing linewidth (real)."""
    omega = np.asarray(omega, dtype=float)
    return (atom.omega_a**2 - omega**2) / (atom.alpha0_volume * atom.omega_a**2)


def doppler_energy(v, z):
    """hbar v / (2 z) in eV: the Doppler shift per unit of u = 2 z q."""
    return units.HBAR_EVS * v / (2.0 * z * units.NM)


def u_breakpoints(material, omega, e_v):
    """Points in u where the integrand of a Doppler-shifted q-integral is non-smooth."""
    pts = [0.0]
    if e_v != 0:
        pts.append(-omega / e_v)
        wsp = material.surface_resonance() if material is not None else None
        if wsp is not None:
            pts += [(wsp - omega) / e_v, (-wsp - omega) / e_v]
    return [p for p in pts if abs(p) < U_RELEVANT]


def integrated_green(material, z, v, omega, include_vacuum=False, rtol=1e-10):
    """int dq/2pi G(q, z, w + q v) as a complex 3x3 matrix (nm^-3).

    ``material=None`` leaves only the vacuum part (requires ``include_vacuum``).
    """
    omega = float(omega)
    G = np.zeros((3, 3), dtype=complex)
    if material is not None:
        if not z > 0:
            raise ValueError("height z must be positive")
        e_v = doppler_energy(v, z)
        if e_v == 0:
            # static: int du kappa = (pi/2, pi/2, pi, 0)
            comp = np.array([0.5, 0.5, 1.0, 0.0]) * math.pi
            G = material.fresnel(omega) * assemble(comp)
        else:
            def f(u):
                r = material.fresnel(omega + u * e_v)
                k = kappa_bessel(u)
                rk = r[:, None] * k
                return np.concatenate([rk.real, rk.imag], axis=1)
            spec = IntegralSpec((Axis(-np.inf, np.inf, u_breakpoints(material, omega, e_v),
                                      U_SCALE),), rtol=rtol, atol=1e-300)
            res = integrate(spec, f)
            v8 = np.asarray(res.value)
            G = assemble(v8[:4] + 1j * v8[4:])
        G = G / (4.0 * math.pi * z**3)
    if include_vacuum:
        G = G + 1j * vacuum_im_g_local(omega) * np.eye(3)
    return G


def dress(atom: AtomParams, omega, G):
    """(1/alpha_B - G)^-1 with the bare pole left unbroadened."""
    M = inverse_bare(atom, omega) * np.eye(3) - G
    try:
        A = np.linalg.inv(M)
    except np.linalg.LinAlgError:
        raise PoleError(f"dressed polarizability singular at omega={omega}", omega) from None
    if not np.all(np.isfinite(A)) or np.linalg.cond(M) > 1e14:
        raise PoleError(f"dressed polarizability singular at omega={omega}", omega)
    return A


def alpha_dressed(atom: AtomParams, material, z, v, omega, include_vacuum=False,
                  rtol=1e-10):
    """Environment-dressed polarizability tensor (nm^3) at photon energy ``omega``.

    ``v`` in m/s, ``z`` in nm.
    """
    G = integrated_green(material, z, v, omega, include_vacuum, rtol)
    return dress(atom, omega, G)


def alpha_im_hermitian(alpha):
    """(alpha - alpha^dagger) / (2i)."""
    return im_hermitian(np.asarray(alpha, dtype=complex))


def fdt_second_kind_residual(alpha, G):
    """Relative mismatch between alpha_Im and alpha Im(G) alpha^dagger."""
    lhs = alpha_im_hermitian(alpha)
    rhs = alpha @ im_hermitian(G) @ dagger(alpha)
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(lhs)), 1e-300))
