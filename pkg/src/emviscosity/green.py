"""Quasi-static scattered Green tensor of a planar half-space.

In the mixed representation (wavevector q along the motion, height z) the
scattered tensor factorizes as ``G(q, z, w) = r(w) K(q, z)`` with

    K = [[Kxx, 0, -i Ks], [0, Kyy, 0], [i Ks, 0, Kzz]]

Hermitian.  Kernels here are multiplied by ``4 pi eps0`` and expressed
through ``u = 2 z q``: ``k_ab(q) = kappa_ab(u) / z**2`` (nm^-2 for z in nm).
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import units
from .quadrature import quad

# rotation generators, [L_i]_jk = -i eps_ijk
LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0
L = -1j * LEVI_CIVITA

_spin_sign = 1.0


@contextlib.contextmanager
def flipped_spin_kernel():
    """Test hook: reverse the sign of the spin channel in force routes and viscosities."""
    global _spin_sign
    old = _spin_sign
    _spin_sign = -old
    try:
        yield
    finally:
        _spin_sign = old


def spin_sign():
    return _spin_sign


def kappa_bessel(u):
    """Dimensionless kernel (kxx, kyy, kzz, ks) at u = 2 z q, shape (..., 4)."""
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    # below this K2 overflows; the products take their u -> 0 limits
    tiny = a < 1e-100
    a_s = np.where(tiny, 1.0, a)
    e = np.exp(-a_s)
    k0 = special.kve(0, a_s) * e
    k1 = special.kve(1, a_s) * e
    k2 = special.kve(2, a_s) * e
    u2 = a_s * a_s
    u2k0 = np.where(tiny, 0.0, u2 * k0)
    u2k2 = np.where(tiny, 2.0, u2 * k2)
    xx = 0.5 * u2k0
    yy = 0.25 * (u2k2 - u2k0)
    zz = 0.25 * (u2k0 + u2k2)
    s = np.where(tiny, 0.5 * u, 0.5 * np.sign(u) * u2 * k1)
    return np.stack([xx, yy, zz, s], axis=-1)


def kappa_ky_quadrature(u, rtol=1e-12):
    """Same kernel from direct quadrature over the transverse wavevector.

    With t = 2 z k_y and w = sqrt(u^2 + t^2) the kernel entries are
    (1/2) int dt e^{-w} / w * [u^2, t^2, w^2, u w] (times 1/2 for xx etc.).
    """
    out = []
    for ui in np.atleast_1d(np.asarray(u, dtype=float)):
        def f(t, ui=ui):
            w = np.sqrt(ui * ui + t * t)
            e = np.exp(-w)
            ew = np.where(w > 0, e / np.where(w > 0, w, 1.0), 0.0)
            return np.stack([ui * ui * ew, t * t * ew, w * w * ew, ui * w * ew], axis=-1)
        # even in t: integrate over [0, inf) and double; the 1/4 comes from
        # 1/(2 k) and the substitution dk_y = dt / (2z) with k = w / (2z).
        r = quad(f, 0.0, np.inf, rtol=rtol, scale=1.0 + abs(ui) * 0.5)
        out.append(0.5 * r.value)
    res = np.array(out)
    return res.reshape(np.shape(u) + (4,))


def kernel_from_ky_integral(q, z):
    """(kxx, kyy, kzz, ks) at wavevector q (nm^-1), height z (nm), by k_y quadrature."""
    if not z > 0:
        raise ValueError("height z must be positive")
    return kappa_ky_quadrature(2.0 * z * np.asarray(q, dtype=float)) / z**2


def kernel_bessel(q, z):
    if not z > 0:
        raise ValueError("height z must be positive")
    return kappa_bessel(2.0 * z * np.asarray(q, dtype=float)) / z**2


def assemble(comp):
    """Build Hermitian 3x3 matrices from (..., 4) kernel components."""
    comp = np.asarray(comp)
    M = np.zeros(comp.shape[:-1] + (3, 3), dtype=complex)
    M[..., 0, 0] = comp[..., 0]
    M[..., 1, 1] = comp[..., 1]
    M[..., 2, 2] = comp[..., 2]
    M[..., 0, 2] = -1j * comp[..., 3]
    M[..., 2, 0] = 1j * comp[..., 3]
    return M


@dataclass(frozen=True)
class GreenKernel:
    z: float
    backend: str = "bessel"

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError("height z must be positive")
        if self.backend not in ("bessel", "ky"):
            raise ValueError(f"unknown backend {self.backend!r}")

    def components(self, q):
        if self.backend == "bessel":
            return kernel_bessel(q, self.z)
        return kernel_from_ky_integral(q, self.z)

    def matrix(self, q):
        return assemble(self.components(q))


def g_scattered(q, z, omega, material, backend="bessel"):
    """r(w) K(q, z) as complex 3x3 arrays (4 pi eps0 scaled)."""
    K = GreenKernel(z, backend).matrix(q)
    r = np.asarray(material.fresnel(omega))
    return r[..., None, None] * K


def dagger(A):
    return np.conj(np.swapaxes(A, -1, -2))


def hermitian_part(A):
    return 0.5 * (A + dagger(A))


def im_hermitian(A):
    """(A - A^dagger) / (2i)."""
    return (A - dagger(A)) / 2j


def decompose_sigma_spin(G, atol=1e-10):
    """Split a Hermitian matrix into a real symmetric part and a spin vector.

    Returns ``(sigma, s)`` with ``G = sigma + sum_i s_i L_i``.
    """
    G = np.asarray(G, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(G))))
    if np.max(np.abs(G - dagger(G))) > atol * scale:
        raise ValueError("decompose_sigma_spin needs a Hermitian matrix")
    sigma = np.real(G)
    s = np.real(np.einsum("ijk,...kj->...i", L, G)) / 2.0
    return sigma, s


def reassemble(sigma, s):
    return sigma + np.einsum("...i,ijk->...jk", s, L)


def vacuum_trace_q2_moment(omega):
    """int dq/2pi q^2 Tr Im G of free space, 4 pi eps0 scaled (nm^-5).

    Equals 4 pi eps0 * w^5 / (6 pi eps0 c^5), odd in w.
    """
    x = np.asarray(omega, dtype=float) / units.HBARC_EVNM
    return (2.0 / 3.0) * x**5


def vacuum_im_g_local(omega):
    """Per-component local Im G of free space, 4 pi eps0 scaled (nm^-3)."""
    x = np.asarray(omega, dtype=float) / units.HBARC_EVNM
    return (2.0 / 3.0) * x**3


# dimensionless moments  int du u^n kappa(u) / pi  (see module tests)
def kernel_moment(n, component):
    """int_{-inf}^{inf} du u^n kappa_component(u), from closed forms.

    Uses int_0^inf u^m K_nu(u) du = 2^{m-1} Gamma((m+1+nu)/2) Gamma((m+1-nu)/2).
    """
    def mell(m, nu):
        return 2.0 ** (m - 1) * math.gamma((m + 1 + nu) / 2) * math.gamma((m + 1 - nu) / 2)

    idx = {"xx": 0, "yy": 1, "zz": 2, "s": 3}[component]
    even = n % 2 == 0
    if idx == 3:
        return 0.0 if even else mell(n + 2, 1)
    if not even:
        return 0.0
    m = n + 2
    if idx == 0:
        return mell(m, 0)
    if idx == 1:
        return 0.5 * (mell(m, 2) - mell(m, 0))
    return 0.5 * (mell(m, 2) + mell(m, 0))
