"""Filter picture of the thermal viscosity.

``mu_T = -int dw eta(w) T d_T rho(w)`` with rho the thermal Planck spectrum
and eta the joint atom + field spectral density.  Functions take photon
energies in eV and return SI values (eta in m s, T d_T rho in J s m^-3).
"""
from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import units
from .green import assemble, dagger, kappa_bessel, vacuum_im_g_local
from .materials import resistivity_rho
from .polarizability import U_SCALE, AtomParams, alpha_bare, dress
from .quadrature import quad

POINTS_PER_DECADE = 64
KINDS = ("planck_derivative", "eta_full", "eta_nearfield", "eta_lowfreq", "eta_vacuum")


def _rad_s(E):
    return np.asarray(E, dtype=float) / units.HBAR_EVS


def planck_derivative(E, T):
    """T d/dT of hbar w^3 n(w) / (pi^2 c^3), via x / (4 sinh^2(x/2)), x = E/kT."""
    if not T > 0:
        raise ValueError("planck_derivative needs T > 0")
    E = np.asarray(E, dtype=float)
    w = _rad_s(E)
    x = E / units.thermal_frequency(T)
    with np.errstate(over="ignore"):
        xs = np.where(x < 700, x, 700.0)
        weight = np.where(x < 700, xs / (4.0 * np.sinh(xs / 2.0) ** 2), 0.0)
    out = units.HBAR * w**3 / (math.pi**2 * units.C**3) * weight
    return out[()] if out.ndim == 0 else out


def planck_derivative_peak():
    """x = hbar w / kT at the maximum of x^4 / (4 sinh^2(x/2))."""
    from scipy.optimize import brentq
    # d/dx log: 4/x - coth(x/2) = 0
    return brentq(lambda x: 4.0 / x - 1.0 / math.tanh(x / 2.0), 1.0, 10.0, xtol=1e-14)


@functools.lru_cache(maxsize=None)
def _moments_numeric(rtol=1e-12):
    """int du u^n kappa(u) for n = 0, 1, 2 by quadrature, shape (3, 4)."""
    out = []
    for n in range(3):
        r = quad(lambda u, n=n: (u**n)[:, None] * kappa_bessel(u), -np.inf, np.inf,
                 breakpoints=(0.0,), rtol=rtol, scale=U_SCALE)
        out.append(np.asarray(r.value))
    arr = np.array(out)
    arr.setflags(write=False)
    return arr


def _static_moment_matrices(z):
    """int dq/2pi q^n K(q) for n = 0, 1, 2 (nm^-3, nm^-4, nm^-5)."""
    m = _moments_numeric()
    pref = 1.0 / (4.0 * math.pi * z**3)
    return [assemble(m[n]) * pref / (2.0 * z) ** n for n in range(3)]


def _eta_trace(alpha, z):
    p0, q1, q2 = _static_moment_matrices(z)
    ad = dagger(alpha)
    return float(np.real(np.trace(alpha @ p0 @ ad @ q2) - np.trace(alpha @ q1 @ ad @ q1)))


def eta_full(atom: AtomParams, material, z, E, include_vacuum=False):
    """Spectral density from the double wavevector integral at v = 0.

    The q and q~ integrals factorize at v = 0; each factor is a numerical
    moment of the kernel.  ``E`` scalar or array (eV), ``z`` in nm.
    """
    E_arr = np.atleast_1d(np.asarray(E, dtype=float))
    out = np.empty_like(E_arr)
    p0_static = assemble(np.array([0.5, 0.5, 1.0, 0.0]) * math.pi) / (4.0 * math.pi * z**3)
    for i, e in enumerate(E_arr):
        r = complex(material.fresnel(e))
        G = r * p0_static
        if include_vacuum:
            G = G + 1j * vacuum_im_g_local(e) * np.eye(3)
        alpha = dress(atom, e, G)
        X = _eta_trace(alpha, z) * r.imag**2
        out[i] = 2.0 * math.pi * units.C**3 / _rad_s(e) ** 4 * X / units.NM**2
    return out[0] if np.ndim(E) == 0 else out


def eta_nearfield(atom: AtomParams, material, z, E):
    """(9 c^3 / 4 pi eps0^2 w^4) |alpha_B|^2 Im r^2 / (2z)^8 with z in nm."""
    E = np.asarray(E, dtype=float)
    a = np.abs(alpha_bare(atom, E, gamma=0.0)) * units.volume_nm3_to_si(1.0)
    imr = E * material.im_r_over_omega(E)
    zz = 2.0 * z * units.NM
    out = 9.0 * units.C**3 / (4.0 * math.pi * units.EPS0**2 * _rad_s(E) ** 4) \
        * a**2 * imr**2 / zz**8
    return out[()] if np.ndim(out) == 0 else out


def eta_lowfreq(atom: AtomParams, material, z, E):
    """Low-frequency limit of ``eta_nearfield``: (9 c^3/pi) alpha0^2 rho^2 / (w^2 (2z)^8)."""
    rho = resistivity_rho(material)
    w = _rad_s(E)
    zz = 2.0 * z * units.NM
    out = 9.0 * units.C**3 / math.pi * atom.alpha0_si**2 * rho**2 / (w**2 * zz**8)
    return out[()] if np.ndim(out) == 0 else out


def eta_vacuum(atom: AtomParams, E, polarizability="dressed"):
    """w Im[alpha(w)] / (3 c^2 eps0) for the atom in free space."""
    from .force import im_alpha_vacuum
    im = im_alpha_vacuum(atom, E, polarizability) * units.volume_nm3_to_si(1.0)
    return _rad_s(E) * im / (3.0 * units.C**2 * units.EPS0)


def mu_from_filter(atom: AtomParams, material, z, T, kind="surface", rtol=1e-8):
    """-int dw eta(w) T d_T rho(w) in kg/s.

    ``kind`` "surface" uses ``eta_full`` above the material at height z (nm);
    "vacuum" uses the free-space spectral density.
    """
    if T == 0:
        return 0.0
    kT = units.thermal_frequency(T)
    top = 60.0 * kT
    bps = [kT, 3.83 * kT, 10 * kT]
    if kind == "surface":
        def f(E):
            return eta_full(atom, material, z, E) * planck_derivative(E, T)
        wsp = material.surface_resonance()
        for w in (atom.omega_a, wsp):
            if w is not None and w < top:
                bps += [0.99 * w, w, 1.01 * w]
    elif kind == "vacuum":
        def f(E):
            return eta_vacuum(atom, E) * planck_derivative(E, T)
        if atom.omega_a < top:
            bps += [atom.omega_a]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    res = quad(f, 0.0, top, breakpoints=bps, rtol=rtol)
    return -res.value / units.HBAR_EVS


# --------------------------------------------------------------------------

@dataclass
class SpectralCurve:
    omega: np.ndarray
    values: np.ndarray
    kind: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    def to_rows(self):
        return [(float(w), float(v), self.kind) for w, v in zip(self.omega, self.values)]


def log_grid(lo, hi, per_decade=POINTS_PER_DECADE):
    if not 0 < lo < hi:
        raise ValueError("frequency range must satisfy 0 < lo < hi")
    n = max(2, int(round(per_decade * math.log10(hi / lo))) + 1)
    return np.logspace(math.log10(lo), math.log10(hi), n)


def filter_curves(atom: AtomParams, material, z, T, lo=1e-3, hi=20.0):
    """eta normalized to its low-frequency law and T d_T rho over half its maximum."""
    w = log_grid(lo, hi)
    eta = eta_full(atom, material, z, w) / eta_lowfreq(atom, material, z, w)
    pd = planck_derivative(w, T)
    x_peak = planck_derivative_peak()
    half_max = 0.5 * planck_derivative(x_peak * units.thermal_frequency(T), T)
    meta = {"eta_normalization": "eta_lowfreq", "planck_normalization": "half_max",
            "omega_a": atom.omega_a, "omega_sp": material.surface_resonance(),
            "z_nm": z, "T_K": T}
    return [SpectralCurve(w, eta, "eta_full", dict(meta)),
            SpectralCurve(w, pd / half_max, "planck_derivative", dict(meta))]


def find_peak(fn, lo, hi, n=400):
    """Location of the maximum of fn on [lo, hi]: grid scan then bounded refinement."""
    from scipy.optimize import minimize_scalar
    grid = np.linspace(lo, hi, n)
    vals = np.array([fn(x) for x in grid])
    i = int(np.argmax(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]
    res = minimize_scalar(lambda x: -fn(x), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-10 * max(abs(b), 1.0)})
    return float(res.x)


def write_curves_csv(curves, path, precision=10):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega_eV", "value", "kind"])
        for c in curves:
            for om, val, kind in c.to_rows():
                w.writerow([f"{om:.{precision}g}", f"{val:.{precision}g}", kind])
