"""Drag force on an atom moving parallel to a planar surface.

Three equivalent evaluations of the steady-state force are provided:

* ``force_normal_ordering``: dipole and field spectra at the energy seen by
  the atom, integrated over the Doppler-shifted surface energy.
* ``force_shifted``: integration over the atomic energy with the Bose factor
  at the shifted energy and alpha_Im taken directly from alpha.
* ``force_symmetric``: the coth-difference form, written as
  ``Tr[a P a+ N1] - Tr[a N0 a+ Q]`` with all q-integrals done first.

Each route returns the translational (symmetric kernel) and rotational
(spin kernel) parts obtained by projecting the q-weighted kernel.

Internal units: eV, nm, nm^3; the integrand of every route is dimensionless
per eV and nm, and ``FORCE_PREFACTOR`` turns ``int dE X`` into newtons.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import units
from .green import assemble, dagger, im_hermitian, kappa_bessel, spin_sign, vacuum_im_g_local
from .materials import Material
from .polarizability import (U_SCALE, AtomParams, alpha_bare, doppler_energy, dress,
                             inverse_bare)
from .quadrature import Axis, IntegralSpec, QuadratureBudgetError, integrate, quad
from .spectra import surface_integrals, x_bose

FORCE_PREFACTOR = 2.0 / math.pi * units.FORCE_EV_PER_NM
# frequency window in units of the larger of the Doppler and thermal energies
CUTOFF_FACTOR = 60.0
MAX_V_OVER_C = 1e-3
ROUTES = ("normal", "shifted", "symmetric")


class ResonantRegimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Scenario:
    """Atom at height ``z`` (nm) moving with ``v`` (m/s) at temperature ``T`` (K).

    ``mode`` is "full" or "lte"; ``order`` is "dressed" or "leading".
    ``rtol`` applies to the frequency integral, ``inner_rtol`` to the
    wavevector integrals.  Negative ``v`` is accepted (used for parity checks).
    """
    atom: AtomParams
    material: Material | None
    z: float
    v: float
    T: float
    mode: str = "full"
    order: str = "dressed"
    rtol: float = 1e-6
    inner_rtol: float = 1e-9
    max_eval: int = 20_000

    def __post_init__(self):
        if self.material is not None and not self.z > 0:
            raise ValueError("z must be positive when a surface is present")
        if self.T < 0:
            raise ValueError("temperature must be non-negative")
        if abs(self.v) / units.C >= MAX_V_OVER_C:
            raise ValueError(f"v/c must stay below {MAX_V_OVER_C} (non-relativistic model)")
        if self.mode not in ("full", "lte"):
            raise ValueError(f"mode must be 'full' or 'lte', got {self.mode!r}")
        if self.order not in ("dressed", "leading"):
            raise ValueError(f"order must be 'dressed' or 'leading', got {self.order!r}")

    def with_(self, **kw):
        return replace(self, **kw)

    @property
    def kT(self):
        return units.thermal_frequency(self.T)

    @property
    def e_v(self):
        return doppler_energy(self.v, self.z)

    @property
    def resonant(self):
        """True when motion or temperature reaches the atomic resonance."""
        wa = self.atom.omega_a
        return 2.0 * abs(self.e_v) > 0.5 * wa or self.kT > 0.5 * wa


@dataclass
class ForceResult:
    F: float
    F_t: float
    F_r: float
    error: float
    route: str
    seconds: float
    evaluations: int
    converged: bool
    v: float
    resonant: bool = False

    @property
    def mu(self):
        return self.F / self.v if self.v != 0 else math.nan

    @property
    def mu_t(self):
        return self.F_t / self.v if self.v != 0 else math.nan

    @property
    def mu_r(self):
        return self.F_r / self.v if self.v != 0 else math.nan


# --------------------------------------------------------------------------
# helpers

def _split(X, Y):
    """Tr[X Y_sym] and Tr[X Y_spin] for Hermitian Y with planar structure."""
    Ysym = np.real(Y).astype(complex)
    Yspin = 1j * np.imag(Y)
    return np.real(np.trace(X @ Ysym)), spin_sign() * np.real(np.trace(X @ Yspin))


def _transpose_kernel(A):
    return np.swapaxes(A, -1, -2)


def _polarizability(s: Scenario, omega, G):
    """Return (alpha, alpha_Im) in the chosen order of the atom-field coupling."""
    if s.order == "leading":
        a = alpha_bare(s.atom, omega, gamma=0.0 if abs(omega - s.atom.omega_a) > 1e-12
                       else s.atom.gamma)
        return a * np.eye(3), None
    A = dress(s.atom, omega, G)
    return A, im_hermitian(A)


def _frequency_window(s: Scenario):
    scale = max(abs(s.e_v), s.kT)
    top = CUTOFF_FACTOR * scale
    pts = [f * abs(s.e_v) for f in (1.0, 5.0, 20.0)] + [f * s.kT for f in (1.0, 5.0, 20.0)]
    wa = s.atom.omega_a
    res = [wa]
    if s.material is not None and s.material.surface_resonance() is not None:
        res.append(s.material.surface_resonance())
    for w in res:
        if w < top:
            width = max(1e-6 * w, s.atom.gamma)
            pts += [w - 50 * width, w, w + 50 * width]
    return top, sorted(p for p in pts if 0 < p < top)


def _run(s: Scenario, integrand, lower, upper, bps, route):
    t0 = time.perf_counter()
    if s.resonant:
        warnings.warn("scenario is in the resonant regime; accuracy degrades",
                      ResonantRegimeWarning, stacklevel=3)
    if upper <= lower:
        return ForceResult(0.0, 0.0, 0.0, 0.0, route, time.perf_counter() - t0, 0, True,
                           s.v, s.resonant)
    calls = {"n": 0}

    def f(E):
        out = np.empty((len(E), 2))
        for i, e in enumerate(E):
            out[i] = integrand(float(e), calls)
        return out

    spec = IntegralSpec((Axis(lower, upper, tuple(bps)),), rtol=s.rtol, atol=0.0,
                        max_eval=s.max_eval)
    res = integrate(spec, f)
    ft, fr = np.asarray(res.value) * FORCE_PREFACTOR
    err = res.error * FORCE_PREFACTOR
    if not res.converged:
        raise QuadratureBudgetError(
            f"{route} route did not converge within {s.max_eval} frequency samples",
            partial=float(ft + fr), error=err)
    return ForceResult(float(ft + fr), float(ft), float(fr), float(err), route,
                       time.perf_counter() - t0, res.evaluations + calls["n"], True, s.v,
                       s.resonant)


def _need_surface(s):
    if s.material is None:
        raise ValueError("surface force routes need a material; use force_blackbody")


# --------------------------------------------------------------------------
# routes

def _symmetric_integrand(s: Scenario):
    lte = s.mode == "lte"

    def g(E, calls):
        si = surface_integrals(s.material, s.z, s.v, E, s.T, lte, s.inner_rtol)
        calls["n"] += si.evaluations
        A, _ = _polarizability(s, E, si.G)
        Ad = dagger(A)
        t1, r1 = _split(A @ si.P @ Ad, si.N1)
        t2, r2 = _split(A @ si.N0 @ Ad, si.Q)
        return t1 - t2, r1 - r2
    return g


def _shifted_integrand(s: Scenario):
    lte = s.mode == "lte"

    def g(E, calls):
        si = surface_integrals(s.material, s.z, s.v, E, s.T, lte, s.inner_rtol)
        calls["n"] += si.evaluations
        A, Aim = _polarizability(s, E, si.G)
        Ad = dagger(A)
        if Aim is None:
            Aim = A @ si.P @ Ad
        Q1n = si.Q + si.N1
        t1, r1 = _split(Aim, Q1n)
        t2, r2 = _split(A @ (si.P + si.N0) @ Ad, si.Q)
        return t1 - t2, r1 - r2
    return g


def _half_line_kernels(s: Scenario, nu):
    """A1 = int_{qv > nu} q n(qv - nu) Im r K^T, A2 the same without n."""
    e_v = s.e_v
    kT = s.kT
    pref = 1.0 / (4.0 * math.pi * s.z**3)
    qfac = 1.0 / (2.0 * s.z)
    u0 = nu / e_v
    mat = s.material

    def f(u):
        x = u * e_v - nu
        ir = mat.im_r_over_omega(x)
        k = kappa_bessel(u)
        w = (u * qfac)[:, None] * k
        return np.concatenate([(x_bose(x, kT) * ir)[:, None] * w, (x * ir)[:, None] * w],
                              axis=1)

    bps = [0.0]
    wsp = mat.surface_resonance()
    if wsp is not None:
        bps += [(wsp + nu) / e_v, (-wsp + nu) / e_v]
    if e_v > 0:
        axis = Axis(u0, np.inf, tuple(p for p in bps if abs(p) < 200), U_SCALE)
    else:
        axis = Axis(-np.inf, u0, tuple(p for p in bps if abs(p) < 200), U_SCALE)
    res = integrate(IntegralSpec((axis,), rtol=s.inner_rtol, atol=1e-300), f)
    c = np.asarray(res.value).reshape(2, 4) * pref
    A1 = _transpose_kernel(assemble(c[0]))
    A2 = _transpose_kernel(assemble(c[1]))
    return A1, A2, res.evaluations


def _normal_integrand(s: Scenario):
    def g(nu, calls):
        si = surface_integrals(s.material, s.z, s.v, nu, s.T, False, s.inner_rtol)
        A1, A2, n2 = _half_line_kernels(s, nu)
        calls["n"] += si.evaluations + n2
        A, Aim = _polarizability(s, nu, si.G)
        Ad = dagger(A)
        if Aim is None:
            Aim = A @ si.P @ Ad
        t1, r1 = _split(Aim, A1)
        t2, r2 = _split(A @ (si.P + si.N0) @ Ad, A2)
        return -(t1 + t2), -(r1 + r2)
    return g


def _normal_static_integrand(s: Scenario):
    """Normal-ordering kernel without Doppler shift (v = 0)."""
    kT = s.kT

    def g(E, calls):
        plus = surface_integrals(s.material, s.z, 0.0, E, s.T, False, s.inner_rtol)
        minus = surface_integrals(s.material, s.z, 0.0, -E, s.T, False, s.inner_rtol)
        A, Aim = _polarizability(s, -E, minus.G)
        Ad = dagger(A)
        if Aim is None:
            Aim = A @ minus.P @ Ad
        nE = float(x_bose(np.array([E]), kT)[0]) / E
        Qt = _transpose_kernel(plus.Q)
        t1, r1 = _split(nE * Aim, Qt)
        t2, r2 = _split(A @ (minus.P + minus.N0) @ Ad, Qt)
        return -(t1 + t2), -(r1 + r2)
    return g


def force_symmetric(s: Scenario) -> ForceResult:
    _need_surface(s)
    top, bps = _frequency_window(s)
    return _run(s, _symmetric_integrand(s), 0.0, top, bps, "symmetric")


def force_shifted(s: Scenario) -> ForceResult:
    _need_surface(s)
    top, bps = _frequency_window(s)
    return _run(s, _shifted_integrand(s), 0.0, top, bps, "shifted")


def force_normal_ordering(s: Scenario) -> ForceResult:
    _need_surface(s)
    if s.mode == "lte":
        raise ValueError("LTE mode is available for the shifted and symmetric routes")
    top, bps = _frequency_window(s)
    if s.e_v == 0:
        return _run(s, _normal_static_integrand(s), 0.0, top, bps, "normal")
    bps = sorted(set(bps) | {-p for p in bps} | {0.0})
    return _run(s, _normal_integrand(s), -top, top, bps, "normal")


def force_leading_order(s: Scenario) -> ForceResult:
    """Symmetric route with the bare polarizability."""
    res = force_symmetric(s.with_(order="leading"))
    res.route = "leading"
    return res


def compute_force(s: Scenario, route="symmetric") -> ForceResult:
    fn = {"normal": force_normal_ordering, "shifted": force_shifted,
          "symmetric": force_symmetric, "leading": force_leading_order}
    if route not in fn:
        raise ValueError(f"unknown route {route!r}")
    return fn[route](s)


# --------------------------------------------------------------------------
# free space

def im_alpha_vacuum(atom: AtomParams, omega, polarizability="dressed"):
    """Im of the static-atom polarizability volume in free space (nm^3).

    "dressed": radiation-reaction dressing by the local vacuum Im G.
    "sharp": bare oscillator with the numerical linewidth.
    """
    omega = np.asarray(omega, dtype=float)
    if polarizability == "sharp":
        return np.imag(alpha_bare(atom, omega))
    if polarizability != "dressed":
        raise ValueError(f"unknown polarizability model {polarizability!r}")
    g0 = vacuum_im_g_local(omega)
    inv = inverse_bare(atom, omega)
    return g0 / (inv * inv + g0 * g0)


def mu_blackbody_integral(atom: AtomParams, T, polarizability="dressed", rtol=1e-10):
    """-(hbar^2 beta / (3 pi c^5)) int dw Im[alpha/(4 pi eps0)] w^5 / sinh^2, in kg/s.

    Returns (mu, error).
    """
    if T == 0:
        return 0.0, 0.0
    kT = units.thermal_frequency(T)
    wa = atom.omega_a
    if polarizability == "sharp":
        width = max(atom.gamma, 1e-300)
    else:
        width = vacuum_im_g_local(wa) * atom.alpha0_volume * wa / 2.0
    top = max(CUTOFF_FACTOR * kT, wa + 1e4 * width) if polarizability == "sharp" else \
        CUTOFF_FACTOR * kT
    bps = [kT, 5 * kT, 20 * kT]
    if wa < top:
        bps += [wa - 1e3 * width, wa - 20 * width, wa, wa + 20 * width, wa + 1e3 * width]

    def f(E):
        y = E / (2.0 * kT)
        with np.errstate(over="ignore"):
            w = np.where(y < 350, E**5 / np.sinh(np.minimum(y, 350)) ** 2, 0.0)
        return im_alpha_vacuum(atom, E, polarizability) * w

    res = quad(f, 0.0, top, breakpoints=bps, rtol=rtol)
    # energy integral -> SI: Im alpha volume nm^3, (E/hbar)^5 dE/hbar
    conv = units.NM**3 / units.HBAR_EVS**6
    pref = -units.HBAR**2 / (units.KB * T) / (3.0 * math.pi * units.C**5)
    return pref * conv * res.value, abs(pref * conv) * res.error


def force_blackbody(atom: AtomParams, T, v, polarizability="dressed") -> ForceResult:
    """Linear-in-v black-body friction in free space."""
    t0 = time.perf_counter()
    mu, err = mu_blackbody_integral(atom, T, polarizability)
    return ForceResult(mu * v, mu * v, 0.0, abs(err * v), f"blackbody-{polarizability}",
                       time.perf_counter() - t0, 0, True, v, units.thermal_frequency(T)
                       > 0.5 * atom.omega_a)


# --------------------------------------------------------------------------

def viscosity_t_r_split(s: Scenario, route="symmetric"):
    """(mu_t, mu_r) from a single evaluation with the projected kernel."""
    if s.v == 0:
        raise ValueError("viscosity needs v != 0; use the asymptotic mu_T at v = 0")
    r = compute_force(s, route)
    return r.mu_t, r.mu_r


def viscosity(s: Scenario, route="symmetric"):
    """mu = F/v with its t/r split, closed-form references and regime label."""
    from . import asymptotics as asy
    from .materials import lambda_rho, resistivity_rho

    if s.v == 0:
        raise ValueError("viscosity needs v != 0; use the asymptotic mu_T at v = 0")
    _need_surface(s)
    r = compute_force(s, route)
    z_m = s.z * units.NM
    rho = resistivity_rho(s.material)
    mu_T, mu_Tt, mu_Tr = asy.mu_t_planar(s.atom, rho, z_m, s.T)
    scales = asy.critical_scales(z_m, abs(s.v), s.T, lambda_rho(rho))
    return asy.ViscosityBreakdown(
        mu=r.mu, mu_t=r.mu_t, mu_r=r.mu_r,
        mu_qf=asy.mu_qf_planar(s.atom, rho, z_m, s.v),
        mu_T=mu_T, mu_T_t=mu_Tt, mu_T_r=mu_Tr,
        mu_vac_resonant=asy.mu_bb_resonant(s.atom, s.T),
        mu_vac_lowT=asy.mu_bb_lowT(s.atom, s.T),
        regime=asy.classify_regime(z_m, s.T, s.v, s.material, s.atom),
        scales=scales, error=abs(r.error / s.v), route=r.route, resonant=r.resonant,
        seconds=r.seconds)
