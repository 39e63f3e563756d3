"""Acceptance checks shared by ``emviscosity validate`` and the test-suite.

Every criterion function returns a list of ``Check`` records; a criterion
passes when all of its checks pass.  Reference parameters: gold-like Drude
surface (9 eV, 0.1 eV) and an Rb-like atom (47.28 A^3, 1.3 eV).
"""
from __future__ import annotations

import math
import os
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import asymptotics as asy
from . import spectral_density as sd
from . import units
from .force import (ResonantRegimeWarning, Scenario, force_normal_ordering, force_shifted,
                    force_symmetric, mu_blackbody_integral)
from .green import kernel_bessel, kernel_from_ky_integral
from .materials import gold_drude, lambda_rho, resistivity_rho
from .polarizability import rb_like
from .quadrature import quad, sweep

# coefficient in front of hbar wa^5 x / (c^5 sinh^2(x/2)) in the reference
# resonant black-body formula; the sharp-line integral itself gives 1/6
REFERENCE_RESONANT_COEFFICIENT = 1.0 / 3.0
SWEEP_WORKERS = 8


@dataclass
class Check:
    criterion: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    target: str = ""
    seconds: float = 0.0
    note: str = ""

    def line(self):
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} [{self.criterion}] {self.name}: {vals} (target {self.target})"

    def as_dict(self):
        return asdict(self)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _rel(a, b):
    return abs(a / b - 1.0)


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def _setup():
    return rb_like(), gold_drude()


# --------------------------------------------------------------------------

def criterion_1():
    """Kernel sum rules and backend agreement."""
    t0 = time.perf_counter()
    worst_sum, worst_backend = 0.0, 0.0
    for z in (1.0, 5.0, 50.0):
        r = quad(lambda q: kernel_bessel(q, z) / (2.0 * math.pi), -np.inf, np.inf,
                 breakpoints=(0.0,), rtol=1e-10, scale=1.0 / (2.0 * z))
        # reduced kernels carry 4 pi eps0; convert nm^-3 to SI
        got = np.asarray(r.value)[:3] / (4.0 * math.pi * units.EPS0) / units.NM**3
        ref = np.array([1.0, 1.0, 2.0]) / (32.0 * math.pi * units.EPS0 * (z * units.NM) ** 3)
        worst_sum = max(worst_sum, float(np.max(np.abs(got / ref - 1.0))))
        q = np.linspace(-6.0, 6.0, 25) / (2.0 * z)
        kb, kk = kernel_bessel(q, z), kernel_from_ky_integral(q, z)
        scale = np.max(np.abs(kb))
        worst_backend = max(worst_backend, float(np.max(np.abs(kb - kk)) / scale))
    dt = time.perf_counter() - t0
    return [
        Check(1, "kernel sum rules", worst_sum < 1e-6, {"max_rel_dev": worst_sum}, "< 1e-6", dt),
        Check(1, "bessel vs k_y quadrature", worst_backend < 1e-8,
              {"max_rel_dev": worst_backend}, "< 1e-8", dt),
        Check(1, "runtime", dt < 1.0, {"seconds": dt}, "< 1 s", dt),
    ]


def criterion_2():
    """Double-q thermal viscosity against the closed form."""
    atom, gold = _setup()
    z, T = 5.0, 3.0
    t0 = time.perf_counter()
    mu = asy.mu_general_thermal(atom, gold, z, T)
    mt = asy.mu_general_thermal(atom, gold, z, T, "t")
    mr = asy.mu_general_thermal(atom, gold, z, T, "r")
    dt = time.perf_counter() - t0
    ref = asy.mu_t_planar(atom, resistivity_rho(gold), z * units.NM, T)[0]
    ratio = mr / mt
    return [
        Check(2, "mu_general_thermal vs closed form", _rel(mu, ref) < 5e-3,
              {"ratio": mu / ref}, "1 +- 0.005", dt),
        Check(2, "thermal mu_r / mu_t", abs(ratio + 0.5) <= 3e-3, {"ratio": ratio},
              "-0.500 +- 0.003", dt),
        Check(2, "runtime", dt < 5.0, {"seconds": dt}, "< 5 s", dt),
    ]


def criterion_3():
    """Double-q quantum-friction viscosity against the closed form."""
    atom, gold = _setup()
    z, v = 5.0, 12e3
    t0 = time.perf_counter()
    mu = asy.mu_qf_general(atom, gold, z, v)
    mt = asy.mu_qf_general(atom, gold, z, v, "t")
    mr = asy.mu_qf_general(atom, gold, z, v, "r")
    dt = time.perf_counter() - t0
    ref = asy.mu_qf_planar(atom, resistivity_rho(gold), z * units.NM, v)
    ratio = mr / mt
    return [
        Check(3, "mu_qf_general vs closed form", _rel(mu, ref) < 5e-3, {"ratio": mu / ref},
              "1 +- 0.005", dt),
        Check(3, "quantum-friction mu_r / mu_t", abs(ratio + 5.0 / 7.0) <= 4e-3,
              {"ratio": ratio}, "-5/7 +- 0.004", dt),
        Check(3, "runtime", dt < 5.0, {"seconds": dt}, "< 5 s", dt),
    ]


def criterion_4(rtol=1e-6):
    """Leading-order symmetric route tends to mu_T at low v and mu_QF at high v."""
    atom, gold = _setup()
    z, T = 5.0, 3.0
    rho = resistivity_rho(gold)
    vc = asy.v_c(z * units.NM, T)
    mu_T = asy.mu_t_planar(atom, rho, z * units.NM, T)[0]
    out = []
    for frac in (0.05, 0.1):
        s = Scenario(atom, gold, z, frac * vc, T, order="leading", rtol=rtol)
        r, dt = _timed(force_symmetric, s)
        out.append(Check(4, f"mu / mu_T at v = {frac} v_c", _rel(r.mu, mu_T) < 0.02 and dt < 60,
                         {"ratio": r.mu / mu_T, "seconds": dt}, "1 +- 0.02, < 60 s", dt))
    v = 10.0 * vc
    s = Scenario(atom, gold, z, v, T, order="leading", rtol=rtol)
    r, dt = _timed(force_symmetric, s)
    mu_qf = asy.mu_qf_planar(atom, rho, z * units.NM, v)
    out.append(Check(4, "mu / mu_QF at v = 10 v_c", _rel(r.mu, mu_qf) < 0.05 and dt < 60,
                     {"ratio": r.mu / mu_qf, "v": v, "seconds": dt}, "1 +- 0.05, < 60 s", dt))
    return out


ORDERING_PANEL = (
    # (z nm, v m/s, T K)
    (5.0, 500.0, 3.0),
    (5.0, 12e3, 0.0),
    (5.0, 12e3, 3.0),
    (10.0, 2e3, 10.0),
    (20.0, 5e3, 30.0),
)


def criterion_5(rtol=1e-6):
    """Normal, shifted and symmetric routes agree on a scenario panel."""
    atom, gold = _setup()
    out = []
    t0 = time.perf_counter()
    for z, v, T in ORDERING_PANEL:
        s = Scenario(atom, gold, z, v, T, rtol=rtol)
        res = [force_normal_ordering(s), force_shifted(s), force_symmetric(s)]
        Fs = np.array([r.F for r in res])
        errs = np.array([r.error for r in res])
        worst = max(abs(Fs[i] - Fs[j]) / abs(Fs[j]) for i in range(3) for j in range(i + 1, 3))
        combined = float(np.max(errs) * 2 / np.min(np.abs(Fs)))
        out.append(Check(5, f"routes agree at z={z} nm, v={v} m/s, T={T} K", worst <= 1e-3,
                         {"max_rel_diff": worst, "rel_quad_error": combined}, "<= 1e-3",
                         sum(r.seconds for r in res)))
    dt = time.perf_counter() - t0
    out.append(Check(5, "runtime", dt < 300, {"seconds": dt}, "< 300 s", dt))
    return out


def criterion_6():
    """Free-space black-body friction: T^8 law and resonant limit."""
    atom, _ = _setup()
    t0 = time.perf_counter()
    temps = (30.0, 100.0, 300.0)
    mus = []
    out = []
    for T in temps:
        mu, _ = mu_blackbody_integral(atom, T, "dressed")
        mus.append(mu)
        ref = asy.mu_bb_lowT(atom, T)
        out.append(Check(6, f"dressed vs T^8 law at {T:g} K", _rel(mu, ref) < 0.01,
                         {"ratio": mu / ref}, "1 +- 0.01"))
    slope = float(np.polyfit(np.log(temps), np.log(np.abs(mus)), 1)[0])
    out.append(Check(6, "log-log slope", abs(slope - 8.0) <= 0.05, {"slope": slope},
                     "8.00 +- 0.05"))
    Ta = atom.omega_a / units.KB_EVK
    mu_sharp, _ = mu_blackbody_integral(atom, Ta, "sharp")
    line = asy.mu_bb_resonant(atom, Ta)
    reference = line * REFERENCE_RESONANT_COEFFICIENT * 6.0
    out.append(Check(6, "resonant mode vs reference formula at T_a", _rel(mu_sharp, reference)
                     < 0.01, {"ratio": mu_sharp / reference}, "1 +- 0.01",
                     note="reference coefficient 1/3; the sharp-line integral gives 1/6"))
    out.append(Check(6, "resonant mode vs sharp-line closed form at T_a",
                     _rel(mu_sharp, line) < 0.01, {"ratio": mu_sharp / line}, "1 +- 0.01"))
    dt = time.perf_counter() - t0
    out.append(Check(6, "runtime", dt < 10, {"seconds": dt}, "< 10 s", dt))
    return out


def full_crossover(atom, material, v, T, rtol=1e-6, bracket=(1.0, 100.0)):
    """Height (nm) where the thermal excess mu(T) - mu(0) equals mu(0)."""
    def g(logz):
        s = Scenario(atom, material, math.exp(logz), v, T, order="leading", rtol=rtol)
        hot = force_symmetric(s).mu
        cold = force_symmetric(s.with_(T=0.0)).mu
        return (hot - cold) / cold - 1.0
    return math.exp(brentq(g, math.log(bracket[0]), math.log(bracket[1]), xtol=1e-3))


def criterion_7(rtol=1e-6):
    """Crossover scales."""
    atom, gold = _setup()
    rho = resistivity_rho(gold)
    v, T = 12e3, 3.0
    lc = asy.lambda_c(v, T)
    ident = asy.mu_t_planar(atom, rho, lc, T)[0] / asy.mu_qf_planar(atom, rho, lc, v)
    zc, dt = _timed(full_crossover, atom, gold, v, T, rtol, (3.0, 60.0))
    rough = units.KB * 3.0 * 10e-9 / units.HBAR
    return [
        Check(7, "mu_T(lambda_c) / mu_QF(lambda_c)", abs(ident - 1.0) <= 1e-9,
              {"ratio": ident}, "1 +- 1e-9"),
        Check(7, "full-integral crossover / lambda_c", abs(zc / (lc / units.NM) - 1.0) <= 0.1,
              {"ratio": zc / (lc / units.NM), "z_nm": zc}, "1 +- 0.1", dt),
        Check(7, "rough v_c(3 K, 10 nm)", 3.9e3 <= rough <= 4.1e3, {"v_m_s": rough},
              "3.9-4.1 km/s"),
    ]


def regime_grid(atom, material, z_m, T, v):
    """Regime labels on the z x T grid, shape (len(T), len(z))."""
    return [[asy.classify_regime(z, t, v, material, atom) for z in z_m] for t in T]


def criterion_8():
    """Regime boundaries sit where the competing closed forms are equal."""
    atom, gold = _setup()
    rho = resistivity_rho(gold)
    lr = lambda_rho(rho)
    z = np.geomspace(1e-9, 1e-6, 50)
    T = np.geomspace(1.0, 1e3, 50)
    v = asy.v_c(math.sqrt(z[0] * z[-1]), math.sqrt(T[0] * T[-1]))
    worst_qf, worst_vac = 0.0, 0.0
    for zi in z:
        tq = float(asy.boundary_qf_thermal(zi, v))
        mq, mt, _ = asy.asymptotic_viscosities(atom, rho, zi, v, tq)
        worst_qf = max(worst_qf, abs(mt / mq - 1.0))
        tv = float(asy.boundary_thermal_vacuum(zi, lr))
        _, mt, mv = asy.asymptotic_viscosities(atom, rho, zi, v, tv)
        worst_vac = max(worst_vac, abs(mt / mv - 1.0))
    grid, dt = _timed(regime_grid, atom, gold, z, T, v)
    return [
        Check(8, "QF/thermal boundary", worst_qf <= 1e-6, {"max_rel_dev": worst_qf}, "<= 1e-6"),
        Check(8, "thermal/vacuum boundary", worst_vac <= 1e-6, {"max_rel_dev": worst_vac},
              "<= 1e-6"),
        Check(8, "50x50 map runtime", dt < 10 and len(grid) == 50, {"seconds": dt}, "< 10 s",
              dt),
    ]


def criterion_9():
    """Spectral-density picture."""
    atom, gold = _setup()
    t0 = time.perf_counter()
    z = 1.0
    wsp = gold.surface_resonance()
    p_sp = sd.find_peak(lambda E: sd.eta_full(atom, gold, z, E), 0.9 * wsp, 1.1 * wsp)
    p_a = sd.find_peak(lambda E: sd.eta_full(atom, gold, z, E), 0.9 * atom.omega_a,
                       1.1 * atom.omega_a)
    x_pk = sd.find_peak(lambda E: sd.planck_derivative(E, 300.0), 0.01, 0.5) \
        / units.thermal_frequency(300.0)
    mu_f = sd.mu_from_filter(atom, gold, 5.0, 30.0)
    mu_g = asy.mu_general_thermal(atom, gold, 5.0, 30.0)
    dt = time.perf_counter() - t0
    return [
        Check(9, "eta peak at surface resonance", _rel(p_sp, wsp) <= 0.02,
              {"peak_eV": p_sp, "omega_sp": wsp}, "within 2%"),
        Check(9, "eta peak at atomic resonance", _rel(p_a, atom.omega_a) <= 0.02,
              {"peak_eV": p_a, "omega_a": atom.omega_a}, "within 2%"),
        Check(9, "Planck-derivative maximum", abs(x_pk / 3.83 - 1.0) <= 5e-3,
              {"x_peak": x_pk}, "3.83 +- 0.5%"),
        Check(9, "filter vs double-q at 30 K", _rel(mu_f, mu_g) <= 0.05,
              {"ratio": mu_f / mu_g}, "1 +- 0.05"),
        Check(9, "runtime", dt < 60, {"seconds": dt}, "< 60 s", dt),
    ]


def _sweep_point(args):
    z, rtol = args
    atom, gold = _setup()
    s = Scenario(atom, gold, z, 12e3, 3.0, order="leading", rtol=rtol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResonantRegimeWarning)
        r = force_symmetric(s)
    return r.F, r.F_t, r.F_r


def criterion_10(rtol=1e-5, workers=SWEEP_WORKERS):
    """Determinism and parallel speed-up of a 40-point height sweep."""
    items = [(float(z), rtol) for z in np.geomspace(1.0, 200.0, 40)]
    serial, t1 = _timed(sweep, items, _sweep_point, 1)
    par, tn = _timed(sweep, items, _sweep_point, workers)
    same = all(a.ok and b.ok and a.value == b.value for a, b in zip(serial, par))
    speedup = t1 / tn
    cpus = os.cpu_count() or 1
    return [
        Check(10, "1 vs N workers bit-identical", same, {"items": len(items)}, "identical"),
        Check(10, f"speed-up at {workers} workers", speedup >= 3.0,
              {"speedup": speedup, "cpus": cpus, "serial_s": t1, "parallel_s": tn}, ">= 3x",
              note="needs at least 8 physical cores" if cpus < workers else ""),
    ]


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}
TOLERANT = (4, 5, 7)


def run(criteria=None, rtol=None):
    """Run the selected criteria (all by default); ``rtol`` tightens force integrals."""
    checks = []
    for n in criteria or sorted(CRITERIA):
        fn = CRITERIA[n]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResonantRegimeWarning)
            if rtol is not None and n in TOLERANT:
                checks += fn(rtol=rtol)
            else:
                checks += fn()
    return checks


def report(checks):
    by = {}
    for c in checks:
        by.setdefault(c.criterion, []).append(c)
    return {
        "passed": all(c.passed for c in checks),
        "criteria": {str(n): all(c.passed for c in cs) for n, cs in sorted(by.items())},
        "checks": [c.as_dict() for c in checks],
    }
