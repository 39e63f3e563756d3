"""Adaptive Gauss-Kronrod quadrature and a deterministic parallel sweep.

The integrator works on vector-valued integrands: ``f`` receives a 1-D array
of abscissae and returns an array whose leading axis matches it.  All
components share one set of subintervals; the error is measured in the
max-norm over components.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

XK = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
WK = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
WG = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes in the half tables.
_g_idx_half = [1, 3, 5, 7]
for _j, _i in enumerate(_g_idx_half):
    WG[_i] = _WG_HALF[_j]
    WG[14 - _i] = _WG_HALF[_j]

_MAX_SPLIT_PER_ROUND = 128


class IntegrandError(ArithmeticError):
    """Integrand returned a non-finite value."""

    def __init__(self, point, value):
        super().__init__(f"integrand not finite at x={point!r}: {value!r}")
        self.point = point
        self.value = value


class QuadratureBudgetError(RuntimeError):
    """Raised by callers that require convergence when the budget ran out."""

    def __init__(self, message, partial=None, error=None):
        super().__init__(message)
        self.partial = partial
        self.error = error


@dataclass(frozen=True)
class Axis:
    """One integration axis.

    ``lower``/``upper`` may be infinite; semi-infinite pieces are mapped with
    ``x = x0 + scale * t / (1 - t)`` where ``scale`` is the decay length hint.
    ``breakpoints`` may be a sequence or a callable of the outer coordinates.
    """
    lower: float
    upper: float
    breakpoints: Sequence[float] | Callable = ()
    scale: float = 1.0


@dataclass(frozen=True)
class IntegralSpec:
    axes: tuple[Axis, ...]
    rtol: float | tuple[float, ...] = 1e-8
    atol: float = 0.0
    max_eval: int = 2_000_000

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 3:
            raise ValueError("IntegralSpec supports 1 to 3 axes")
        for tol in np.atleast_1d(self.rtol):
            if not tol > 0:
                raise ValueError("relative tolerance must be positive")
        if self.max_eval <= 0:
            raise ValueError("max_eval must be positive")

    def rtol_for(self, level):
        tols = np.atleast_1d(self.rtol)
        return float(tols[min(level, len(tols) - 1)])


@dataclass
class IntegrationResult:
    value: np.ndarray | float
    error: float
    evaluations: int
    converged: bool
    intervals: int = 0

    def __iter__(self):
        # allows ``value, err, n = integrate(...)``
        return iter((self.value, self.error, self.evaluations))


@dataclass(frozen=True)
class _Segment:
    kind: str      # "finite", "upper_inf", "lower_inf"
    x0: float
    x1: float
    scale: float

    def map(self, t):
        if self.kind == "finite":
            return t, np.ones_like(t)
        s = self.scale
        jac = s / (1.0 - t) ** 2
        if self.kind == "upper_inf":
            return self.x0 + s * t / (1.0 - t), jac
        return self.x0 - s * t / (1.0 - t), jac


def _segments(axis: Axis, outer=()):
    a, b = float(axis.lower), float(axis.upper)
    if not a < b:
        if a == b:
            return []
        raise ValueError(f"empty or reversed domain [{a}, {b}]")
    bps = axis.breakpoints(*outer) if callable(axis.breakpoints) else axis.breakpoints
    pts = sorted({float(p) for p in bps if a < p < b and math.isfinite(p)})
    if math.isinf(a) and math.isinf(b) and not pts:
        pts = [0.0]
    edges = [a] + pts + [b]
    segs = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if math.isinf(lo) and math.isinf(hi):
            raise ValueError("segment unbounded on both sides")
        if math.isinf(hi):
            segs.append((_Segment("upper_inf", lo, hi, axis.scale), 0.0, 1.0))
        elif math.isinf(lo):
            segs.append((_Segment("lower_inf", hi, lo, axis.scale), 0.0, 1.0))
        else:
            segs.append((_Segment("finite", lo, hi, 1.0), lo, hi))
    return segs


def _rule(f, segs, los, his, sid):
    """Apply GK15 to a batch of intervals.  Returns (K, err, resabs)."""
    n = len(los)
    half = 0.5 * (his - los)
    mid = 0.5 * (his + los)
    t = mid[:, None] + half[:, None] * XK[None, :]
    x = np.empty_like(t)
    jac = np.empty_like(t)
    for k, (seg, _, _) in enumerate(segs):
        sel = sid == k
        if np.any(sel):
            x[sel], jac[sel] = seg.map(t[sel])
    vals = np.asarray(f(x.ravel()))
    vals = vals.reshape(n, 15, -1)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        raise IntegrandError(float(x[bad[0], bad[1]]), vals[tuple(bad)])
    w = (jac * half[:, None])[..., None]
    fk = vals * w
    K = np.einsum("nij,i->nj", fk, WK)
    G = np.einsum("nij,i->nj", fk, WG)
    # integral of |f - mean| on the interval (weights sum to 2)
    resasc = np.einsum("nij,i->nj", np.abs(fk - 0.5 * K[:, None, :]), WK)
    raw = np.abs(K - G)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * raw / resasc) ** 1.5), raw)
    err = np.max(np.maximum(scaled, 50 * np.finfo(float).eps * np.abs(K)), axis=1)
    return K, err, vals.shape[2]


def _adaptive_1d(f, axis, rtol, atol, max_eval, outer=()):
    segs = _segments(axis, outer)
    if not segs:
        return IntegrationResult(0.0, 0.0, 0, True, 0)
    sid = np.arange(len(segs))
    los = np.array([s[1] for s in segs], dtype=float)
    his = np.array([s[2] for s in segs], dtype=float)
    K, err, m = _rule(f, segs, los, his, sid)
    evals = 15 * len(los)
    frozen = np.zeros(len(los), dtype=bool)
    converged = False
    while True:
        total = K.sum(axis=0)
        total_err = float(err.sum())
        tol = max(atol, rtol * float(np.max(np.abs(total))))
        if total_err <= tol:
            converged = True
            break
        if evals >= max_eval:
            break
        cand = np.where(~frozen)[0]
        if cand.size == 0 or float(err[frozen].sum()) > tol:
            break
        order = cand[np.lexsort((los[cand], -err[cand]))]
        excess = total_err - 0.5 * tol
        csum = np.cumsum(err[order])
        nsplit = int(np.searchsorted(csum, excess) + 1)
        nsplit = max(1, min(nsplit, _MAX_SPLIT_PER_ROUND, len(order),
                            (max_eval - evals) // 30 or 1))
        pick = order[:nsplit]
        # refuse to split intervals at the floating point resolution
        width = his[pick] - los[pick]
        tiny = width <= np.maximum(
            1e-13 * np.maximum(np.abs(los[pick]), np.abs(his[pick])), 1e-280)
        frozen[pick[tiny]] = True
        pick = pick[~tiny]
        if pick.size == 0:
            continue
        mids = 0.5 * (los[pick] + his[pick])
        new_lo = np.concatenate([los[pick], mids])
        new_hi = np.concatenate([mids, his[pick]])
        new_sid = np.concatenate([sid[pick], sid[pick]])
        Kn, en, _ = _rule(f, segs, new_lo, new_hi, new_sid)
        evals += 15 * len(new_lo)
        keep = np.ones(len(los), dtype=bool)
        keep[pick] = False
        los = np.concatenate([los[keep], new_lo])
        his = np.concatenate([his[keep], new_hi])
        sid = np.concatenate([sid[keep], new_sid])
        K = np.concatenate([K[keep], Kn])
        err = np.concatenate([err[keep], en])
        frozen = np.concatenate([frozen[keep], np.zeros(len(new_lo), dtype=bool)])
    # sort by position so the summation order is reproducible
    idx = np.lexsort((los, sid))
    total = K[idx].sum(axis=0)
    return IntegrationResult(total, float(err.sum()), evals, converged, len(los))


def integrate(spec: IntegralSpec, f, _level=0, _outer=()):
    """Integrate ``f`` over the domain described by ``spec``.

    For one axis, ``f(x)`` takes a 1-D array.  For several axes the call is
    ``f(x_outer, ..., y_inner_array)``: outer coordinates arrive as scalars
    and only the innermost axis is vectorised.  Inner errors are integrated
    along with the value and added to the reported error.
    """
    axes = spec.axes[_level:]
    rtol = spec.rtol_for(_level)
    if len(axes) == 1:
        res = _adaptive_1d(lambda x: f(*_outer, x), axes[0], rtol, spec.atol,
                           spec.max_eval, _outer)
        res.value = _squeeze(res.value)
        return res

    counter = {"evals": 0, "ok": True}

    def outer_integrand(xs):
        rows = []
        for x in xs:
            inner = integrate(spec, f, _level + 1, _outer + (float(x),))
            counter["evals"] += inner.evaluations
            counter["ok"] &= inner.converged
            rows.append(np.append(np.atleast_1d(inner.value), inner.error))
        return np.array(rows)

    res = _adaptive_1d(outer_integrand, axes[0], rtol, spec.atol, spec.max_eval, _outer)
    value = np.atleast_1d(res.value)
    inner_err = abs(float(value[-1]))
    return IntegrationResult(_squeeze(value[:-1]), res.error + inner_err,
                             res.evaluations + counter["evals"],
                             res.converged and counter["ok"], res.intervals)


def _squeeze(v):
    v = np.asarray(v)
    return float(v[0]) if v.shape == (1,) else v


def quad(f, a, b, *, breakpoints=(), rtol=1e-10, atol=0.0, scale=1.0,
         max_eval=2_000_000):
    """One-dimensional shortcut around :func:`integrate`."""
    spec = IntegralSpec((Axis(a, b, tuple(breakpoints), scale),), rtol, atol, max_eval)
    return integrate(spec, f)


# --------------------------------------------------------------------------
# sweeps

@dataclass
class SweepItem:
    index: int
    value: object = None
    error: str | None = None
    seconds: float = 0.0

    @property
    def ok(self):
        return self.error is None


def _run_one(args):
    evaluator, index, item = args
    t0 = time.perf_counter()
    try:
        value = evaluator(item)
        err = None
    except Exception as exc:  # failures are recorded per item
        value, err = None, f"{type(exc).__name__}: {exc}"
    return SweepItem(index, value, err, time.perf_counter() - t0)


def sweep(items, evaluator, workers=1):
    """Evaluate ``evaluator(item)`` for each item, results in input order.

    ``evaluator`` must be picklable (a module-level function) when
    ``workers > 1``; work is distributed over processes.
    """
    jobs = [(evaluator, i, item) for i, item in enumerate(items)]
    if not jobs:
        return []
    if workers <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs, chunksize=1))
