import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emviscosity.quadrature import (Axis, IntegralSpec, IntegrandError, integrate, quad,
                                    sweep)


def test_polynomial():
    assert quad(lambda x: x**2, 0.0, 1.0).value == pytest.approx(1 / 3, rel=1e-14)


def test_semi_infinite_gamma():
    r = quad(lambda x: np.exp(-x) * x**3, 0.0, np.inf)
    assert r.value == pytest.approx(6.0, rel=1e-10)
    assert r.converged


def test_doubly_infinite_gaussian():
    r = quad(lambda x: np.exp(-x * x), -np.inf, np.inf, breakpoints=(0.0,))
    assert r.value == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_planck_moment_against_series_oracle():
    # int_0^inf x^8 / sinh^2(x/2) dx; oracle by mpmath at 30 digits
    def f(x):
        with np.errstate(over="ignore"):
            return np.where(x < 700, x**8 / np.sinh(np.minimum(x, 700) / 2) ** 2, 0.0)
    r = quad(f, 0.0, np.inf, rtol=1e-12, scale=8.0)
    mpmath.mp.dps = 30
    oracle = float(mpmath.quad(lambda x: x**8 / mpmath.sinh(x / 2) ** 2, [0, 10, 40, mpmath.inf]))
    assert r.value == pytest.approx(oracle, rel=1e-10)
    # closed form 4 Gamma(9) zeta(8)
    assert r.value == pytest.approx(4 * math.gamma(9) * float(mpmath.zeta(8)), rel=1e-10)


def test_endpoint_singularity():
    r = quad(lambda x: 1 / np.sqrt(x), 0.0, 1.0, rtol=1e-8)
    assert r.value == pytest.approx(2.0, rel=1e-7)


def test_log_singularity():
    r = quad(lambda x: np.log(x), 0.0, 1.0, rtol=1e-10)
    assert r.value == pytest.approx(-1.0, rel=1e-9)
    assert r.converged


def test_kink_at_declared_breakpoint():
    r = quad(lambda x: np.abs(x - 0.3), 0.0, 1.0, breakpoints=(0.3,))
    assert r.value == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-14)
    assert r.evaluations <= 60


def test_vector_valued():
    r = quad(lambda x: np.stack([np.ones_like(x), x], axis=-1), 0.0, 2.0)
    assert np.allclose(r.value, [2.0, 2.0], rtol=1e-14)


def test_two_dimensional():
    spec = IntegralSpec((Axis(0, 1), Axis(0, 1)), rtol=1e-10)
    r = integrate(spec, lambda x, y: np.exp(x * y))
    oracle = float(mpmath.quad(lambda x, y: mpmath.exp(x * y), [0, 1], [0, 1]))
    assert r.value == pytest.approx(oracle, rel=1e-9)


def test_three_dimensional():
    spec = IntegralSpec((Axis(0, 1), Axis(0, 2), Axis(0, 3)), rtol=1e-10)
    r = integrate(spec, lambda x, y, z: x * y * z * np.ones_like(z))
    assert r.value == pytest.approx(0.5 * 2.0 * 4.5, rel=1e-12)


def test_outer_dependent_breakpoints():
    # inner kink at y = x
    spec = IntegralSpec((Axis(0, 1), Axis(0, 1, lambda x: (x,))), rtol=1e-10)
    r = integrate(spec, lambda x, y: np.abs(y - x))
    assert r.value == pytest.approx(1 / 3, rel=1e-10)


def test_nan_reports_point():
    with pytest.raises(IntegrandError) as info:
        quad(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)
    assert info.value.point > 0.5


def test_budget_exhaustion_flags_partial():
    r = quad(lambda x: np.sin(1 / x), 1e-6, 1.0, max_eval=300)
    assert not r.converged
    assert np.isfinite(r.value)


def test_result_unpacks_to_triple():
    value, err, n = quad(lambda x: x, 0.0, 1.0)
    assert value == pytest.approx(0.5)
    assert err >= 0 and n > 0


@pytest.mark.parametrize("kw", [dict(rtol=0.0), dict(max_eval=0)])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        IntegralSpec((Axis(0, 1),), **kw)


def test_spec_dimension_limit():
    with pytest.raises(ValueError):
        IntegralSpec(tuple(Axis(0, 1) for _ in range(4)))


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=12), st.floats(-3, 0), st.floats(0.1, 3))
def test_polynomials_integrate_exactly(coeffs, a, width):
    b = a + width
    P = np.polynomial.Polynomial(coeffs)
    exact = P.integ()(b) - P.integ()(a)
    r = quad(P, a, b, rtol=1e-12, atol=1e-12)
    assert r.value == pytest.approx(exact, rel=1e-10, abs=1e-10)


@given(st.floats(0.2, 5.0))
def test_semi_infinite_scale_invariance(k):
    # int_0^inf e^{-k x} = 1/k, independent of the decay hint
    for scale in (0.5, 1.0, 4.0):
        r = quad(lambda x: np.exp(-k * x), 0.0, np.inf, scale=scale)
        assert r.value == pytest.approx(1 / k, rel=1e-9)


def test_tighter_tolerance_reduces_error():
    exact = 2.0 * math.sin(3.0) / 3.0

    def f(x):
        return np.cos(3 * x)

    errs = []
    for tol in (1e-3, 1e-6, 1e-9):
        r = quad(f, -1.0, 1.0, rtol=tol)
        errs.append(abs(r.value - exact))
        assert abs(r.value - exact) <= max(tol * abs(exact), 1e-15)
    assert errs[2] <= errs[0]


def test_tighter_tolerance_peaked_integrand():
    # Lorentzian needing adaptive refinement
    w = 1e-3
    exact = 2 * math.atan(1 / w) / w
    e = [abs(quad(lambda x: 1 / (x * x + w * w), -1, 1, rtol=t).value - exact) / exact
         for t in (1e-4, 1e-8)]
    assert e[1] <= 0.5 * e[0] or e[1] < 1e-14


def _square(x):
    return x * x


def _fails_on_three(x):
    if x == 3:
        raise ValueError("three")
    return x


def test_sweep_empty():
    assert sweep([], _square, workers=4) == []


def test_sweep_order_and_timing():
    out = sweep(list(range(6)), _square, workers=1)
    assert [o.value for o in out] == [0, 1, 4, 9, 16, 25]
    assert all(o.seconds >= 0 for o in out)


def test_sweep_captures_failures():
    out = sweep(list(range(5)), _fails_on_three, workers=2)
    assert [o.ok for o in out] == [True, True, True, False, True]
    assert "three" in out[3].error
    assert out[4].value == 4


def test_sweep_parallel_matches_serial():
    items = [0.5, 1.0, 2.0, 3.0]
    serial = sweep(items, _square, 1)
    par = sweep(items, _square, 3)
    assert [a.value for a in serial] == [b.value for b in par]
