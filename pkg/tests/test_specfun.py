"""Airy and Fresnel reference-function tests.

Frozen expected values come from a 40-digit Maclaurin-series oracle
(mpmath); the generating snippets are kept next to the constants.
"""

import math

import numpy as np
import pytest

from inflecta.quadrature import ContourEndpoint, IntegrandSpec, PolyPhase, integrate
from inflecta.specfun import airy, airy_ai, airy_ai_prime, fresnel_halfline

# mpmath, dps=40: series Ai(x) = Ai(0) f(x) + Ai'(0) g(x) with
# c_f[k+1] = c_f[k]/((3k+2)(3k+3)), c_g[k+1] = c_g[k]/((3k+3)(3k+4))
AIRY_TABLE = {
    0.0: 0.35502805388781723926,
    -1.0: 0.5355608832923521188,
    2.5: 0.015725923380470489995,
    5.0: 0.00010834442813607441735,
    -6.5: -0.23802030199711580359,
}
AIRY_ZERO_1 = -2.3381074104597670385  # bisection on the series oracle
FULL_LINE = math.sqrt(2 * math.pi) * np.exp(-1j * math.pi / 4)


class TestAiry:
    @pytest.mark.parametrize("x,want", sorted(AIRY_TABLE.items()))
    def test_table(self, x, want):
        assert abs(airy_ai(x) - want) <= 1e-10 * abs(want)

    def test_spec_value_at_five_matches_4_digits(self):
        assert abs(airy_ai(5.0) - 1.0834e-4) < 1e-8

    @pytest.mark.parametrize("x", [-20.0, -8.0, -3.0, -0.5, 0.7, 4.0, 6.0, 9.0, 30.0])
    def test_defining_ode_residual(self, x):
        h = 1e-3
        r = (airy_ai(x + h) - 2 * airy_ai(x) + airy_ai(x - h)) / h**2 \
            - x * airy_ai(x)
        scale = max(abs(airy_ai(x)), abs(airy_ai_prime(x)), 1e-8)
        assert abs(r) < 1e-5 * scale + 1e-9

    def test_first_zero(self):
        lo, hi = -2.5, -2.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if airy_ai(mid) * airy_ai(lo) <= 0:
                hi = mid
            else:
                lo = mid
        assert abs(0.5 * (lo + hi) - AIRY_ZERO_1) < 1e-10

    def test_decay_for_large_argument(self):
        assert airy_ai(30.0) < 1e-40
        assert airy_ai(30.0) > 0

    def test_domain_limit(self):
        with pytest.raises(ValueError):
            airy_ai(51.0)
        with pytest.raises(ValueError):
            airy_ai(float("nan"))

    def test_value_pair(self):
        v = airy(1.0)
        assert abs(v.ai - 0.13529241631288141552) < 1e-10
        assert abs(v.ai_prime - (-0.15914744129679328473)) < 1e-9

    def test_agrees_with_contour_integral(self):
        # the engine evaluating (1/2pi) int e^{i(t^3/3 + x t)} dt must match
        for x in np.linspace(-10, 5, 7):
            spec = IntegrandSpec(
                PolyPhase((0, x, 0, 1 / 3), 1.0),
                (1,),
                ContourEndpoint.infinite_ray(5 * math.pi / 6),
                ContourEndpoint.infinite_ray(math.pi / 6),
            )
            r = integrate(spec, 1e-11)
            got = r.value.real / (2 * math.pi)
            assert abs(got - airy_ai(x)) <= 1e-8 * max(abs(airy_ai(x)), 1e-4)


class TestFresnelHalfline:
    def test_at_zero_is_half_the_full_line(self):
        v = fresnel_halfline(0.0)
        want = math.sqrt(math.pi / 2) * np.exp(-1j * math.pi / 4)
        assert abs(v - want) < 1e-10 * abs(want)

    def test_limits(self):
        # the residual tails decay like 1/|a|
        assert abs(fresnel_halfline(-12.0) - FULL_LINE) < 1.1 / 12.0
        assert abs(fresnel_halfline(12.0)) < 1.1 / 12.0
        assert abs(fresnel_halfline(-40.0) - FULL_LINE) < 1.1 / 40.0

    @pytest.mark.parametrize("a", [-3.0, -1.0, 0.0, 1.0, 3.0])
    def test_complementarity(self, a):
        got = fresnel_halfline(a) + fresnel_halfline(-a)
        assert abs(got - FULL_LINE) < 1e-12

    def test_agrees_with_direct_rotated_ray_quadrature(self):
        # independent check: rotate v = a + e^{-i pi/4} s so the integrand
        # becomes a real Gaussian times a smooth factor
        from scipy.integrate import quad

        for a in (-2.0, 0.5, 1.7):
            u = np.exp(-1j * math.pi / 4)

            def f(s, part):
                v = a + u * s
                z = np.exp(-0.5j * v * v) * u
                return z.real if part == 0 else z.imag

            brute = (
                quad(lambda s: f(s, 0), 0, 40, limit=200)[0]
                + 1j * quad(lambda s: f(s, 1), 0, 40, limit=200)[0]
            )
            assert abs(fresnel_halfline(a) - brute) < 1e-10
