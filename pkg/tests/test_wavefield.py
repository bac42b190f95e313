"""Field evaluator tests: coordinate quantities, the three evaluation
routes, and grid machinery."""

import io
import math

import numpy as np
import pytest

from inflecta.pde import residual_pwe
from inflecta.wavefield import (
    FieldGrid,
    OracleError,
    cartesian_field,
    curvilinear_to_cartesian,
    eval_A,
    eval_A32,
    eval_A_direct_lambda,
    eval_I_minus,
    eval_I_plus,
    grid_eval,
    lambda_branch_sqrt,
    phase_phi,
    regime_quantities,
)

from conftest import GAMMA

A32_00 = -1.1578210097119568571 + 0.37619885076768590728j


class TestRegimeQuantities:
    def test_on_the_cubic_K_vanishes(self):
        q = regime_quantities(3.0, GAMMA * 27 / 3.0, GAMMA)
        assert abs(q.K) < 1e-15
        assert abs(q.Y - (q.N - GAMMA * 9.0)) < 1e-15

    def test_S_zero_flags_undefined(self):
        q = regime_quantities(0.0, 5.0, GAMMA)
        assert q.Phi == 0.0
        assert q.K is None and q.Khat is None and q.Kbar is None
        assert q.X == 0.0 and q.Y == 5.0

    def test_khat_arithmetic(self):
        S = 10.0
        N = GAMMA * 1000.0 / 3.0 + 1e-2
        q = regime_quantities(S, N, GAMMA)
        assert abs(q.Khat - 1e-3) < 1e-12
        assert abs(q.Kbar - S**0.5 * q.Khat) < 1e-15

    def test_negative_S_has_no_kbar(self):
        q = regime_quantities(-2.0, 1.0, GAMMA)
        assert q.K is not None and q.Kbar is None

    def test_invalid_gamma(self):
        with pytest.raises(ValueError):
            regime_quantities(1.0, 1.0, 0.0)


class TestA32:
    def test_pure_quintic_closed_form(self):
        r = eval_A32(0.0, 0.0, GAMMA, 1e-11)
        assert abs(r.value - A32_00) / abs(A32_00) < 1e-10

    def test_parabolic_equation_residual(self):
        f = lambda X, Y: eval_A32(X, Y, GAMMA, 1e-12).value
        a = f(1.0, 1.0)
        r = residual_pwe(f, 1.0, 1.0, 1e-3)
        assert abs(r) < 1e-4 * abs(a)

    def test_agrees_with_fixed_contour_quadrature(self):
        # brute-force rotated-ray oracle at (X, Y) = (2, -1)
        from scipy.integrate import quad

        X, Y = 2.0, -1.0
        c5 = 4.0 / (15.0 * math.sqrt(GAMMA))

        def ray_quad(theta):
            u = np.exp(1j * theta)

            def f(s, part):
                t = s * u
                z = t * np.exp(1j * (-Y * t * t - X * t**4 / 2 + c5 * t**5)) * u
                return z.real if part == 0 else z.imag

            re = quad(lambda s: f(s, 0), 0, 25, limit=2000)[0]
            im = quad(lambda s: f(s, 1), 0, 25, limit=2000)[0]
            return re + 1j * im

        brute = -ray_quad(9 * math.pi / 10) + ray_quad(math.pi / 2)
        r = eval_A32(X, Y, GAMMA, 1e-11)
        assert abs(r.value - brute) < 1e-8


class TestEvalA:
    def test_unimodular_prefactor(self):
        S, N = 5.0, 20.0
        a = eval_A(S, N, GAMMA, 1e-10)
        a32 = eval_A32(S, N - GAMMA * S**3 / 3.0, GAMMA, 1e-10)
        assert abs(abs(a.value) - 2 * abs(a32.value)) < 1e-12 * abs(a.value)

    def test_incoming_regime_magnitude(self):
        from inflecta.specfun import airy_ai

        got = abs(eval_A(-10.0, 0.0, GAMMA, 1e-9).value)
        want = 2 * math.pi * (40 * GAMMA) ** (1 / 3) * airy_ai(0.0)
        assert abs(got - want) / want < 0.05

    def test_split_representation_at_4_9(self):
        S, N = 4.0, 9.0
        a = eval_A(S, N, GAMMA, 1e-10).value
        b = eval_I_plus(S, N, GAMMA, 1e-10).value \
            + eval_I_minus(S, N, GAMMA, 1e-10).value
        assert abs(a - b) / abs(a) < 1e-8


class TestIpm:
    def test_requires_positive_S(self):
        with pytest.raises(ValueError):
            eval_I_plus(-1.0, 0.0, GAMMA)
        with pytest.raises(ValueError):
            eval_I_minus(0.0, 0.0, GAMMA)

    def test_far_dark_leading_behavior(self):
        # I- ~ e^{i Phi} i/(S^3 K) for S^2 K >> 1
        S, K = 10.0, 1.0
        N = S**3 * (K + GAMMA / 3.0)
        got = eval_I_minus(S, N, GAMMA, 1e-11).value
        want = np.exp(1j * phase_phi(S, N, GAMMA)) * (1j / (S**3 * K)) \
            * (1 + 1j / (S**5 * K * K))
        assert abs(got - want) / abs(want) < 1e-6

    def test_dark_side_magnitude_law(self):
        # |I- + I+| ~ sqrt(2 pi/S) e^{-4 Khat^{5/2}/(15 sqrt(gamma))}
        S, khat = 10.0, 1.0
        N = S**3 * (khat / S**2 + GAMMA / 3.0)
        tot = eval_I_plus(S, N, GAMMA, 1e-10).value \
            + eval_I_minus(S, N, GAMMA, 1e-10).value
        want = math.sqrt(2 * math.pi / S) * math.exp(-0.4)
        assert abs(abs(tot) - want) / want < 0.05

    def test_fresnel_layer_value(self):
        S = 10.0
        N = GAMMA * S**3 / 3.0  # K = 0
        tot = eval_I_plus(S, N, GAMMA, 1e-10).value \
            + eval_I_minus(S, N, GAMMA, 1e-10).value
        assert abs(abs(tot) - math.sqrt(2 * math.pi / 10)) < 0.1 * math.sqrt(
            2 * math.pi / 10
        )

    def test_smooth_across_K_zero(self):
        # no branch artifact: scan Khat through 0 at S = 6
        S = 6.0
        vals = []
        for khat in np.linspace(-0.2, 0.2, 21):
            N = S**3 * (khat / S**2 + GAMMA / 3.0)
            vals.append(
                eval_I_plus(S, N, GAMMA, 1e-9).value
                + eval_I_minus(S, N, GAMMA, 1e-9).value
            )
        mags = np.abs(vals)
        jumps = np.abs(np.diff(mags))
        assert np.max(jumps) < 0.02 * np.max(mags)
        # and the sum equals the deformed-contour route
        N = S**3 * (0.1 / S**2 + GAMMA / 3.0)
        a = eval_A(S, N, GAMMA, 1e-10).value
        b = eval_I_plus(S, N, GAMMA, 1e-10).value \
            + eval_I_minus(S, N, GAMMA, 1e-10).value
        assert abs(a - b) / abs(a) < 1e-8


class TestLambdaOracle:
    def test_branch_convention(self):
        assert lambda_branch_sqrt(4.0) == 2.0
        assert lambda_branch_sqrt(-4.0) == -2j
        # continuous approach from above the negative axis
        near = lambda_branch_sqrt(-4.0 + 1e-9j)
        assert abs(near - (-2j)) < 1e-9

    @pytest.mark.parametrize("S,N", [(1.0, 1.0), (-3.0, 0.0)])
    def test_matches_deformed_route(self, S, N):
        a = eval_A(S, N, GAMMA, 1e-10)
        o = eval_A_direct_lambda(S, N, GAMMA, tol=1e-7)
        assert abs(a.value - o.value) <= 1e-6 * abs(a.value)

    def test_offset_convergence_study(self):
        # lifting the left contour slightly above the axis changes nothing
        S, N = 2.0, -1.0
        base = eval_A_direct_lambda(S, N, GAMMA, tol=1e-7).value
        d1 = abs(eval_A_direct_lambda(S, N, GAMMA, tol=1e-7,
                                      im_offset=1e-5).value - base)
        d2 = abs(eval_A_direct_lambda(S, N, GAMMA, tol=1e-7,
                                      im_offset=1e-6).value - base)
        assert d1 < 1e-3
        assert d2 < max(d1, 1e-9)

    def test_domain_refusal(self):
        with pytest.raises(OracleError):
            eval_A_direct_lambda(11.0, 0.0, GAMMA)


class TestCartesianField:
    def test_phase_factor(self):
        x, y, k = 0.3, 0.1, 40.0
        v = cartesian_field(x, y, k, GAMMA, 1e-10).value
        a32 = eval_A32(k**0.2 * x, k**0.6 * y, GAMMA, 1e-10).value
        ratio = v / (-2 * a32)
        assert abs(ratio - np.exp(1j * k * x)) < 1e-12

    def test_k_scaling_of_sampled_point(self):
        x, y = 0.2, 0.05
        v1 = cartesian_field(x, y, 40.0, GAMMA, 1e-10).value
        a32 = eval_A32(80.0**0.2 * x, 80.0**0.6 * y, GAMMA, 1e-10).value
        v2 = cartesian_field(x, y, 80.0, GAMMA, 1e-10).value
        assert abs(abs(v2) - 2 * abs(a32)) < 1e-10 * max(1.0, abs(v2))
        assert v1 != v2

    def test_requires_positive_k(self):
        with pytest.raises(ValueError):
            cartesian_field(0.1, 0.1, 0.0, GAMMA)


class TestCoordinateMap:
    def test_axis_points_fixed(self):
        assert curvilinear_to_cartesian(0.0, 3.7, GAMMA) == (0.0, 3.7)

    def test_on_displaced_curve_y_vanishes(self):
        s = 2.2
        n = GAMMA * s**3 / 3.0
        x, y = curvilinear_to_cartesian(s, n, GAMMA)
        assert abs(y) < 1e-15

    def test_direct_arithmetic(self):
        x, y = curvilinear_to_cartesian(1.0, 1.0, GAMMA)
        assert abs(x - (1 + 4 / 9 - (16 / 81) / 10)) < 1e-15
        assert abs(y - (1 - 4 / 27)) < 1e-15


class TestGrid:
    def test_smoke_matches_pointwise(self):
        grid = grid_eval("sn", (1.0, 2.0, 2), (0.0, 1.0, 2), GAMMA, tol=1e-9)
        for i, S in enumerate((1.0, 2.0)):
            for j, N in enumerate((0.0, 1.0)):
                want = eval_A(S, N, GAMMA, 1e-9).value
                assert grid.values[i, j] == want

    def test_worker_count_determinism(self):
        g1 = grid_eval("xy", (-1.0, 1.0, 3), (-1.0, 1.0, 3), GAMMA, tol=1e-8,
                       jobs=1)
        g2 = grid_eval("xy", (-1.0, 1.0, 3), (-1.0, 1.0, 3), GAMMA, tol=1e-8,
                       jobs=2)
        assert np.array_equal(g1.values, g2.values)

    def test_csv_round_trip(self):
        grid = grid_eval("sn", (0.5, 1.5, 2), (0.0, 2.0, 3), GAMMA, tol=1e-8)
        buf = io.StringIO()
        grid.write_csv(buf)
        text = buf.getvalue()
        lines = text.strip().splitlines()
        assert lines[0] == "frame,gamma,k"
        assert lines[2] == "coord1,coord2,re,im,abs"
        assert len(lines) == 3 + 2 * 3
        # coord2-fastest ordering
        c2 = [float(ln.split(",")[1]) for ln in lines[3:6]]
        assert c2 == [0.0, 1.0, 2.0]

    def test_frame_validation(self):
        with pytest.raises(ValueError):
            grid_eval("bad", (0, 1, 2), (0, 1, 2), GAMMA)
        with pytest.raises(ValueError):
            grid_eval("cartesian", (0, 1, 2), (0, 1, 2), GAMMA)  # k missing
        with pytest.raises(ValueError):
            grid_eval("sn", (0, 1, 2), (0, 1, 2), GAMMA, mode="A32")
