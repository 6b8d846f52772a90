import math

import numpy as np
import pytest
from scipy.special import ndtr

from predframe.errors import InfeasibleSplitError
from predframe.estimation import estimate
from predframe.intervals import (
    Scheme,
    ci_naive_plugin,
    ci_sample_split,
    ci_two_process,
    make_split_plan,
    normal_quantile,
)
from predframe.models import AR1Params, GARCH11Params, Innovations, simulate
from predframe.prediction import evaluate_prediction

NORMAL = Innovations.std_normal()


class TestSplitPlan:
    def test_reference_plan(self):
        plan = make_split_plan(1000, 0.5, 0.8)
        assert (plan.T_E, plan.T_P) == (749, 969)
        assert plan.m_TE == math.sqrt(749)
        assert plan.l_T == math.log(1000)
        assert plan.gap_ratio == pytest.approx(31 / math.log(1000))

    def test_small_sample_infeasible(self):
        with pytest.raises(InfeasibleSplitError):
            make_split_plan(10, 0.5, 0.99)

    def test_nearly_equal_exponents_detected(self):
        # floor(1000^0.5001) = 31 makes T_E = T_P = 969: ordering breaks
        with pytest.raises(InfeasibleSplitError):
            make_split_plan(1000, 0.5, 0.5001)

    def test_exponent_ordering_required(self):
        with pytest.raises(ValueError):
            make_split_plan(1000, 0.8, 0.5)


class TestNormalQuantile:
    def test_symmetry_point(self):
        assert normal_quantile(0.5) == 0.0

    def test_reference_values(self):
        assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
        assert normal_quantile(0.95) == pytest.approx(1.644854, abs=1e-6)

    def test_round_trip(self):
        for p in (1e-6, 0.01, 0.3, 0.5, 0.77, 0.999):
            assert ndtr(normal_quantile(p)) == pytest.approx(p, abs=1e-12)

    def test_domain(self):
        for p in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                normal_quantile(p)


class TestTwoProcess:
    def test_composed_hand_example(self):
        # OLS on [1, .5, .25] gives beta=0.5, Upsilon=[0.75]; X_T=2 gives
        # center 1.0 and v = sqrt(4 * 0.75)
        ci = ci_two_process("ar1", [1.0, 0.5, 0.25], [0.0, 2.0], level=0.95)
        assert ci.center == pytest.approx(1.0, abs=0)
        assert ci.v_hat == pytest.approx(math.sqrt(3.0), rel=1e-12)
        assert ci.half_width == pytest.approx(
            normal_quantile(0.975) * math.sqrt(3.0) / math.sqrt(3.0)
        )
        assert ci.scheme is Scheme.TWO_PROCESS

    def test_zero_gradient_degenerate_interval(self):
        ci = ci_two_process("ar1", [1.0, 0.5, 0.25], [1.0, 0.0])
        assert ci.v_hat == 0.0 and ci.half_width == 0.0
        assert ci.center == 0.0

    def test_ar1_variance_reduction_identity(self):
        # v^2 through the quadratic form equals X_T^2 (1 - beta^2) exactly
        x = simulate(AR1Params(0.5), NORMAL, T=300, seed=1)
        y = simulate(AR1Params(0.5), NORMAL, T=300, seed=2)
        fit = estimate("ar1", x)
        ci = ci_two_process("ar1", x, y, fit=fit)
        expected = y.values[-1] ** 2 * (1.0 - fit.theta_hat.beta**2)
        assert ci.v_hat**2 == pytest.approx(expected, rel=1e-12)


class TestSampleSplit:
    def test_index_bookkeeping_equals_explicit_two_process(self):
        x = simulate(AR1Params(0.5), NORMAL, T=1000, seed=3)
        plan = make_split_plan(1000, 0.5, 0.8)
        spl = ci_sample_split("ar1", x, plan, level=0.9)
        explicit = ci_two_process(
            "ar1", x.values[: plan.T_E], x.values[plan.T_P - 1 :], level=0.9
        )
        assert spl.center == explicit.center
        assert spl.v_hat == explicit.v_hat
        assert spl.scale == explicit.scale == math.sqrt(749)
        assert spl.half_width == explicit.half_width
        assert spl.plan.T_P == 969

    def test_estimation_and_prediction_windows_disjoint(self):
        plan = make_split_plan(4000, 0.5, 0.8)
        assert plan.T_E < plan.T_P

    def test_length_mismatch_rejected(self):
        plan = make_split_plan(1000, 0.5, 0.8)
        x = simulate(AR1Params(0.5), NORMAL, T=900, seed=4)
        with pytest.raises(InfeasibleSplitError):
            ci_sample_split("ar1", x, plan)


class TestNaivePlugin:
    def test_hand_example(self):
        ci = ci_naive_plugin("ar1", [1.0, 0.5, 0.25])
        assert ci.center == pytest.approx(0.125, abs=0)

    def test_width_monotone_in_level(self):
        x = simulate(AR1Params(0.5), NORMAL, T=200, seed=5)
        widths = [ci_naive_plugin("ar1", x, level=lv).half_width
                  for lv in (0.5, 0.8, 0.9, 0.99)]
        assert widths == sorted(widths)
        assert widths[0] > 0.0

    def test_determinism(self):
        x = simulate(GARCH11Params(0.1, 0.1, 0.8), NORMAL, T=400, seed=6)
        a = ci_naive_plugin("garch11", x)
        b = ci_naive_plugin("garch11", x)
        assert (a.center, a.half_width, a.v_hat) == (b.center, b.half_width, b.v_hat)


class TestWidthAlgebra:
    def test_half_width_proportional_to_z_over_scale(self):
        x = simulate(AR1Params(0.5), NORMAL, T=500, seed=7)
        y = simulate(AR1Params(0.5), NORMAL, T=500, seed=8)
        fit = estimate("ar1", x)
        ci_90 = ci_two_process("ar1", x, y, level=0.9, fit=fit)
        ci_99 = ci_two_process("ar1", x, y, level=0.99, fit=fit)
        ratio = normal_quantile(0.995) / normal_quantile(0.95)
        assert ci_99.half_width / ci_90.half_width == pytest.approx(ratio, rel=1e-12)
        assert ci_99.covers(ci_90.lower) and ci_99.covers(ci_90.upper)

    def test_variance_floor_from_smallest_eigenvalue(self):
        # v^2 = g' U g >= lambda_min(U) * (d psi / d omega)^2
        x = simulate(GARCH11Params(0.1, 0.1, 0.8), NORMAL, T=1500, seed=9)
        y = simulate(GARCH11Params(0.1, 0.1, 0.8), NORMAL, T=1500, seed=10)
        fit = estimate("garch11", x)
        ci = ci_two_process("garch11", x, y, fit=fit)
        ev = evaluate_prediction(fit.theta_hat, y)
        floor = np.linalg.eigvalsh(fit.upsilon_hat).min() * ev.gradient[0] ** 2
        assert ci.v_hat**2 >= floor - 1e-12

    def test_level_domain(self):
        x = simulate(AR1Params(0.5), NORMAL, T=100, seed=11)
        with pytest.raises(ValueError):
            ci_naive_plugin("ar1", x, level=1.0)
