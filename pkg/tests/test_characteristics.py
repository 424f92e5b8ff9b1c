"""Characteristic-line tests: backward extremal lines against oracle
minimizers, forward paths against tracked fronts, the triangle identity,
gluing, and the shock offset predictor."""

import numpy as np
import pytest

from wavelab import characteristics as cx
from wavelab import fronttrack as ft
from wavelab import hopf
from wavelab.fluxes import burgers, exp_flux
from wavelab.profiles import PeriodicProfile, RiemannPerturbedIC


ZERO = PeriodicProfile.from_spec(1.0, [(1.0, 0.0)])
SQUARE = PeriodicProfile.from_spec(1.0, [(0.5, 0.3), (0.5, -0.3)])
ASYM = PeriodicProfile.from_spec(1.0, [(0.25, 0.3), (0.75, -0.1)])


class TestBackwardExtremal:
    def test_constant_solution(self):
        sol = cx.handle_periodic(ZERO, 0.7)
        line = cx.backward_extremal(sol, 0.3, 2.0, "minimal")
        assert line.slope == pytest.approx(0.7, abs=1e-12)
        assert line.foot == pytest.approx(0.3 - 0.7 * 2.0, abs=1e-10)
        other = cx.backward_extremal(sol, 0.3, 2.0, "maximal")
        assert abs(other.foot - line.foot) < 1e-10

    def test_rarefaction_fan_line(self):
        # inside the fan the backward line passes through the origin
        sol = cx.handle_from_ic(RiemannPerturbedIC(-1.0, 1.0, ZERO))
        line = cx.backward_extremal(sol, 0.5, 1.0, "minimal")
        assert line.slope == pytest.approx(0.5, abs=1e-8)
        assert abs(line.foot) < 1e-7

    def test_shock_feet_match_oracle_minimizers(self):
        ic = RiemannPerturbedIC(1.0, -1.0, SQUARE)
        t = 1.7
        x_star = hopf.shock_position(ic, t)
        sol = cx.handle_from_ic(ic)
        lo = cx.backward_extremal(sol, x_star, t, "minimal")
        hi = cx.backward_extremal(sol, x_star, t, "maximal")
        assert lo.foot <= 0.0 <= hi.foot
        hp = hopf.HopfPotential.from_ic(ic, "joined")
        (jump,) = hopf.scan_jumps(hp, t, x_star - 1e-3, x_star + 1e-3)
        assert lo.foot == pytest.approx(jump.y_before, abs=1e-7)
        assert hi.foot == pytest.approx(jump.y_after, abs=1e-7)

    def test_value_constant_along_line(self):
        ic = RiemannPerturbedIC(1.0, -1.0, SQUARE)
        sol = cx.handle_from_ic(ic)
        x_star = hopf.shock_position(ic, 1.7)
        for kind in ("minimal", "maximal"):
            line = cx.backward_extremal(sol, x_star, 1.7, kind)
            assert cx.char_deviation(line, sol) <= 1e-8

    def test_feet_stay_between_divides(self):
        # pure periodic data: fan centers at the integers emit divides that
        # travel at the mean speed, and no backward line crosses one
        sol = cx.handle_periodic(SQUARE, 0.3)
        rng = np.random.default_rng(31)
        for _ in range(8):
            t = float(rng.uniform(0.4, 6.0))
            k = int(rng.integers(-2, 3))
            x = k + 0.3 * t + float(rng.uniform(0.05, 0.95))
            for kind in ("minimal", "maximal"):
                foot = cx.backward_extremal(sol, x, t, kind).foot
                assert k - 1e-9 <= foot <= k + 1 + 1e-9

    def test_minimal_foot_below_maximal(self):
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        sol = cx.handle_from_ic(ic)
        rng = np.random.default_rng(5)
        for _ in range(6):
            x = float(rng.uniform(-3.0, 3.0))
            t = float(rng.uniform(0.2, 5.0))
            a = cx.backward_extremal(sol, x, t, "minimal")
            b = cx.backward_extremal(sol, x, t, "maximal")
            assert a.foot <= b.foot + 1e-10

    def test_rejects_nonpositive_time(self):
        sol = cx.handle_periodic(ZERO, 0.0)
        with pytest.raises(cx.CharacteristicError):
            cx.backward_extremal(sol, 0.0, 0.0, "minimal")

    def test_rejects_unknown_kind(self):
        sol = cx.handle_periodic(ZERO, 0.0)
        with pytest.raises(cx.CharacteristicError):
            cx.backward_extremal(sol, 0.0, 1.0, "sideways")


class TestForwardCharacteristic:
    def test_constant_solution_straight_line(self):
        sol = cx.handle_periodic(ZERO, 0.4)
        times, xs = cx.forward_characteristic(sol, 1.0, 2.0)
        assert np.allclose(xs, 1.0 + 0.4 * times, atol=1e-9)

    def test_unperturbed_shock_from_origin(self):
        sol = cx.handle_from_ic(RiemannPerturbedIC(1.0, -1.0, ZERO))
        path = cx.forward_characteristic(sol, 0.0, 2.0)
        assert abs(cx.interp_path(path, 2.0)) < 1e-8

    def test_agrees_with_tracked_shock(self):
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        sol = cx.handle_from_ic(ic)
        path = cx.forward_characteristic(sol, 0.0, 3.0, dt=0.01)
        delta = 0.01
        poly = ft.polygon_for(ic, burgers(), delta)
        tracked = ft.shock_path(ic, poly, [0.5, 1.0, 2.0, 3.0])
        for t, xf in zip(tracked.times, tracked.positions):
            assert abs(cx.interp_path(path, t) - xf) <= 5 * delta

    def test_rejects_bad_horizon(self):
        sol = cx.handle_periodic(ZERO, 0.0)
        with pytest.raises(cx.CharacteristicError):
            cx.forward_characteristic(sol, 0.0, -1.0)


class TestDivides:
    def test_burgers_divide_is_exact(self):
        ic = RiemannPerturbedIC(0.3, 0.3, SQUARE)
        poly = ft.polygon_for(ic, burgers(), 0.01)
        ts = [0.0, 1.0, 5.0, 20.0, 50.0]
        path = ft.track_path(ic, poly, 0.0, ts, attach_value=0.3)
        for t, x in zip(path.times, path.positions):
            assert abs(x - 0.3 * t) <= 1e-12

    def test_exp_flux_divide_within_tolerance(self):
        delta = 1e-3
        ic = RiemannPerturbedIC(0.3, 0.3, SQUARE)
        poly = ft.polygon_for(ic, exp_flux(), delta)
        ts = [0.0, 1.0, 5.0, 20.0, 50.0]
        path = ft.track_path(ic, poly, 0.0, ts, attach_value=0.3)
        speed = float(exp_flux().deriv(0.3))
        for t, x in zip(path.times, path.positions):
            assert abs(x - speed * t) <= 5 * delta


class TestTriangleIdentity:
    def test_equal_constants_all_zero(self):
        h = cx.handle_periodic(ZERO, 0.6)
        rep = cx.triangle_residual(h, h, 0.2, 1.5)
        assert abs(rep.lhs_left_term) < 1e-12
        assert abs(rep.lhs_right_term) < 1e-12
        assert abs(rep.rhs) < 1e-12
        assert abs(rep.residual) < 1e-12

    def test_identical_periodic_solutions(self):
        h = cx.handle_periodic(ASYM, 1.0)
        rep = cx.triangle_residual(h, h, 0.4, 1.3)
        assert abs(rep.residual) < 1e-12

    def test_constant_pair_closed_form(self):
        # straight characteristics: each time term carries half the product
        # of the slope gap squared with the elapsed time
        c_small, c_big, t = 0.3, 0.8, 1.4
        h_small = cx.handle_periodic(ZERO, c_small)
        h_big = cx.handle_periodic(ZERO, c_big)
        rep = cx.triangle_residual(h_small, h_big, 0.3, t)
        gap = c_big - c_small
        assert rep.lhs_left_term == pytest.approx(-0.5 * gap * gap * t, abs=1e-9)
        assert rep.lhs_right_term == pytest.approx(-0.5 * gap * gap * t, abs=1e-9)
        assert rep.rhs == pytest.approx(-gap * gap * t, abs=1e-9)
        assert abs(rep.residual) <= 1e-6
        assert rep.foot == pytest.approx(0.3 - c_small * t, abs=1e-10)
        assert rep.foot_tilde == pytest.approx(0.3 - c_big * t, abs=1e-10)

    def test_periodic_pair_residual(self):
        h_r = cx.handle_periodic(SQUARE, -1.0)
        h_l = cx.handle_periodic(SQUARE, 1.0)
        rep = cx.triangle_residual(h_r, h_l, 0.35, 1.6)
        assert abs(rep.residual) <= 1e-6
        assert rep.residual == pytest.approx(
            rep.lhs_left_term + rep.lhs_right_term - rep.rhs, abs=1e-15
        )

    def test_joined_with_left_branch(self):
        # left of the shock the joined solution coincides with the left
        # periodic branch, so the feet collapse and every term is tiny
        ic = RiemannPerturbedIC(1.0, -1.0, SQUARE)
        sol = cx.handle_from_ic(ic)
        h_l = cx.handle_periodic(SQUARE, 1.0)
        t = 1.7
        x = hopf.shock_position(ic, t) - 0.8
        rep = cx.triangle_residual(sol, h_l, x, t)
        assert abs(rep.residual) <= 1e-6

    def test_randomized_anchor_suite(self):
        h_r = cx.handle_periodic(ASYM, -1.0)
        h_l = cx.handle_periodic(ASYM, 1.0)
        rng = np.random.default_rng(113)
        for _ in range(4):
            x = float(rng.uniform(-2.0, 2.0))
            t = float(rng.uniform(0.5, 4.0))
            rep = cx.triangle_residual(h_r, h_l, x, t)
            assert abs(rep.residual) <= 1e-6

    def test_rejects_reversed_feet(self):
        h_small = cx.handle_periodic(ZERO, 0.3)
        h_big = cx.handle_periodic(ZERO, 0.8)
        with pytest.raises(cx.CharacteristicError):
            cx.triangle_residual(h_big, h_small, 0.0, 1.0)


class TestGlueCheck:
    def test_unperturbed_exact(self):
        ic = RiemannPerturbedIC(1.0, -1.0, ZERO)
        sol = cx.handle_from_ic(ic)
        left = cx.handle_periodic(ZERO, 1.0)
        right = cx.handle_periodic(ZERO, -1.0)
        assert cx.glue_check(sol, left, right, 0.0, 1.3) == 0.0

    def test_square_wave_after_merge(self):
        ic = RiemannPerturbedIC(1.0, -1.0, SQUARE)
        t = 1.7
        sol = cx.handle_from_ic(ic)
        left = cx.handle_periodic(SQUARE, 1.0)
        right = cx.handle_periodic(SQUARE, -1.0)
        mismatch = cx.glue_check(sol, left, right, hopf.shock_position(ic, t), t)
        assert mismatch <= 1e-10

    def test_fan_interior_identity(self):
        # nonnegative-primitive perturbation: inside the fan the solution
        # equals the self-similar profile x/t
        prof = PeriodicProfile.from_spec(1.0, [(0.5, 0.2), (0.5, -0.2)])
        ic = RiemannPerturbedIC(-1.0, 1.0, prof)
        ev = hopf.oracle_evaluator(ic)
        for x in np.linspace(-0.6, 0.6, 25):
            assert abs(ev(float(x), 1.0, "right") - x) <= 1e-8


class TestShockOffset:
    def test_zero_perturbation(self):
        ic = RiemannPerturbedIC(1.0, -1.0, ZERO)
        assert cx.shock_offset(ic, 0.0, 1.5, 4) == pytest.approx(0.0, abs=1e-13)

    def test_resonant_time_vanishes(self):
        # elapsed time spanning an integer number of periods per unit jump:
        # the zero-mean profile integrates to nothing
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        x_star = hopf.shock_position(ic, 2.0)
        assert cx.shock_offset(ic, x_star, 2.0, 5) == pytest.approx(0.0, abs=1e-12)

    def test_matches_oracle_position(self):
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        t = 1.7
        x_star = hopf.shock_position(ic, t)
        off = cx.shock_offset(ic, x_star, t, 4)
        # unperturbed speed is zero here, so the offset is the position itself
        assert off == pytest.approx(x_star, abs=1e-8)
        assert x_star == pytest.approx(-2.1840788e-3, abs=1e-9)

    def test_independent_of_period_count(self):
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        a = cx.shock_offset(ic, -2.184e-3, 1.7, 4)
        b = cx.shock_offset(ic, -2.184e-3, 1.7, 7)
        assert a == pytest.approx(b, abs=1e-12)

    def test_rejects_small_period_count(self):
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        with pytest.raises(cx.CharacteristicError):
            cx.shock_offset(ic, 0.0, 1.7, 1)

    def test_rejects_bad_time_and_states(self):
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        with pytest.raises(cx.CharacteristicError):
            cx.shock_offset(ic, 0.0, -1.0, 4)
        fan_ic = RiemannPerturbedIC(-1.0, 1.0, ASYM)
        with pytest.raises(cx.CharacteristicError):
            cx.shock_offset(fan_ic, 0.0, 1.7, 4)

    def test_agrees_with_tracked_path(self):
        # prediction against the tracked front position, not the oracle
        delta = 0.01
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        poly = ft.polygon_for(ic, burgers(), delta)
        t = 1.7
        tracked = ft.shock_path(ic, poly, [t])
        off = cx.shock_offset(ic, tracked.positions[0], t, 4)
        assert abs(off - tracked.positions[0]) <= max(1e-8, 5 * delta)
