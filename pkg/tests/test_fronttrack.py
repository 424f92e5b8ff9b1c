"""Front-tracking tests: frozen Riemann examples plus conservation audits.

The engine is exact for the polygonal flux, so the audits check hard
invariants (mean drift at rounding level, nonincreasing variation, states
staying on the node grid) rather than discretization tolerances; the
tracked shock is compared against the variational evaluator, where the
tolerance is the data-snapping error 5*delta.
"""
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavelab import fronttrack as ft
from wavelab import hopf
from wavelab.fluxes import burgers, exp_flux
from wavelab.profiles import PeriodicProfile, RiemannPerturbedIC


def zero_profile(p=1.0):
    return PeriodicProfile.from_spec(p, [(p, 0.0)])


def square(p=1.0, amp=0.3):
    return PeriodicProfile.from_spec(p, [(0.5 * p, amp), (0.5 * p, -amp)])


ASYM = PeriodicProfile.from_spec(1.0, [(0.25, 0.3), (0.75, -0.1)])

# up-jump 1.0 > ul-ur at the origin: the data opens with a fan, so the
# tracked path starts inside a rarefaction rather than on a front
FAN_IC = RiemannPerturbedIC(0.2, -0.2, square(amp=0.5))


def burgers_poly(delta=0.5, lo=-1.0, hi=1.0):
    return ft.approximate_flux(burgers(), delta, (lo, hi))


class TestFluxPolygon:
    def test_frozen_burgers_nodes(self):
        poly = burgers_poly()
        assert np.array_equal(poly.us, [-1.0, -0.5, 0.0, 0.5, 1.0])
        assert np.array_equal(poly.fs, [0.5, 0.125, 0.0, 0.125, 0.5])

    def test_wide_delta_degenerates_to_chord(self):
        poly = ft.approximate_flux(burgers(), 5.0, (-1.0, 1.0))
        assert poly.n == 2
        assert np.array_equal(poly.us, [-1.0, 1.0])

    def test_exp_interpolation_error_bound(self):
        # chord interpolation of a convex f is below f by at most d^2/8 * f''
        poly = ft.approximate_flux(exp_flux(), 1e-3, (-0.5, 0.5))
        us = np.linspace(-0.5, 0.5, 20011)
        err = np.max(np.abs(np.interp(us, poly.us, poly.fs) - exp_flux().eval(us)))
        assert err <= 1.25e-7 * math.exp(0.5) + 1e-14

    def test_chord_slopes_increase(self):
        poly = ft.approximate_flux(exp_flux(), 0.037, (-1.0, 2.0))
        slopes = [poly.succ_chord(i) for i in range(poly.n - 1)]
        assert np.all(np.diff(slopes) > 0)

    def test_chord_matches_direct_quotient(self):
        poly = burgers_poly()
        assert poly.chord(4, 0) == pytest.approx((0.5 - 0.5) / 2.0, abs=0)
        assert poly.chord(3, 1) == pytest.approx(0.0, abs=0)
        assert poly.succ_chord(2) == pytest.approx(0.25, abs=0)

    def test_index_of_roundtrip_and_reject(self):
        poly = burgers_poly()
        for i, u in enumerate(poly.us):
            assert poly.index_of(float(u)) == i
        with pytest.raises(ft.FrontTrackError):
            poly.index_of(0.25)

    def test_snap_out_of_range(self):
        poly = burgers_poly()
        with pytest.raises(ft.FrontTrackError):
            poly.snap(7.0)

    def test_delta_must_be_positive(self):
        with pytest.raises(ft.FrontTrackError):
            ft.approximate_flux(burgers(), 0.0, (-1.0, 1.0))

    def test_empty_range_rejected(self):
        with pytest.raises(ft.FrontTrackError):
            ft.approximate_flux(burgers(), 0.1, (1.0, 1.0))


class TestRiemannFan:
    def test_frozen_symmetric_shock(self):
        fronts = ft.riemann_fan(burgers_poly(), 1.0, -1.0)
        assert len(fronts) == 1
        f = fronts[0]
        assert (f.left_value, f.right_value, f.speed) == (1.0, -1.0, 0.0)

    def test_frozen_fan_speeds(self):
        fronts = ft.riemann_fan(burgers_poly(), -1.0, 1.0)
        assert [f.speed for f in fronts] == [-0.75, -0.25, 0.25, 0.75]
        # each fan front spans one grid step
        for f in fronts:
            assert f.right_value - f.left_value == pytest.approx(0.5, abs=0)

    def test_exp_fan_speeds_are_chords(self):
        poly = ft.approximate_flux(exp_flux(), 0.25, (0.0, 1.0))
        fronts = ft.riemann_fan(poly, 0.0, 1.0)
        assert len(fronts) == 4
        speeds = [f.speed for f in fronts]
        assert np.all(np.diff(speeds) > 0)
        for k, f in enumerate(fronts):
            want = (exp_flux().eval(0.25 * (k + 1)) - exp_flux().eval(0.25 * k)) / 0.25
            assert f.speed == pytest.approx(want, rel=1e-15)

    def test_equal_states_no_fronts(self):
        assert ft.riemann_fan(burgers_poly(), 0.5, 0.5) == []

    def test_non_node_value_rejected(self):
        with pytest.raises(ft.FrontTrackError):
            ft.riemann_fan(burgers_poly(), 0.3, -1.0)

    @given(st.integers(0, 20), st.integers(0, 20))
    @settings(max_examples=60, deadline=None)
    def test_fan_speeds_increase_for_random_pairs(self, i, j):
        poly = ft.approximate_flux(exp_flux(), 0.1, (-1.0, 1.0))
        ul, ur = float(poly.us[i]), float(poly.us[j])
        fronts = ft.riemann_fan(poly, ul, ur)
        if i > j:
            assert len(fronts) == 1
        elif i < j:
            assert len(fronts) == j - i
            assert np.all(np.diff([f.speed for f in fronts]) > 0)
        else:
            assert fronts == []


class TestEvolve:
    def test_stationary_shock_unchanged(self):
        poly = burgers_poly()
        s0 = ft.PiecewiseConstantState(0.0, np.array([0.0]), np.array([1.0, -1.0]))
        s1 = ft.evolve(s0, poly, 7.0)
        assert s1.time == 7.0
        assert np.array_equal(s1.breakpoints, [0.0])
        assert np.array_equal(s1.values, [1.0, -1.0])

    def test_two_shock_merge(self):
        # speeds +1 and -1, collision at (t, x) = (1, 0), merged speed 0
        poly = ft.approximate_flux(burgers(), 0.5, (-2.0, 2.0))
        s0 = ft.PiecewiseConstantState(0.0, np.array([-1.0, 1.0]), np.array([2.0, 0.0, -2.0]))
        mid = ft.evolve(s0, poly, 0.5)
        assert np.allclose(mid.breakpoints, [-0.5, 0.5])
        out = ft.evolve(s0, poly, 2.0)
        assert np.array_equal(out.values, [2.0, -2.0])
        assert out.breakpoints[0] == pytest.approx(0.0, abs=1e-14)

    def test_restart_matches_direct_run(self):
        poly = ft.polygon_for(RiemannPerturbedIC(1.0, -1.0, ASYM), burgers(), 0.05)
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        s0 = ft.initial_state(ic, poly, 2.0, span=3.0)
        direct = ft.evolve(s0, poly, 1.7)
        stepped = ft.evolve(ft.evolve(s0, poly, 0.9), poly, 1.7)
        assert np.allclose(stepped.breakpoints, direct.breakpoints, atol=1e-12)
        assert np.array_equal(stepped.values, direct.values)

    def test_t_end_before_state_rejected(self):
        poly = burgers_poly()
        s0 = ft.PiecewiseConstantState(1.0, np.array([0.0]), np.array([1.0, -1.0]))
        with pytest.raises(ft.FrontTrackError):
            ft.evolve(s0, poly, 0.5)

    def test_values_stay_on_grid_and_entropic(self):
        flux = exp_flux()
        ic = RiemannPerturbedIC(0.8, -0.6, square(amp=0.4), flux=flux)
        poly = ft.polygon_for(ic, flux, 0.05)
        state = ft.evolve(ft.initial_state(ic, poly, 1.3), poly, 1.3)
        idx = [poly.index_of(float(v)) for v in state.values]
        for a, b in zip(idx, idx[1:]):
            # down-jumps are merged shocks; up-jumps only ever one grid step
            assert a > b or b == a + 1

    def test_mean_and_tv_audit_periodic(self):
        flux = burgers()
        x0 = 0.1371829
        for prof, ubar in ((square(), 0.0), (ASYM, 0.4), (square(amp=0.5), -0.3)):
            poly = ft.approximate_flux(
                flux, 0.05, (ubar + prof.lower_bound - 0.25, ubar + prof.upper_bound + 0.25)
            )
            s0 = ft.periodic_state(prof, ubar, flux, poly, 2.3)
            m0 = ft.window_mean(s0, x0, x0 + prof.period)
            tv_prev = ft.window_tv(s0, x0, x0 + prof.period)
            for t in (0.7, 1.4, 2.3):
                s = ft.evolve(s0, poly, t)
                assert ft.window_mean(s, x0, x0 + prof.period) == pytest.approx(m0, abs=1e-12)
                tv = ft.window_tv(s, x0, x0 + prof.period)
                assert tv <= tv_prev + 1e-12
                tv_prev = tv


class TestSampleAndDump:
    def test_single_piece(self):
        s = ft.PiecewiseConstantState(0.0, np.array([]), np.array([0.7]))
        assert ft.sample(s, -5.0) == 0.7
        assert ft.sample(s, 12.0) == 0.7

    def test_breakpoint_is_right_continuous(self):
        s = ft.PiecewiseConstantState(0.0, np.array([0.0]), np.array([1.0, -1.0]))
        assert ft.sample(s, 0.0) == -1.0
        assert ft.sample(s, -1e-300) == 1.0

    def test_periodic_state_is_periodic(self):
        flux = burgers()
        poly = ft.approximate_flux(flux, 0.05, (-0.65, 0.65))
        s0 = ft.periodic_state(square(), 0.0, flux, poly, 1.0)
        s1 = ft.evolve(s0, poly, 0.8)
        for x in (0.01, 0.23, 0.77):
            for k in (-2, -1, 1, 2):
                assert ft.sample(s1, x + k) == ft.sample(s1, x)

    def test_dump_snapshot_format(self):
        s = ft.PiecewiseConstantState(0.5, np.array([0.0, 1.0]), np.array([1.0, -1.0, 0.5]), 1.0)
        buf = io.StringIO()
        ft.dump_snapshot(s, buf, delta=0.25)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "# t=0.5 delta=0.25 period=1.0"
        assert lines[1] == "-inf 1.0"
        assert len(lines) == 4
        xs = [float(row.split()[0]) for row in lines[2:]]
        assert xs == [0.0, 1.0]

    def test_state_validation(self):
        with pytest.raises(ft.FrontTrackError):
            ft.PiecewiseConstantState(0.0, np.array([0.0]), np.array([1.0]))
        with pytest.raises(ft.FrontTrackError):
            ft.PiecewiseConstantState(0.0, np.array([1.0, 0.0]), np.array([1.0, 2.0, 3.0]))

    def test_initial_state_matches_snapped_data(self):
        ic = RiemannPerturbedIC(1.0, -1.0, square())
        poly = ft.polygon_for(ic, burgers(), 0.01)
        s0 = ft.initial_state(ic, poly, 1.0, span=2.0)
        for x in np.linspace(-1.9, 1.9, 41):
            assert abs(ft.sample(s0, float(x)) - ic.eval(float(x))) <= 0.5 * 0.01 + 1e-12

    def test_initial_state_constant_data(self):
        ic = RiemannPerturbedIC(0.5, 0.5, zero_profile())
        poly = ft.polygon_for(ic, burgers(), 0.1)
        s0 = ft.initial_state(ic, poly, 1.0)
        assert len(s0.breakpoints) == 0
        assert ft.sample(s0, 3.0) == pytest.approx(0.5, abs=1e-12)


class TestShockPath:
    def test_unperturbed_exact(self):
        for ul, ur in ((1.0, -1.0), (1.0, 0.0)):
            ic = RiemannPerturbedIC(ul, ur, zero_profile())
            poly = ft.polygon_for(ic, burgers(), 0.1)
            ts = [0.5, 1.0, 2.0, 5.0]
            path = ft.shock_path(ic, poly, ts)
            s = 0.5 * (ul + ur)
            for t, x in zip(path.times, path.positions):
                assert x == pytest.approx(s * t, abs=1e-14)

    def test_square_wave_periodic_return(self):
        # |X(n/2)| <= 5 delta once the perturbation has merged into the shock
        delta = 0.01
        ic = RiemannPerturbedIC(1.0, -1.0, square())
        poly = ft.polygon_for(ic, burgers(), delta)
        ts = [1.5, 2.0, 3.0, 4.0]
        path = ft.shock_path(ic, poly, ts)
        for x in path.positions:
            assert abs(x) <= 5 * delta

    def test_agreement_with_oracle_after_merge(self):
        delta = 0.01
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        poly = ft.polygon_for(ic, burgers(), delta)
        ts = [1.5, 2.5, 4.0]
        path = ft.shock_path(ic, poly, ts)
        for t, x in zip(path.times, path.positions):
            assert abs(x - hopf.shock_position(ic, t)) <= 5 * delta

    def test_node_data_shock_is_exact(self):
        # mean states and square levels all sit on the aligned node grid, and
        # Burgers chords are Rankine-Hugoniot speeds, so the tracked position
        # carries no discretization error at any delta
        ic = RiemannPerturbedIC(1.0, -1.0, square())
        t = 1.7
        x_star = hopf.shock_position(ic, t)
        for delta in (0.1, 0.025):
            poly = ft.polygon_for(ic, burgers(), delta)
            path = ft.shock_path(ic, poly, [t])
            assert abs(path.positions[0] - x_star) < 1e-10

    def test_fan_start_tracks_plus_side(self):
        # data opening with a fan: before the shock set collapses the path
        # follows the right edge of the oracle bracket
        delta = 0.01
        poly = ft.polygon_for(FAN_IC, burgers(), delta)
        path = ft.shock_path(FAN_IC, poly, [0.5, 1.0, 6.0])
        for t, x in zip(path.times, path.positions):
            si = hopf.shock_interval(FAN_IC, t)
            ref = si.x_high if not si.merged else si.midpoint
            assert abs(x - ref) <= 5 * delta

    def test_path_is_lipschitz(self):
        delta = 0.02
        ic = RiemannPerturbedIC(1.0, -1.0, ASYM)
        poly = ft.polygon_for(ic, burgers(), delta)
        ts = np.linspace(0.05, 3.0, 60)
        path = ft.shock_path(ic, poly, ts)
        bound = max(abs(1.0 + 0.3), abs(-1.0 - 0.1))
        rates = np.abs(np.diff(path.positions)) / np.diff(path.times)
        # snapping moves values by up to delta/2, shifting f' by as much
        assert np.max(rates) <= bound + 0.5 * delta + 1e-12

    def test_wrong_ordering_rejected(self):
        ic = RiemannPerturbedIC(-1.0, 1.0, zero_profile())
        poly = ft.polygon_for(ic, burgers(), 0.1)
        with pytest.raises(ft.FrontTrackError):
            ft.shock_path(ic, poly, [1.0])
        ic2 = RiemannPerturbedIC(1.0, -1.0, zero_profile())
        with pytest.raises(ft.FrontTrackError):
            ft.shock_path(ic2, ft.polygon_for(ic2, burgers(), 0.1), [])


class TestGodunov:
    def test_constant_data_exact(self):
        ic = RiemannPerturbedIC(0.7, 0.7, zero_profile())
        pts = ft.godunov_reference(ic, burgers(), 0.01, 0.45, 1.0, (-0.5, 0.5))
        assert all(u == 0.7 for _, u in pts)

    def test_unperturbed_shock_position(self):
        # stationary shock: the numerical interface stays within one cell
        ic = RiemannPerturbedIC(1.0, -1.0, zero_profile())
        dx = 1e-3
        pts = ft.godunov_reference(ic, burgers(), dx, 0.45, 10.0, (-0.05, 0.05))
        crossings = [x for x, u in pts if u < 0.0]
        assert abs(crossings[0]) <= dx

    def test_l1_error_shrinks_with_dx(self):
        ic = RiemannPerturbedIC(1.0, -1.0, square())
        poly = ft.polygon_for(ic, burgers(), 1e-3)
        ref = ft.evolve(ft.initial_state(ic, poly, 1.0, span=3.0), poly, 1.0)
        errs = []
        for dx in (0.02, 0.01):
            pts = ft.godunov_reference(ic, burgers(), dx, 0.45, 1.0, (-2.0, 2.0))
            err = sum(abs(u - ft.sample(ref, x)) for x, u in pts) * dx
            errs.append(err)
        assert errs[1] < errs[0]

    def test_bad_cfl_and_dx_rejected(self):
        ic = RiemannPerturbedIC(1.0, -1.0, zero_profile())
        with pytest.raises(ft.FrontTrackError):
            ft.godunov_reference(ic, burgers(), 0.01, 0.7, 1.0, (-1.0, 1.0))
        with pytest.raises(ft.FrontTrackError):
            ft.godunov_reference(ic, burgers(), -0.01, 0.4, 1.0, (-1.0, 1.0))


class TestAudits:
    def test_window_mean_exact_piecewise(self):
        s = ft.PiecewiseConstantState(0.0, np.array([0.0, 1.0]), np.array([1.0, -1.0, 0.5]))
        # [-1, 2]: 1*1 + (-1)*1 + 0.5*1 over width 3
        assert ft.window_mean(s, -1.0, 2.0) == pytest.approx(0.5 / 3.0, abs=1e-15)

    def test_window_tv_counts_interior_jumps(self):
        s = ft.PiecewiseConstantState(0.0, np.array([0.0, 1.0]), np.array([1.0, -1.0, 0.5]))
        assert ft.window_tv(s, -1.0, 2.0) == pytest.approx(3.5, abs=1e-15)
        assert ft.window_tv(s, 0.5, 2.0) == pytest.approx(1.5, abs=1e-15)

    def test_oracle_equivalence_l1(self):
        # discretization error per period stays below 5 delta at t = 1
        delta = 5e-3
        ic = RiemannPerturbedIC(1.0, -1.0, square())
        poly = ft.polygon_for(ic, burgers(), delta)
        state = ft.evolve(ft.initial_state(ic, poly, 1.0, span=3.0), poly, 1.0)
        ev = hopf.oracle_evaluator(ic)
        cuts = set()
        lo, hi = 1.0, 2.0
        cuts.update(float(b) for b in state.breakpoints if lo < b < hi)
        hp = hopf.HopfPotential.from_ic(ic, "joined")
        for j in hopf.scan_jumps(hp, 1.0, lo, hi):
            cuts.add(j.x)
        edges = sorted([lo, hi] + list(cuts))
        err = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            w = b - a
            if w < 1e-9:
                continue
            # inset by 1e-8: the oracle minimizer cannot resolve which side
            # of a shock it is on at distances below ~1e-9
            sh = min(1e-8, 0.25 * w)
            xs = np.linspace(a + sh, b - sh, 9)
            vals = [abs(ft.sample(state, float(x)) - ev(float(x), 1.0, "right")) for x in xs]
            err += float(np.trapezoid(vals, xs))
        assert err <= 5 * delta

    def test_l1_error_halves_with_delta(self):
        # fan staircase mass is linear in delta, and the snapped data error is
        # L1-contractive, so halving delta should halve the distance
        ic = RiemannPerturbedIC(1.0, -1.0, square())
        ev = hopf.oracle_evaluator(ic)
        hp = hopf.HopfPotential.from_ic(ic, "joined")
        lo, hi = 1.0, 2.0
        errs = []
        for delta in (0.02, 0.01, 0.005):
            poly = ft.polygon_for(ic, burgers(), delta)
            state = ft.evolve(ft.initial_state(ic, poly, 1.0, span=3.0), poly, 1.0)
            cuts = set(float(b) for b in state.breakpoints if lo < b < hi)
            for j in hopf.scan_jumps(hp, 1.0, lo, hi):
                cuts.add(j.x)
            edges = sorted([lo, hi] + list(cuts))
            err = 0.0
            for a, b in zip(edges[:-1], edges[1:]):
                w = b - a
                if w < 1e-9:
                    continue
                sh = min(1e-8, 0.25 * w)
                xs = np.linspace(a + sh, b - sh, 9)
                vals = [abs(ft.sample(state, float(x)) - ev(float(x), 1.0, "right")) for x in xs]
                err += float(np.trapezoid(vals, xs))
            errs.append(err)
        for coarse, fine in zip(errs[:-1], errs[1:]):
            assert 1.5 <= coarse / fine <= 3.0
