import math

import numpy as np
import pytest
from scipy.optimize import brentq

from crawlgait.core.dynamics import TimeSlice
from crawlgait.core.friction import MonotoneSlice
from crawlgait.core.solver import (
    SolverConfig,
    _implicit_across,
    effective_steps,
    integrate,
    integrate_batch,
    period_grid,
    poincare,
    poincare_iterates,
    settle,
    step,
)
from crawlgait.utils.exceptions import ConfigError, InvalidStepError


class TestStep:
    def test_sliding_step(self, scenario_dyn):
        assert step(scenario_dyn("ex-dry"), 0.0, 3.0, 0.5) == pytest.approx(2.0, abs=1e-15)

    def test_stiction_step(self, scenario_dyn):
        # 0 in G(t, 1) during the first half period
        assert step(scenario_dyn("ex-dry"), 0.0, 1.0, 0.25) == 1.0

    def test_batch_step(self, scenario_dyn):
        v = step(scenario_dyn("ex-dry"), 0.0, np.array([3.0, 0.0, -3.0]), 0.5)
        np.testing.assert_allclose(v, [2.0, 0.0, -2.0], atol=1e-15)

    def test_step_split_at_jump(self, scenario_dyn):
        # G = 3 below -1 and 1 above, 0 is not in G(-1): arrive after 1/6, then rise at rate 1
        assert step(scenario_dyn("ex-drystar"), 0.0, -1.5, 0.5) == pytest.approx(-2 / 3, abs=1e-14)

    def test_proximal_split_at_jump(self):
        mono = MonotoneSlice(np.array([0.0]), np.array([1.0]), np.array([2.0]), 0.0, -1.0)
        ts = TimeSlice(mono, 0.0, np.zeros(1), (0.0, 0.0))
        # Reach 0 after 1/2 at rate 2, then v' = 1 - v for the rest: v = 0.5 * (1 - v)
        assert _implicit_across(ts, -1.0, 1.0) == pytest.approx(1 / 3, abs=1e-14)
        assert mono.resolve(np.array([-1.0]), 1.0)[0] == 0.0

    @pytest.mark.parametrize("dt", [0.0, -0.1])
    def test_non_positive(self, scenario_dyn, dt):
        with pytest.raises(InvalidStepError):
            step(scenario_dyn("ex-dry"), 0.0, 1.0, dt)

    def test_explicit_stability(self, scenario_dyn):
        with pytest.raises(InvalidStepError):
            step(scenario_dyn("ex-strib"), 0.0, 0.0, 0.5)


class TestGrid:
    def test_breakpoints_included(self, scenario_dyn):
        dyn = scenario_dyn("ex-drystar")
        grid = period_grid(dyn, SolverConfig(steps_per_period=17))
        assert grid[0] == 0.0
        assert grid[-1] == 2.0
        assert 1.0 in grid
        assert np.all(np.diff(grid) > 0)

    def test_knot_crossings_included(self, scenario_dyn):
        grid = period_grid(scenario_dyn("smooth-dry"), SolverConfig(steps_per_period=100))
        for t in (math.pi / 2, 3 * math.pi / 2):
            assert np.min(np.abs(grid - t)) < 1e-12

    def test_no_alignment(self, scenario_dyn):
        dyn = scenario_dyn("ex-drystar")
        grid = period_grid(dyn, SolverConfig(steps_per_period=17, event_align=False))
        assert grid.size == 18

    def test_explicit_part_raises_steps(self, scenario_dyn):
        cfg = SolverConfig(steps_per_period=16)
        assert effective_steps(scenario_dyn("ex-strib"), cfg) == 16
        assert effective_steps(scenario_dyn("ex-strib", alpha=0.01), cfg) == 629

    def test_config_validation(self):
        with pytest.raises(ConfigError) as info:
            SolverConfig(steps_per_period=8)
        assert info.value.pointer == "/solver/steps_per_period"
        with pytest.raises(ConfigError):
            SolverConfig(resolvent_tol=0.0)

    def test_unknown_option(self):
        with pytest.raises(ConfigError) as info:
            SolverConfig.from_dict({"steps_per_period": 64, "method": "rk4"})
        assert info.value.pointer == "/solver/method"

    def test_round_trip(self):
        cfg = SolverConfig(steps_per_period=128, oracle_mode=True, oracle_factor=4)
        assert SolverConfig.from_dict(cfg.to_dict()) == cfg


class TestIntegrate:
    def test_one_period(self, scenario_dyn, coarse):
        traj = integrate(scenario_dyn("ex-dry"), 3.0, 0.0, 1.0, coarse)
        assert traj.final_velocity == pytest.approx(1.0, abs=1e-12)
        # Two linear pieces: 3 -> 2 -> 1
        assert traj.final_displacement == pytest.approx(2.0, abs=1e-12)
        assert traj.times[0] == 0.0 and traj.times[-1] == 1.0

    def test_window_across_periods(self, scenario_dyn, coarse):
        traj = integrate(scenario_dyn("ex-dry"), 3.0, 0.25, 1.25, coarse)
        assert traj.final_velocity == pytest.approx(1.0, abs=1e-12)
        assert traj.velocity_at(np.array([0.5]))[0] == pytest.approx(2.5, abs=1e-12)

    def test_stick_flags(self, scenario_dyn, coarse):
        traj = integrate(scenario_dyn("ex-dry"), 1.0, 0.0, 1.0, coarse)
        np.testing.assert_array_equal(traj.velocities, 1.0)
        assert traj.stick_flags[1] == (0,)
        assert traj.stick_flags[-1] == (1,)

    def test_empty_window(self, scenario_dyn):
        with pytest.raises(InvalidStepError):
            integrate(scenario_dyn("ex-dry"), 0.0, 1.0, 1.0)

    def test_batch_shares_grid(self, scenario_dyn, coarse):
        trajs = integrate_batch(scenario_dyn("ex-dry"), [3.0, -3.0], 0.0, 1.0, coarse)
        assert len(trajs) == 2
        np.testing.assert_array_equal(trajs[0].times, trajs[1].times)
        assert trajs[1].final_velocity == pytest.approx(-1.0, abs=1e-12)

    def test_jump_crossed_exactly(self, scenario_dyn, coarse):
        # 3 per unit time up to -1 at t = 2/3, then 1 per unit time
        traj = integrate(scenario_dyn("ex-drystar"), -3.0, 0.0, 1.0, coarse)
        assert traj.final_velocity == pytest.approx(-2 / 3, abs=1e-12)

    def test_head_on_arrival(self, scenario_dyn, fine):
        # v falls at rate 2 onto the rising knot -cos(t), then rests where they met
        t_meet = brentq(lambda t: 1.0 - 2.0 * (t - math.pi / 2) + math.cos(t), math.pi / 2, math.pi)
        traj = integrate(scenario_dyn("smooth-dry"), 1.0, math.pi / 2, math.pi, fine)
        assert traj.final_velocity == pytest.approx(-math.cos(t_meet), abs=1e-6)

    def test_dragged_to_rest_by_colliding_knots(self, scenario_dyn, coarse):
        assert poincare(scenario_dyn("smooth-dry"), 3.0, coarse) == pytest.approx(0.0, abs=1e-12)

    def test_oracle_agrees(self, scenario_dyn):
        cfg = SolverConfig(steps_per_period=64, oracle_mode=True, oracle_factor=4)
        traj = integrate(scenario_dyn("ex-dry"), 3.0, 0.0, 1.0, cfg)
        assert traj.final_velocity == pytest.approx(1.0, abs=1e-6)
        assert len(traj) == 64 * 4 + 1


class TestPoincare:
    def test_dry_square_wave(self, scenario_dyn, coarse):
        assert poincare(scenario_dyn("ex-dry"), 3.0, coarse) == pytest.approx(1.0, abs=1e-12)

    def test_plateau_points_fixed(self, scenario_dyn, coarse):
        v = np.linspace(-1.0, 1.0, 9)
        np.testing.assert_allclose(poincare(scenario_dyn("ex-dry"), v, coarse), v, atol=1e-12)

    def test_asymmetric_dry(self, scenario_dyn, coarse):
        assert poincare(scenario_dyn("ex-drystar"), 0.5, coarse) == pytest.approx(0.0, abs=1e-12)

    def test_monotone_map(self, scenario_dyn, coarse):
        v = np.linspace(-4.0, 4.0, 41)
        image = poincare(scenario_dyn("ex-comp"), v, coarse)
        assert np.all(np.diff(image) >= 0)

    def test_iterates(self, scenario_dyn, coarse):
        dyn = scenario_dyn("ex-comp")
        iterates = poincare_iterates(dyn, 2.0, 3, coarse)
        assert len(iterates) == 3
        assert iterates[0] == poincare(dyn, 2.0, coarse)
        assert iterates[1] == pytest.approx(poincare(dyn, iterates[0], coarse), rel=1e-12)

    def test_iterates_need_one(self, scenario_dyn):
        with pytest.raises(InvalidStepError):
            poincare_iterates(scenario_dyn("ex-dry"), 0.0, 0)


class TestSettle:
    def test_finite_time(self, scenario_dyn, coarse):
        report = settle(scenario_dyn("ex-drystar"), 0.5, coarse)
        assert report.converged
        assert report.limit == pytest.approx(0.0, abs=1e-12)
        assert report.finite_time
        assert report.settle_time == pytest.approx(1.0, abs=0.02)

    def test_asymptotic(self, scenario_dyn, fine):
        report = settle(scenario_dyn("ex-comp"), 3.0, fine, tol=1e-10)
        assert report.converged
        assert report.limit == pytest.approx(0.125, abs=1e-3)
        assert report.iterates[-1] == report.limit

    def test_budget(self, scenario_dyn, coarse):
        report = settle(scenario_dyn("ex-comp"), 3.0, coarse, tol=1e-14, kmax=2)
        assert not report.converged
        assert report.periods == 2
