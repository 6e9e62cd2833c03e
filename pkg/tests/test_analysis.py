import math

import numpy as np
import pytest

from crawlgait.core.analysis import (
    AttractorReport,
    Stability,
    Theorem,
    attractor_bracket,
    classify_dynamics,
    dissipativity_check,
    fixed_points,
    gamma_order_stats,
    limit_cycle,
    report_to_json,
    translation_defect,
)
from crawlgait.core.signals import parse_signal
from crawlgait.utils.exceptions import DissipativityError, NotPeriodicError, NumericalError


TWO_PI = 2 * math.pi


class TestStability:
    @pytest.mark.parametrize("left, right, expected", [
        (1.0, -1.0, Stability.STABLE),
        (-1.0, 1.0, Stability.UNSTABLE),
        (1.0, 1.0, Stability.SEMISTABLE_LEFT),
        (-1.0, -1.0, Stability.SEMISTABLE_RIGHT),
        (0.0, -1.0, Stability.DEGENERATE),
        (1.0, 0.0, Stability.DEGENERATE),
        (0.0, 0.0, Stability.DEGENERATE),
        (math.nan, 1.0, Stability.DEGENERATE),
    ])
    def test_from_signs(self, left, right, expected):
        assert Stability.from_signs(left, right) == expected


class TestDissipativity:
    def test_dry(self, scenario_dyn):
        report = dissipativity_check(scenario_dyn("ex-dry"))
        assert report.passed
        assert report.to_dict()["I_plus"] == pytest.approx(-2.0)
        assert report.to_dict()["I_minus"] == pytest.approx(2.0)

    def test_slope(self, scenario_dyn):
        assert dissipativity_check(scenario_dyn("slope-dry")).passed
        report = dissipativity_check(scenario_dyn("slope-dry", load=3.0))
        assert not report.passed
        assert report.integral_minus == pytest.approx(-1.0)


class TestClassify:
    @pytest.mark.parametrize("name, theorem, unique", [
        ("ex-dry", Theorem.MONOTONE, False),
        ("ex-strib", Theorem.GENERIC, False),
        ("ex-comp", Theorem.STRICT, True),
        ("ex-incomp", Theorem.STRICT, True),
        ("smooth-dry", Theorem.SMOOTH_DRY, True),
        ("cont-dry", Theorem.MONOTONE, False),
    ])
    def test_tags(self, scenario_dyn, name, theorem, unique):
        result = classify_dynamics(scenario_dyn(name))
        assert result.theorem == theorem
        assert result.uniqueness_predicted is unique
        assert result.reasons

    def test_advisory_on_plateau(self, scenario_dyn):
        assert classify_dynamics(scenario_dyn("ex-dry")).unique_zero is False

    @pytest.mark.parametrize("name", ["ex-comp", "ex-incomp"])
    def test_advisory_on_strict(self, scenario_dyn, name):
        # ex-comp has its root between knots at t = pi/2
        assert classify_dynamics(scenario_dyn(name)).unique_zero is True

    def test_no_advisory_without_monotonicity(self, scenario_dyn):
        assert classify_dynamics(scenario_dyn("ex-strib")).unique_zero is None

    def test_failed_dissipativity_noted(self, scenario_dyn):
        result = classify_dynamics(scenario_dyn("slope-dry", load=3.0))
        assert any("dissipativity" in r for r in result.reasons)
        assert result.to_dict()["theorem"] == "monotone-translation"


class TestAttractor:
    def test_plateau_bracket(self, scenario_dyn, coarse):
        report = attractor_bracket(scenario_dyn("ex-dry"), coarse)
        assert report.converged
        assert report.alpha == pytest.approx(-1.0, abs=1e-9)
        assert report.beta == pytest.approx(1.0, abs=1e-9)
        assert report.iterates_hi[0] == pytest.approx(3.0, abs=1e-5)
        assert report.iterates_hi == sorted(report.iterates_hi, reverse=True)

    def test_collapsing_bracket(self, scenario_dyn, coarse):
        report = attractor_bracket(scenario_dyn("ex-comp"), coarse)
        assert report.converged
        assert report.bracket_width < 1e-5
        assert report.alpha == pytest.approx(0.125, abs=1e-3)

    def test_not_dissipative(self, scenario_dyn, coarse):
        with pytest.raises(DissipativityError) as info:
            attractor_bracket(scenario_dyn("slope-dry", load=3.0), coarse)
        assert info.value.integral_minus == pytest.approx(-1.0)

    def test_iteration_budget(self, scenario_dyn, coarse):
        report = attractor_bracket(scenario_dyn("ex-comp"), coarse, tol=1e-14, kmax=1)
        assert not report.converged
        assert report.iterations == 1


class TestFixedPoints:
    def test_plateau(self, scenario_dyn, coarse):
        dyn = scenario_dyn("ex-dry")
        report = fixed_points(dyn, attractor_bracket(dyn, coarse), grid_n=64, cfg=coarse)
        assert report.points == []
        ((lo, hi),) = report.plateaus
        assert lo == pytest.approx(-1.0, abs=1e-5)
        assert hi == pytest.approx(1.0, abs=1e-5)

    def test_tristable(self, scenario_dyn, coarse):
        dyn = scenario_dyn("ex-strib")
        bracket = attractor_bracket(dyn, coarse)
        report = fixed_points(dyn, bracket, grid_n=65, cfg=coarse)
        assert report.plateaus == []
        assert [p.v for p in report.points] == pytest.approx([-1.0, 0.0, 1.0], abs=1e-3)
        assert [p.stability for p in report.points] == [
            Stability.SEMISTABLE_LEFT, Stability.STABLE, Stability.SEMISTABLE_RIGHT,
        ]

    def test_single_stable_point(self, scenario_dyn, coarse):
        dyn = scenario_dyn("ex-comp")
        report = fixed_points(dyn, attractor_bracket(dyn, coarse), cfg=coarse)
        assert report.plateaus == []
        (point,) = report.points
        assert point.v == pytest.approx(0.125, abs=1e-3)
        assert point.to_dict()["class"] == "stable"

    def test_sign_change_refined(self, scenario_dyn, coarse):
        # An even grid skips 0, so the stable point comes from a sign change
        dyn = scenario_dyn("ex-strib")
        report = fixed_points(dyn, attractor_bracket(dyn, coarse), grid_n=64, cfg=coarse)
        middle = [p for p in report.points if abs(p.v) < 0.5]
        assert len(middle) == 1
        assert middle[0].v == pytest.approx(0.0, abs=1e-5)
        assert middle[0].stability == Stability.STABLE

    def test_unconverged_bracket_rejected(self, scenario_dyn, coarse):
        dyn = scenario_dyn("ex-dry")
        bracket = AttractorReport(-1.0, 1.0, [-1.0], [1.0], converged=False, iterations=0)
        with pytest.raises(NumericalError) as info:
            fixed_points(dyn, bracket, grid_n=16, cfg=coarse)
        assert info.value.diagnostics["bracket_width"] == pytest.approx(2.0)


class TestLimitCycle:
    def test_net_displacement(self, scenario_dyn, fine):
        cycle = limit_cycle(scenario_dyn("ex-comp"), 0.125, fine, periodicity_tol=1e-4)
        assert cycle.gamma == pytest.approx(math.pi / 2, abs=1e-3)
        assert cycle.average_velocity == pytest.approx(0.25, abs=1e-3)

    def test_zero_phase(self, scenario_dyn, coarse):
        dyn = scenario_dyn("ex-incomp")
        # The collapsed bracket is the periodic value at t = 0
        v_star = attractor_bracket(dyn, coarse, tol=1e-12).alpha
        cycle = limit_cycle(dyn, v_star, coarse)
        assert abs(cycle.gamma) < 1e-9

    @pytest.mark.parametrize("u0", [-1.0, -0.5, 0.0])
    def test_parametric_family(self, scenario_dyn, coarse, u0):
        cycle = limit_cycle(scenario_dyn("ex-drystar"), u0, coarse)
        assert cycle.average_velocity == pytest.approx(u0 + 0.5, abs=1e-9)
        assert cycle.residual < 1e-12

    def test_not_periodic(self, scenario_dyn, coarse):
        with pytest.raises(NotPeriodicError) as info:
            limit_cycle(scenario_dyn("ex-dry"), 3.0, coarse)
        assert info.value.residual == pytest.approx(2.0, abs=1e-9)


class TestTranslation:
    def test_plateau_orbits_are_translates(self, scenario_dyn, coarse):
        assert translation_defect(scenario_dyn("ex-dry"), -0.5, 0.5, coarse) < 1e-12

    def test_drystar_orbits_are_translates(self, scenario_dyn, coarse):
        assert translation_defect(scenario_dyn("ex-drystar"), -1.0, 0.0, coarse) < 1e-12

    def test_non_periodic_pair(self, scenario_dyn, coarse):
        # From 3 the orbit slides down to the plateau edge
        assert translation_defect(scenario_dyn("ex-dry"), 0.0, 3.0, coarse) == pytest.approx(2.0, abs=1e-9)


class TestGammaStats:
    def test_square_wave(self):
        w = [parse_signal("-1*square(t;1,0.5)", period=1.0), parse_signal("square(t;1,0.5)", period=1.0)]
        stats = gamma_order_stats(w, grid_n=1000)
        assert stats.min_gaps == [pytest.approx(1.0)]
        assert stats.continuity == [False, False]
        assert stats.gammas.shape == (2, stats.times.size)

    def test_smooth_inputs_touch(self):
        w = [parse_signal("cos(t)", period=TWO_PI), parse_signal("-1*cos(t)", period=TWO_PI)]
        stats = gamma_order_stats(w)
        assert stats.min_gaps[0] <= 1e-3
        t = stats.gap_times[0]
        assert min(abs(t - math.pi / 2), abs(t - 3 * math.pi / 2)) < 1e-3
        assert stats.continuity == [True, True]

    def test_single_signal(self):
        w = [parse_signal("sin(t)", period=TWO_PI)]
        stats = gamma_order_stats(w, grid_n=100)
        np.testing.assert_allclose(stats.gammas[0], -np.sin(stats.times), atol=1e-12)
        assert stats.min_gaps == []

    def test_needs_signals(self):
        with pytest.raises(ValueError):
            gamma_order_stats([])


class TestReport:
    def test_empty(self):
        report = report_to_json()
        assert report["alpha"] is None
        assert report["fixed_points"] == []
        assert report["dissipativity"] is None

    def test_keys(self, scenario_dyn, coarse):
        dyn = scenario_dyn("ex-drystar")
        bracket = attractor_bracket(dyn, coarse)
        fixed = fixed_points(dyn, bracket, grid_n=32, cfg=coarse)
        report = report_to_json(
            attractor=bracket,
            fixed=fixed,
            cycle=limit_cycle(dyn, -1.0, coarse),
            classification=classify_dynamics(dyn),
            dissipativity=dissipativity_check(dyn),
            extra={"scenario": "ex-drystar"},
        )
        assert set(report) >= {"alpha", "beta", "fixed_points", "plateaus", "gamma",
                               "avg_velocity", "theorem", "dissipativity", "scenario"}
        assert report["avg_velocity"] == pytest.approx(-0.5)
        assert report["plateaus"][0] == pytest.approx([-1.0, 0.0], abs=1e-5)
        assert report["dissipativity"]["pass"] is True
