import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crawlgait.core.friction import (
    LawClass,
    MonotoneGraph,
    ValueInterval,
    classify_law,
    eval_law,
    law_from_spec,
    law_slice,
    resolvent_monotone,
    tail_bounds,
)
from crawlgait.utils.exceptions import InvalidStepError, LawError


def dry(mu=1.0, period=1.0):
    return law_from_spec({"type": "dry", "mu": mu}, period)


def viscous(mu_v, period=1.0):
    return law_from_spec({"type": "viscous", "mu_v": mu_v}, period)


def bingham(mu_v=1.0, mu=1.0):
    return law_from_spec({"type": "bingham", "mu_v": mu_v, "mu": mu}, 1.0)


def stribeck(amplitude=0.5, width=1.0):
    return law_from_spec({"type": "stribeck", "mu": 1, "psi": {"amplitude": amplitude, "width": width}}, 1.0)


LAWS = {
    "dry": dry(),
    "asymmetric": law_from_spec({"type": "dry", "mu_plus": 2, "mu_minus": 0.5}, 1.0),
    "viscous": viscous(2.0),
    "bingham": bingham(),
    "modulated": law_from_spec({"type": "bingham", "mu_v": "1+0.5*square(t;1,1)", "mu": 1}, 1.0),
    "graph": law_from_spec({
        "type": "custom",
        "extra": {"u": [-1, 0, 0, 1], "y": [-1, -0.5, 0.5, 1], "slope_left": 1, "slope_right": 1},
        "tail_bounds": {"minus": -1, "plus": -1, "R": 1},
    }, 1.0),
}


class TestEval:
    def test_dry_stiction_interval(self):
        assert eval_law(dry(), 0.0, 0.0) == ValueInterval(-1.0, 1.0)

    def test_dry_sliding(self):
        assert eval_law(dry(), 0.0, 0.5) == ValueInterval(-1.0, -1.0)
        assert eval_law(dry(), 0.0, -0.5) == ValueInterval(1.0, 1.0)

    def test_asymmetric_stiction(self):
        law = LAWS["asymmetric"]
        assert eval_law(law, 0.0, 0.0) == ValueInterval(-2.0, 0.5)

    def test_bingham(self):
        assert eval_law(bingham(), 0.0, 2.0) == ValueInterval(-3.0, -3.0)

    def test_stribeck(self):
        value = eval_law(stribeck(), 0.0, 0.5)
        assert value.is_point
        assert value.lo == pytest.approx(-0.5)

    def test_stribeck_vanishes_outside_width(self):
        assert eval_law(stribeck(), 0.0, 1.5) == ValueInterval(-1.0, -1.0)

    def test_time_dependent_coefficient(self):
        law = LAWS["modulated"]
        assert eval_law(law, 0.25, 1.0).lo == pytest.approx(-2.5)
        assert eval_law(law, 0.75, 1.0).lo == pytest.approx(-1.5)

    @pytest.mark.parametrize("name", sorted(LAWS))
    def test_decreasing_graph(self, name):
        law = LAWS[name]
        rng = np.random.default_rng(7)
        for _ in range(1000):
            t = rng.uniform(0, 1)
            u1, u2 = np.sort(rng.uniform(-3, 3, 2))
            if u1 == u2:
                continue
            assert eval_law(law, t, u2).hi <= eval_law(law, t, u1).lo + 1e-12


class TestResolvent:
    def test_stiction(self):
        assert resolvent_monotone(dry(), 0.0, 0.1, 0.05) == 0.0

    def test_soft_threshold(self):
        assert resolvent_monotone(dry(), 0.0, 0.1, 0.5) == pytest.approx(0.4, abs=1e-15)
        assert resolvent_monotone(dry(), 0.0, 0.1, -0.5) == pytest.approx(-0.4, abs=1e-15)

    def test_linear_solve(self):
        assert resolvent_monotone(viscous(2.0), 0.0, 0.5, 1.0) == pytest.approx(0.5)

    def test_bingham_shrinks_then_scales(self):
        # u + 0.5*(u + 1) = 2
        assert resolvent_monotone(bingham(), 0.0, 0.5, 2.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("step", [0.0, -0.1])
    def test_invalid_step(self, step):
        with pytest.raises(InvalidStepError):
            resolvent_monotone(dry(), 0.0, step, 1.0)

    @pytest.mark.parametrize("name", sorted(LAWS))
    @given(
        r1=st.floats(min_value=-5, max_value=5, allow_nan=False),
        r2=st.floats(min_value=-5, max_value=5, allow_nan=False),
        step=st.floats(min_value=1e-3, max_value=2.0),
        t=st.floats(min_value=0.0, max_value=0.99),
    )
    def test_firmly_nonexpansive(self, name, r1, r2, step, t):
        law = LAWS[name]
        j1 = resolvent_monotone(law, t, step, r1)
        j2 = resolvent_monotone(law, t, step, r2)
        assert abs(j1 - j2) <= abs(r1 - r2) + 1e-12
        # Firm: (J1 - J2)^2 <= (J1 - J2)(r1 - r2)
        assert (j1 - j2) ** 2 <= (j1 - j2) * (r1 - r2) + 1e-12

    @pytest.mark.parametrize("name", sorted(LAWS))
    def test_firmly_nonexpansive_seeded(self, name):
        law = LAWS[name]
        rng = np.random.default_rng(1234)
        for r1, r2, step, t in zip(rng.uniform(-5, 5, 1000), rng.uniform(-5, 5, 1000),
                                   rng.uniform(1e-3, 2.0, 1000), rng.uniform(0.0, 0.99, 1000)):
            j1 = resolvent_monotone(law, t, step, r1)
            j2 = resolvent_monotone(law, t, step, r2)
            assert (j1 - j2) ** 2 <= (j1 - j2) * (r1 - r2) + 1e-12

    @pytest.mark.parametrize("name", sorted(LAWS))
    @given(
        r=st.floats(min_value=-5, max_value=5, allow_nan=False),
        step=st.floats(min_value=1e-3, max_value=2.0),
    )
    def test_consistency(self, name, r, step):
        law = LAWS[name]
        j = resolvent_monotone(law, 0.3, step, r)
        # r in j - step * F_mono(j)
        lo, hi = law_slice(law, 0.3).evaluate(np.asarray([j]))
        tol = 1e-12 * (1 + abs(r))
        assert j - step * hi[0] - tol <= r <= j - step * lo[0] + tol


class TestClassify:
    def test_classes(self):
        assert classify_law(dry()) == LawClass.DRY_ONLY
        assert classify_law(viscous(2.0)) == LawClass.STRICTLY_MONOTONE
        assert classify_law(bingham()) == LawClass.STRICTLY_MONOTONE
        assert classify_law(stribeck()) == LawClass.NON_MONOTONE
        assert classify_law(LAWS["graph"]) == LawClass.STRICTLY_MONOTONE

    def test_intermittent_viscosity_is_monotone(self):
        law = law_from_spec({"type": "viscous", "mu_v": "1+square(t;1,1)"}, 1.0)
        assert classify_law(law) == LawClass.MONOTONE

    def test_flat_graph_is_monotone(self):
        law = law_from_spec({
            "type": "custom",
            "extra": {"u": [0, 0], "y": [-1, 1]},
            "tail_bounds": {"minus": -1, "plus": -1, "R": 0},
        }, 1.0)
        assert classify_law(law) == LawClass.MONOTONE

    @pytest.mark.parametrize("name, flat", [
        ("dry", True), ("asymmetric", True), ("viscous", False), ("bingham", False),
    ])
    def test_piecewise_constant_slices(self, name, flat):
        assert law_slice(LAWS[name], 0.3).is_piecewise_constant is flat


class TestTails:
    def test_dry(self):
        minus, plus = tail_bounds(dry(2.0), np.array([0.0, 0.5]), 0.1)
        np.testing.assert_allclose(plus, [-2.0, -2.0])
        np.testing.assert_allclose(minus, [-2.0, -2.0])

    def test_viscous_grows_with_threshold(self):
        minus, plus = tail_bounds(viscous(2.0), np.array([0.0]), 0.5)
        assert plus[0] == pytest.approx(-1.0)
        assert minus[0] == pytest.approx(-1.0)

    def test_stribeck_adds_bump(self):
        minus, plus = tail_bounds(stribeck(0.5, 1.0), np.array([0.0]), 1e-6)
        assert plus[0] == pytest.approx(-0.5)
        assert minus[0] == pytest.approx(-0.5)

    def test_declared_bounds_need_threshold(self):
        with pytest.raises(LawError):
            tail_bounds(LAWS["graph"], np.array([0.0]), 0.5)


class TestSpec:
    def test_unknown_type(self):
        with pytest.raises(LawError):
            law_from_spec({"type": "magic"}, 1.0)

    def test_dry_needs_coefficient(self):
        with pytest.raises(LawError):
            law_from_spec({"type": "dry"}, 1.0)

    def test_stribeck_needs_psi(self):
        with pytest.raises(LawError):
            law_from_spec({"type": "stribeck", "mu": 1}, 1.0)

    def test_custom_needs_tails(self):
        with pytest.raises(LawError):
            law_from_spec({"type": "custom", "mu": 1}, 1.0)

    def test_negative_coefficient(self):
        with pytest.raises(LawError):
            law_from_spec({"type": "dry", "mu": "sin(2*pi*t)"}, 1.0)

    def test_decreasing_graph_rejected(self):
        with pytest.raises(LawError):
            MonotoneGraph((0.0, 1.0), (1.0, 0.0))

    @pytest.mark.parametrize("name", sorted(LAWS))
    def test_round_trip(self, name):
        law = LAWS[name]
        again = law_from_spec(law.to_spec(), 1.0)
        for t in (0.1, 0.6):
            for u in (-2.0, -0.3, 0.0, 0.4, 1.7):
                assert eval_law(again, t, u) == eval_law(law, t, u)
