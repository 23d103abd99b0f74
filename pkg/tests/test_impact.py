import pytest
from hypothesis import given
from hypothesis import strategies as st

from aco_di.impact import (
    DEFAULT_FLOOR,
    TABLE1_FUEL,
    TABLE1_ROUTES,
    GeneralDiInput,
    RouteOption,
    floor_impact,
    general_dynamic_impact,
    route_dynamic_impact,
    table1_scenario_ranking,
    table1_values,
)

# reference impact of each route (columns) per remaining-fuel level (rows)
REFERENCE = [
    [0.3, 0.291667, 0.0],
    [0.325, 0.34375, 0.25],
    [0.35, 0.395833, 0.5],
]


class TestGeneral:
    def test_gain_per_share_consumed(self):
        assert general_dynamic_impact(GeneralDiInput(0, 10, 1.0, 0.5)) == 20

    def test_no_gain(self):
        assert general_dynamic_impact(GeneralDiInput(7, 7, 4.0, 1.0)) == 0

    def test_minimize_flips_sign(self):
        assert general_dynamic_impact(GeneralDiInput(10, 5, 4.0, 3.0, sense=-1)) == 20

    def test_zero_consumption(self):
        with pytest.raises(ZeroDivisionError):
            general_dynamic_impact(GeneralDiInput(0, 1, 2.0, 2.0))

    @pytest.mark.parametrize("args", [(0, 1, 0.0, 0.0), (0, 1, 1.0, 2.0), (0, 1, 1.0, 0.5, 0)])
    def test_invalid_input(self, args):
        with pytest.raises(ValueError):
            GeneralDiInput(*args)

    @given(st.floats(-1e3, 1e3), st.floats(0.01, 1e3), st.floats(0.001, 0.999),
           st.floats(0.01, 100))
    def test_homogeneous_in_resource(self, gain, omega, used, c):
        a = general_dynamic_impact(GeneralDiInput(0, gain, omega, omega * used))
        b = general_dynamic_impact(GeneralDiInput(0, gain, omega * c, omega * used * c))
        assert b == pytest.approx(a, rel=1e-9, abs=1e-9)


def test_floor():
    assert floor_impact(-3.0) == DEFAULT_FLOOR
    assert floor_impact(0.0) == DEFAULT_FLOOR
    assert floor_impact(float("nan")) == DEFAULT_FLOOR
    assert floor_impact(2.5) == 2.5
    assert floor_impact(0.0, floor=1.0) == 1.0


class TestRoutes:
    def test_worked_examples(self):
        assert route_dynamic_impact(RouteOption(25, 10, 2.5, 15), 60) == pytest.approx(0.3)
        assert route_dynamic_impact(RouteOption(60, 60, 1, 60), 60) == 0
        assert route_dynamic_impact(RouteOption(30, 15, 2, 25), 80) == 0.34375

    def test_all_reference_values(self):
        got = table1_values()
        for row, want in zip(got, REFERENCE):
            assert row == pytest.approx(want, abs=1e-6)

    def test_ranking_low_fuel(self):
        assert table1_scenario_ranking(TABLE1_ROUTES, 60) == [0, 1, 2]

    def test_ranking_high_fuel(self):
        assert table1_scenario_ranking(TABLE1_ROUTES, 120) == [2, 1, 0]

    def test_ranking_single(self):
        assert table1_scenario_ranking(TABLE1_ROUTES[:1], 80) == [0]

    def test_ranking_stable_on_ties(self):
        r = RouteOption(10, 10, 1, 5)
        assert table1_scenario_ranking([r, r, r], 50) == [0, 1, 2]

    def test_fuel_levels(self):
        assert TABLE1_FUEL == (60, 80, 120)

    def test_bad_fuel(self):
        with pytest.raises(ValueError):
            route_dynamic_impact(TABLE1_ROUTES[0], 0)
        with pytest.raises(ValueError):
            table1_scenario_ranking([], 10)

    def test_inconsistent_time(self):
        with pytest.raises(ValueError):
            RouteOption(25, 10, 3.0, 15)
        with pytest.raises(ValueError):
            RouteOption(25, 10, 2.5, -1)

    def test_from_distance(self):
        assert RouteOption.from_distance(30, 15, 25).time == 2

    @given(st.floats(1, 100), st.floats(0.1, 50), st.floats(0.1, 100),
           st.floats(0.01, 100), st.floats(0.01, 100))
    def test_more_fuel_more_impact(self, dist, speed, fuel, gap1, gap2):
        r = RouteOption.from_distance(dist, speed, fuel)
        f1 = fuel + gap1
        f2 = f1 + gap2
        assert route_dynamic_impact(r, f2) > route_dynamic_impact(r, f1)
