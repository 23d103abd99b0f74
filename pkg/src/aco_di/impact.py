"""Problem-independent Dynamic Impact and the fuel/route worked example."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "DEFAULT_FLOOR",
    "GeneralDiInput",
    "RouteOption",
    "general_dynamic_impact",
    "floor_impact",
    "route_dynamic_impact",
    "table1_scenario_ranking",
    "TABLE1_ROUTES",
    "TABLE1_FUEL",
    "table1_values",
]

# Smallest Dynamic Impact handed to the engine; the probability rule needs DI > 0.
DEFAULT_FLOOR = 0.1


@dataclass(frozen=True)
class GeneralDiInput:
    fitness_without: float
    fitness_with: float
    omega_without: float
    omega_with: float
    sense: int = 1  # +1 maximize, -1 minimize

    def __post_init__(self) -> None:
        if not self.omega_without > 0:
            raise ValueError("remaining resource before the edge must be > 0")
        if self.omega_with > self.omega_without:
            raise ValueError("an edge cannot increase the remaining resource")
        if self.sense not in (1, -1):
            raise ValueError("sense must be +1 or -1")


def general_dynamic_impact(inp: GeneralDiInput) -> float:
    """Fitness change (signed by the optimization sense) per fraction of
    remaining resource consumed.

    The raw value may be zero or negative; callers pass it through
    :func:`floor_impact` before using it as a selection weight.  An edge
    that consumes nothing raises ``ZeroDivisionError``.
    """
    consumed = (inp.omega_without - inp.omega_with) / inp.omega_without
    if consumed == 0:
        raise ZeroDivisionError("edge consumes no resource; dynamic impact undefined")
    return (inp.fitness_with - inp.fitness_without) * inp.sense / consumed


def floor_impact(value: float, floor: float = DEFAULT_FLOOR) -> float:
    if math.isnan(value) or value < floor:
        return floor
    return value


@dataclass(frozen=True)
class RouteOption:
    distance: float
    speed: float
    time: float
    fuel_consumption: float

    def __post_init__(self) -> None:
        if self.speed <= 0 or self.time <= 0:
            raise ValueError("speed and time must be positive")
        if abs(self.time - self.distance / self.speed) > 1e-9:
            raise ValueError("time must equal distance / speed")
        if self.fuel_consumption < 0:
            raise ValueError("fuel consumption must be >= 0")

    @classmethod
    def from_distance(cls, distance: float, speed: float, fuel: float) -> "RouteOption":
        return cls(distance, speed, distance / speed, fuel)


def route_dynamic_impact(route: RouteOption, remaining_fuel: float) -> float:
    """Share of fuel left after the route, per unit of travel time."""
    if not remaining_fuel > 0:
        raise ValueError("remaining fuel must be > 0")
    return (remaining_fuel - route.fuel_consumption) / (remaining_fuel * route.time)


def table1_scenario_ranking(routes: Sequence[RouteOption], remaining_fuel: float) -> list[int]:
    """Route indices by descending impact; equal impacts keep input order."""
    if not routes:
        raise ValueError("need at least one route")
    di = [route_dynamic_impact(r, remaining_fuel) for r in routes]
    return sorted(range(len(routes)), key=lambda i: -di[i])


# slow/frugal, medium, fast/thirsty
TABLE1_ROUTES = (
    RouteOption(25, 10, 2.5, 15),
    RouteOption(30, 15, 2.0, 25),
    RouteOption(60, 60, 1.0, 60),
)
TABLE1_FUEL = (60, 80, 120)


def table1_values() -> list[list[float]]:
    """Impact of every route under each remaining-fuel scenario."""
    return [[route_dynamic_impact(r, fuel) for r in TABLE1_ROUTES] for fuel in TABLE1_FUEL]
