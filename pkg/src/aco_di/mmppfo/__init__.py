"""Wafer-lot production floor scheduling (minimize undersupported demand)."""

from .generator import SCHEMES, GeneratorError, GeneratorParams, generate_dataset
from .io import (
    MmppfoSchemaError,
    dumps_instance,
    load_instance,
    loads_instance,
    save_instance,
)
from .model import (
    CapacityCell,
    InfeasibleEdge,
    MmppfoInstance,
    Move,
    MoveKind,
    Order,
    Schedule,
    ScheduleEdge,
    WaferLot,
    capacity_utilization,
    capacity_waste,
    check_schedule,
    dynamic_impact_mmppfo,
    mmppfo_fitness,
    oversupported_request,
    remaining_demand,
    supported_request,
    undersupported_request,
)
from .search import MmppfoAdapter, SearchSpace, build_search_space

__all__ = [
    "CapacityCell", "SCHEMES", "GeneratorError", "GeneratorParams", "InfeasibleEdge", "MmppfoAdapter",
    "MmppfoInstance", "MmppfoSchemaError", "Move", "MoveKind", "Order", "Schedule",
    "ScheduleEdge", "SearchSpace", "WaferLot", "build_search_space", "capacity_utilization",
    "capacity_waste", "check_schedule", "dumps_instance", "dynamic_impact_mmppfo",
    "generate_dataset", "load_instance", "loads_instance", "mmppfo_fitness",
    "oversupported_request", "remaining_demand", "save_instance", "supported_request",
    "undersupported_request",
]
