import numpy as np
import pytest

from aco_di.mkp import MkpInstance
from aco_di.mmppfo import CapacityCell, MmppfoInstance, Move, MoveKind, Order, WaferLot


@pytest.fixture
def toy_mkp():
    # profits 6,5,4; one knapsack of 4; weights 2,2,3 -> optimum {0,1} = 11
    return MkpInstance(np.array([6.0, 5.0, 4.0]), np.array([[2.0, 2.0, 3.0]]), np.array([4.0]),
                       known_optimum=11.0, name="toy3")


def stay(week, fab):
    return Move(week, fab, MoveKind.STAY)


@pytest.fixture
def small_floor():
    """Two fabs, three weeks, one product group; hand-checkable."""
    lots = (
        WaferLot(0, 10, "P", 1, "A", (stay(1, "A"), Move(0, "A", MoveKind.PULL_IN))),
        WaferLot(1, 20, "P", 1, "A", (stay(1, "A"), Move(1, "B", MoveKind.OFFLOAD))),
        WaferLot(2, 5, "P", 2, "A", (stay(2, "A"), Move(1, "A", MoveKind.PULL_IN))),
        WaferLot(3, 8, "P", 0, "B", (stay(0, "B"), Move(1, "B", MoveKind.PUSH_OUT))),
    )
    orders = (Order(0, 25, 1, "P"), Order(1, 12, 2, "P"))
    caps = tuple(CapacityCell("P", f, w, 30) for f in ("A", "B") for w in range(3))
    return MmppfoInstance(lots, orders, caps)


# acceptance outcomes, filled by test_acceptance.py and printed after the run
CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        ok, line = CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {line}")
