"""JSON instance files.

Schema (unknown keys are ignored)::

    {"wafer_lots": [{"id", "quantity", "product_group", "week", "fab",
                     "allowed_moves": [{"week", "fab", "kind"}]}],
     "orders": [{"id", "demand", "week", "product_group"}],
     "capacities": [{"product_group", "fab", "week", "capacity"}]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .model import CapacityCell, MmppfoInstance, Move, MoveKind, Order, WaferLot

__all__ = ["MmppfoSchemaError", "instance_to_dict", "instance_from_dict",
           "dumps_instance", "loads_instance", "save_instance", "load_instance"]


class MmppfoSchemaError(ValueError):
    pass


def _get(d, key: str, where: str):
    if not isinstance(d, dict):
        raise MmppfoSchemaError(f"{where}: expected an object")
    if key not in d:
        raise MmppfoSchemaError(f"{where}: missing key {key!r}")
    return d[key]


def _int(d, key: str, where: str) -> int:
    v = _get(d, key, where)
    if isinstance(v, bool) or not isinstance(v, int):
        raise MmppfoSchemaError(f"{where}.{key}: expected an integer, got {v!r}")
    return v


def _list(d, key: str, where: str) -> list:
    v = _get(d, key, where)
    if not isinstance(v, list):
        raise MmppfoSchemaError(f"{where}.{key}: expected a list")
    return v


def instance_from_dict(data: dict) -> MmppfoInstance:
    try:
        lots = []
        for i, d in enumerate(_list(data, "wafer_lots", "instance")):
            where = f"wafer_lots[{i}]"
            moves = []
            for k, mv in enumerate(_list(d, "allowed_moves", where)):
                mw = f"{where}.allowed_moves[{k}]"
                try:
                    kind = MoveKind(_get(mv, "kind", mw))
                except ValueError:
                    raise MmppfoSchemaError(f"{mw}.kind: unknown move kind {mv['kind']!r}") from None
                moves.append(Move(_int(mv, "week", mw), _get(mv, "fab", mw), kind))
            lots.append(WaferLot(_int(d, "id", where), _int(d, "quantity", where),
                                 _get(d, "product_group", where), _int(d, "week", where),
                                 _get(d, "fab", where), tuple(moves)))
        orders = []
        for i, d in enumerate(_list(data, "orders", "instance")):
            where = f"orders[{i}]"
            orders.append(Order(_int(d, "id", where), _int(d, "demand", where),
                                _int(d, "week", where), _get(d, "product_group", where)))
        cells = []
        for i, d in enumerate(_list(data, "capacities", "instance")):
            where = f"capacities[{i}]"
            cells.append(CapacityCell(_get(d, "product_group", where), _get(d, "fab", where),
                                      _int(d, "week", where), _int(d, "capacity", where)))
        return MmppfoInstance(tuple(lots), tuple(orders), tuple(cells))
    except MmppfoSchemaError:
        raise
    except ValueError as exc:
        raise MmppfoSchemaError(str(exc)) from exc


def instance_to_dict(instance: MmppfoInstance) -> dict:
    return {
        "wafer_lots": [
            {"id": l.id, "quantity": l.quantity, "product_group": l.product_group,
             "week": l.week, "fab": l.fab,
             "allowed_moves": [{"week": m.week, "fab": m.fab, "kind": m.kind.value}
                               for m in l.allowed_moves]}
            for l in instance.wafer_lots
        ],
        "orders": [{"id": o.id, "demand": o.demand, "week": o.week,
                    "product_group": o.product_group} for o in instance.orders],
        "capacities": [{"product_group": c.product_group, "fab": c.fab, "week": c.week,
                        "capacity": c.capacity} for c in instance.capacities],
    }


def dumps_instance(instance: MmppfoInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=1) + "\n"


def loads_instance(text: Union[str, bytes]) -> MmppfoInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MmppfoSchemaError(f"invalid JSON: {exc}") from exc
    return instance_from_dict(data)


def save_instance(instance: MmppfoInstance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_instance(instance), encoding="utf-8")


def load_instance(path: Union[str, Path]) -> MmppfoInstance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))
