from typing import Dict, Mapping, Optional, Tuple

from src.hypernet import RP_QUIT_TAG
from src.hypernet.classes import ClassKind, ClassSets, FlowClass, distinct_classes
from src.netio.models import OD
from src.share.modes import Mode

Injections = Dict[FlowClass, Dict[int, float]]


def _served(classes: ClassSets, flows: Mapping[int, float]) -> Tuple[Dict[OD, float], Dict[OD, float]]:
    """Matched drivers and matched passengers per od implied by the sequence flows."""
    drivers: Dict[OD, float] = {}
    riders: Dict[OD, float] = {}
    for cls in distinct_classes(classes):
        if cls.sequence_id is None:
            continue
        f = flows.get(cls.sequence_id, 0.0)
        if cls.kind == ClassKind.RD and cls.level == 1:
            drivers[cls.od] = drivers.get(cls.od, 0.0) + f
        elif cls.kind == ClassKind.RP and cls.level == cls.tag:
            riders[cls.od] = riders.get(cls.od, 0.0) + f
    return drivers, riders


def sequence_demand_vector(flows: Mapping[int, float], classes: ClassSets,
                           demands: Optional[Mapping[Tuple[OD, Mode], float]] = None) -> Injections:
    """
    Node injections per class: +F at the level origin, -F at the level destination for
    sequence classes; solo classes carry their mode demand plus the quitters they absorb.
    """
    for value in flows.values():
        if value < 0:
            raise ValueError("sequence flows must be >= 0")
    demands = demands or {}
    drivers, riders = _served(classes, flows)

    out: Injections = {}
    for cls in distinct_classes(classes):
        if cls.sequence_id is not None:
            amount = flows.get(cls.sequence_id, 0.0)
        elif cls.kind == ClassKind.DA:
            amount = demands.get((cls.od, Mode.DA), 0.0)
            if (cls.od, Mode.RD) in demands:
                amount += demands[(cls.od, Mode.RD)] - drivers.get(cls.od, 0.0)
        elif cls.tag == RP_QUIT_TAG:
            amount = demands.get((cls.od, Mode.RP), 0.0) - riders.get(cls.od, 0.0) if (cls.od, Mode.RP) in demands else 0.0
        else:
            amount = demands.get((cls.od, Mode.PT), 0.0)
        vector: Dict[int, float] = {}
        if amount != 0.0 and cls.origin != cls.destination:
            vector[cls.origin] = amount
            vector[cls.destination] = -amount
        out[cls] = vector
    return out
