"""
Flow classes of the level-indexed hyper-network. Levels are not materialized as graph
copies: each (sequence, level) is its own origin-destination problem on the base
network, and all classes of one sequence read the same sequence flow.
"""
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from pydantic import BaseModel

from src.hypernet import PT_TAG, RP_QUIT_TAG, SOLO_LEVEL, logger
from src.matchgen.models import MatchingSequence
from src.netio.models import OD
from src.share.modes import CostLayer, Mode


class ClassKind(str, Enum):
    RD = "RD"
    RP = "RP"
    DA = "DA"
    PT = "PT"


class LevelOD(BaseModel):
    sequence_id: int
    level: int
    origin: int
    destination: int

    class Config:
        frozen = True

    @property
    def virtual(self) -> bool:
        """Consecutive tasks at one node: crossed on a zero-cost virtual link."""
        return self.origin == self.destination


class FlowClass(BaseModel):
    kind: ClassKind
    od: OD
    sequence_id: Optional[int] = None
    level: int = SOLO_LEVEL
    tag: int = 0
    origin: int
    destination: int

    class Config:
        frozen = True

    @property
    def is_solo(self) -> bool:
        return self.sequence_id is None

    @property
    def layer(self) -> CostLayer:
        if self.kind == ClassKind.RD:
            return CostLayer.RD_EMPTY if self.tag < 0 else CostLayer.RD_SHARED
        if self.kind == ClassKind.RP:
            return CostLayer.RP
        return CostLayer.DA if self.kind == ClassKind.DA else CostLayer.PT


ClassSets = Dict[Tuple[OD, Mode], List[FlowClass]]


def level_ods(seq: MatchingSequence) -> List[LevelOD]:
    return [
        LevelOD(sequence_id=seq.id, level=l, origin=seq.tasks[l - 1].node, destination=seq.tasks[l].node)
        for l in range(1, seq.num_levels + 1)
    ]


def da_class(od: OD) -> FlowClass:
    return FlowClass(kind=ClassKind.DA, od=od, origin=od[0], destination=od[1])


def pt_class(od: OD) -> FlowClass:
    return FlowClass(kind=ClassKind.PT, od=od, tag=PT_TAG, origin=od[0], destination=od[1])


def rp_quit_class(od: OD) -> FlowClass:
    return FlowClass(kind=ClassKind.PT, od=od, tag=RP_QUIT_TAG, origin=od[0], destination=od[1])


def rd_classes(seq: MatchingSequence) -> List[FlowClass]:
    return [
        FlowClass(kind=ClassKind.RD, od=seq.driver_od, sequence_id=seq.id, level=lod.level,
                  tag=seq.status[lod.level - 1], origin=lod.origin, destination=lod.destination)
        for lod in level_ods(seq)
    ]


def rp_classes(seq: MatchingSequence) -> List[FlowClass]:
    """One class per on-board level of each passenger; tag is the first on-board level u."""
    out = []
    levels = level_ods(seq)
    for slot in seq.passengers:
        u = slot.pickup + 1
        for l in slot.levels:
            lod = levels[l - 1]
            out.append(FlowClass(kind=ClassKind.RP, od=slot.od, sequence_id=seq.id, level=l, tag=u,
                                 origin=lod.origin, destination=lod.destination))
    return out


def build_flow_classes(sequences: Iterable[MatchingSequence], ods: Iterable[OD] = ()) -> ClassSets:
    """
    Class sets per (od, mode). RD sets end with the DA class (the driver quits to drive alone),
    RP sets end with the RP-quit class (the passenger quits to public transport).
    """
    sequences = list(sequences)
    all_ods = set(ods)
    for seq in sequences:
        all_ods.add(seq.driver_od)
        all_ods.update(seq.passenger_ods)

    sets: ClassSets = {}
    for od in sorted(all_ods):
        sets[(od, Mode.DA)] = [da_class(od)]
        sets[(od, Mode.PT)] = [pt_class(od)]
        sets[(od, Mode.RD)] = []
        sets[(od, Mode.RP)] = []
    for seq in sequences:
        sets[(seq.driver_od, Mode.RD)].extend(rd_classes(seq))
        for cls in rp_classes(seq):
            sets[(cls.od, Mode.RP)].append(cls)
    for od in sorted(all_ods):
        sets[(od, Mode.RD)].append(da_class(od))
        sets[(od, Mode.RP)].append(rp_quit_class(od))
    logger.debug(f"Built flow classes for {len(all_ods)} ODs and {len(sequences)} sequences")
    return sets


def distinct_classes(sets: ClassSets) -> List[FlowClass]:
    seen = {}
    for classes in sets.values():
        for cls in classes:
            seen.setdefault(cls, None)
    return list(seen)
