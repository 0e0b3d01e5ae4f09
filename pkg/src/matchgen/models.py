from collections import Counter
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from src.netio.models import OD


class TaskKind(str, Enum):
    DEPART = "depart"
    PICKUP = "pickup"
    DROPOFF = "dropoff"
    ARRIVE = "arrive"


class Task(BaseModel):
    kind: TaskKind
    node: int
    od: OD

    class Config:
        frozen = True

    def token(self) -> Tuple[str, OD]:
        return self.kind.value, self.od


class PassengerSlot(BaseModel):
    """One served passenger: task indices of the pickup and the dropoff."""
    od: OD
    pickup: int
    dropoff: int

    class Config:
        frozen = True

    @property
    def levels(self) -> List[int]:
        """Levels travelled on board (as-soon-as-possible dropoff)."""
        return list(range(self.pickup + 1, self.dropoff + 1))


class MatchingSequence(BaseModel):
    id: int = 0
    driver_od: OD
    tasks: List[Task]
    occupancy: List[int] = Field(..., description="vehicle load after each task, index 0..L")
    status: List[int] = Field(..., description="RD status per level 1..L: -1 alone, 0 with a passenger")
    passengers: List[PassengerSlot]
    r_value: float = Field(0.0, description="VKT saving R_n")

    @property
    def num_levels(self) -> int:
        return len(self.tasks) - 1

    @property
    def nodes(self) -> List[int]:
        return [task.node for task in self.tasks]

    @property
    def passenger_ods(self) -> List[OD]:
        return sorted(slot.od for slot in self.passengers)

    def multiplicity(self) -> Dict[OD, int]:
        return dict(Counter(slot.od for slot in self.passengers))

    def level_od(self, level: int) -> OD:
        return self.tasks[level - 1].node, self.tasks[level].node

    def s1(self, level: int, od: OD) -> int:
        """1 when task `level` starts a trip of `od` (driver departure or pickup)."""
        task = self.tasks[level]
        return int(task.od == od and task.kind in (TaskKind.DEPART, TaskKind.PICKUP))

    def s_minus1(self, level: int, od: OD) -> int:
        task = self.tasks[level]
        return int(task.od == od and task.kind in (TaskKind.DROPOFF, TaskKind.ARRIVE))

    def label(self) -> str:
        return "(" + ",".join(str(n) for n in self.nodes) + ")"


class RdRpGroup(BaseModel):
    driver_od: OD
    passenger_ods: Tuple[OD, ...] = ()
    feasible_sequences: List[MatchingSequence] = []

    @property
    def size(self) -> int:
        return len(self.passenger_ods)

    @property
    def feasible(self) -> bool:
        return len(self.feasible_sequences) > 0


class SequencePool(BaseModel):
    """All matching sequences of a scenario, ids dense 0..S-1."""
    sequences: List[MatchingSequence] = []
    by_driver: Dict[OD, List[int]] = {}
    capacity: int = 2
    detour_factor: float = 1.5
    max_passengers: int = 2
    pruned: int = 0

    def __len__(self):
        return len(self.sequences)

    def driver_ods(self) -> List[OD]:
        return sorted(self.by_driver)

    def for_driver(self, od: OD) -> List[MatchingSequence]:
        return [self.sequences[i] for i in self.by_driver.get(od, [])]

    def passenger_ods(self) -> List[OD]:
        ods = set()
        for seq in self.sequences:
            ods.update(seq.passenger_ods)
        return sorted(ods)

    def serving(self, od: OD) -> List[MatchingSequence]:
        return [seq for seq in self.sequences if od in seq.multiplicity()]
