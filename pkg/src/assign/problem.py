"""
Index structures for one equilibrium instance: od numbering, sequence levels and the
driver/passenger incidence of every sequence.
"""
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from scipy import sparse

from src.assign import logger
from src.assign.models import EquilibriumConfig
from src.hypernet.classes import LevelOD, level_ods
from src.matchgen.models import SequencePool
from src.netio.costs import CostModel
from src.netio.models import OD, DemandTable, Network
from src.share.modes import ALL_MODES, BASELINE_MODES, CostLayer, MODE_INDEX, Mode

Demands = Union[DemandTable, Mapping[Mode, DemandTable]]

DA, RD, RP, PT = (MODE_INDEX[m] for m in ALL_MODES)


class Problem:
    def __init__(self, network: Network, demands: Demands, pool: Optional[SequencePool], config: EquilibriumConfig):
        self.config = config
        self.pool = pool or SequencePool()
        self.sequences = self.pool.sequences

        if isinstance(demands, DemandTable):
            self.fixed_split = False
            tables = {Mode.DA: demands}
        else:
            self.fixed_split = True
            tables = {Mode(m): t for m, t in demands.items()}
        ods = set()
        for table in tables.values():
            ods.update(table.ods)
        for seq in self.sequences:
            ods.add(seq.driver_od)
            ods.update(seq.passenger_ods)
        self.ods: List[OD] = sorted(ods)
        self.od_index: Dict[OD, int] = {od: i for i, od in enumerate(self.ods)}
        self.network = network.with_endpoints(self.ods)
        self.cost_model = CostModel(self.network, config.mode_params, config.pt_time)

        W = len(self.ods)
        self.initial_q = np.zeros((W, len(ALL_MODES)))
        for mode, table in tables.items():
            for od, q in table.demands.items():
                self.initial_q[self.od_index[od], MODE_INDEX[mode]] += q
        self.total = self.initial_q.sum(axis=1)

        # no sequence at all means ridesharing is unavailable: only DA and PT compete
        modes = ALL_MODES if self.sequences else BASELINE_MODES
        self.active_modes = [MODE_INDEX[m] for m in modes]
        self.mode_choice = config.mode_choice and not self.fixed_split

        self._index_sequences()
        logger.info(f"Problem: {W} ODs, {len(self.sequences)} sequences, total demand {self.total.sum():.1f}, "
                    f"mode choice {'on' if self.mode_choice else 'off'}")

    def _index_sequences(self):
        S = len(self.sequences)
        W = len(self.ods)
        self.seq_driver = np.array([self.od_index[s.driver_od] for s in self.sequences], dtype=int)
        self.seq_levels: List[List[LevelOD]] = [level_ods(s) for s in self.sequences]
        self.seq_layers: List[List[CostLayer]] = [
            [CostLayer.RD_EMPTY if b < 0 else CostLayer.RD_SHARED for b in s.status] for s in self.sequences
        ]
        self.level_offset = np.zeros(S + 1, dtype=int)
        for n, levels in enumerate(self.seq_levels):
            self.level_offset[n + 1] = self.level_offset[n] + len(levels)
        self.num_level_rows = int(self.level_offset[-1])

        self.seq_mult: List[Dict[int, int]] = []
        self.seq_slots: List[List[Tuple[int, List[int]]]] = []
        rows, cols, vals = [], [], []
        for n, seq in enumerate(self.sequences):
            mult = {self.od_index[od]: c for od, c in seq.multiplicity().items()}
            self.seq_mult.append(mult)
            self.seq_slots.append([(self.od_index[slot.od], slot.levels) for slot in seq.passengers])
            for w, c in mult.items():
                rows.append(w)
                cols.append(n)
                vals.append(float(c))
        self.A_rd = sparse.csr_matrix((np.ones(S), (self.seq_driver, np.arange(S))), shape=(W, S))
        self.A_rp = sparse.csr_matrix((vals, (rows, cols)), shape=(W, S))
        self.R = np.array([s.r_value for s in self.sequences], dtype=float)

        self.groups: Dict[int, List[int]] = {}
        for n in range(S):
            self.groups.setdefault(int(self.seq_driver[n]), []).append(n)

    @property
    def num_sequences(self) -> int:
        return len(self.sequences)

    @property
    def num_ods(self) -> int:
        return len(self.ods)

    @property
    def total_demand(self) -> float:
        return float(self.total.sum())

    def level_row(self, n: int, level: int) -> int:
        return int(self.level_offset[n] + level - 1)

    def quit_rd(self, q: np.ndarray, F: np.ndarray) -> np.ndarray:
        return q[:, RD] - (self.A_rd @ F if self.num_sequences else 0.0)

    def rp_pool(self, q: np.ndarray, F: np.ndarray) -> np.ndarray:
        """Passengers not matched, who ride public transport."""
        return q[:, RP] - (self.A_rp @ F if self.num_sequences else 0.0)
