from typing import Dict, List, Optional

from pydantic import BaseModel, Field, validator

from src import config
from src.assign.models import EquilibriumConfig
from src.cli import SWEEP_PARAMETERS
from src.matchgen import DEFAULT_CAPACITY, DEFAULT_DETOUR_FACTOR, DEFAULT_MAX_PASSENGERS
from src.netio.models import ModeCostParams


class CliArgs(BaseModel):
    command: str
    target: str = Field(..., description="scenario file, or solution directory for verify")
    output_dir: Optional[str] = None
    param: Optional[str] = None
    grid_from: Optional[float] = None
    grid_to: Optional[float] = None
    steps: Optional[int] = None
    threads: int = config.THREADS
    deterministic: bool = False
    debug: bool = False
    dump_sequences: bool = False
    no_verify: bool = False


class MatchingSettings(BaseModel):
    enabled: bool = True
    capacity: int = DEFAULT_CAPACITY
    max_passengers: int = DEFAULT_MAX_PASSENGERS
    detour_factor: float = DEFAULT_DETOUR_FACTOR
    same_od_passengers: bool = True
    passenger_detour_factor: Optional[float] = None
    max_sequences_per_driver_od: Optional[int] = None

    @validator("capacity", "max_passengers")
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @validator("detour_factor")
    def detour_at_least_one(cls, v):
        if v < 1.0:
            raise ValueError("detour_factor must be >= 1")
        return v


class SweepSpec(BaseModel):
    parameter: str
    start: float
    stop: float
    steps: int = 1

    @validator("parameter")
    def known_parameter(cls, v):
        if v not in SWEEP_PARAMETERS:
            raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMETERS}")
        return v

    @validator("steps")
    def non_empty(cls, v):
        if v < 1:
            raise ValueError("a sweep needs at least one point")
        return v

    def grid(self) -> List[float]:
        if self.steps == 1:
            return [self.start]
        width = (self.stop - self.start) / (self.steps - 1)
        return [self.start + i * width for i in range(self.steps)]


class ScenarioConfig(BaseModel):
    name: str = "scenario"
    path: Optional[str] = Field(None, description="scenario file the config was read from")
    builtin: Optional[str] = Field(None, description="built-in network instead of TNTP files")
    net_file: Optional[str] = None
    trips_file: Optional[str] = None
    mode_trips: Dict[str, str] = Field({}, description="per-mode trip tables, fixes the mode split")
    demand_scale: float = 1.0
    mode_params: ModeCostParams = ModeCostParams()
    solver: EquilibriumConfig = EquilibriumConfig()
    matching: MatchingSettings = MatchingSettings()
    sweep: Optional[SweepSpec] = None
    output_dir: str = config.OUTPUT_DIR
    threads: int = config.THREADS
    deterministic: bool = False
    verify: str = Field("auto", description="auto, always or never")

    @validator("threads", pre=True, always=True)
    def threads_positive(cls, v):
        return max(int(v), 1)

    @validator("verify")
    def verify_known(cls, v):
        if v not in ("auto", "always", "never"):
            raise ValueError("verify must be auto, always or never")
        return v

    @property
    def effective_threads(self) -> int:
        return 1 if self.deterministic else self.threads


class RunReport(BaseModel):
    name: str
    converged: bool
    warm_started: bool = False
    verified: Optional[bool] = None
    shares: Dict[str, float] = {}
    effective_shares: Dict[str, float] = {}
    baseline_shares: Dict[str, float] = {}
    vehicle_trips: float = 0.0
    vkt: float = 0.0
    vht: float = 0.0
    baseline_vehicle_trips: Optional[float] = None
    baseline_vkt: Optional[float] = None
    baseline_vht: Optional[float] = None
    mean_detour: float = 0.0
    mean_shared_fraction: float = 0.0
    num_sequences: int = 0
    inner_iterations: int = 0
    outer_iterations: int = 0
    final_g_m: float = 0.0
    final_g_n: float = 0.0
    wall_time: float = 0.0
    error: Optional[str] = None

    @validator("vkt", "vht", "vehicle_trips")
    def non_negative(cls, v):
        return max(v, 0.0)

    @staticmethod
    def _saved(base: Optional[float], value: float) -> Optional[float]:
        if base is None:
            return None
        return base - value

    @staticmethod
    def _saved_pct(base: Optional[float], value: float) -> Optional[float]:
        if base is None or base <= 0:
            return None
        return 100.0 * (base - value) / base

    @property
    def trips_saved(self) -> Optional[float]:
        return self._saved(self.baseline_vehicle_trips, self.vehicle_trips)

    @property
    def vkt_saved(self) -> Optional[float]:
        return self._saved(self.baseline_vkt, self.vkt)

    @property
    def vkt_saved_pct(self) -> Optional[float]:
        return self._saved_pct(self.baseline_vkt, self.vkt)

    @property
    def vht_saved(self) -> Optional[float]:
        return self._saved(self.baseline_vht, self.vht)

    @property
    def vht_saved_pct(self) -> Optional[float]:
        return self._saved_pct(self.baseline_vht, self.vht)
