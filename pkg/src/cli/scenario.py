"""
INI scenario files.

    [scenario]   name, builtin = illustrative
    [network]    net_file
    [demand]     trips_file, or da_trips / rd_trips / rp_trips / pt_trips, demand_scale
    [DA] [RD] [RP] [PT]   alpha, beta, tau_t, tau_d, nu_t, nu_d, fixed, fixed_shared
    [solver]     any EquilibriumConfig field
    [matching]   enabled, capacity, max_passengers, detour_factor, ...
    [sweep]      parameter, from, to, steps
    [run]        output_dir, threads, deterministic, verify

Relative paths resolve against the directory of the scenario file.
"""
import configparser
import os
from typing import Dict, Optional, Tuple

from pydantic import ValidationError

from src.assign.models import EquilibriumConfig
from src.assign.problem import Demands
from src.cli import ScenarioConfigError, logger
from src.cli.models import MatchingSettings, ScenarioConfig, SweepSpec
from src.matchgen.models import SequencePool
from src.matchgen.pool import build_sequence_pool
from src.netio.illustrative import illustrative_demands, illustrative_network, illustrative_params
from src.netio.models import DemandTable, ModeCoefficients, ModeCostParams, Network
from src.netio.tntp import read_network, read_trips
from src.share.modes import ALL_MODES, Mode

BUILTINS = ["illustrative"]


def _parse_value(raw: str) -> Optional[str]:
    """Raw option text; the pydantic models coerce numbers and yes/no flags."""
    value = raw.strip()
    if value.lower() in ("", "none"):
        return None
    return value


def _section(parser: configparser.ConfigParser, name: str) -> Dict[str, object]:
    if not parser.has_section(name):
        return {}
    return {k: _parse_value(v) for k, v in parser.items(name) if _parse_value(v) is not None}


def _resolve(base_dir: str, path: Optional[str]) -> Optional[str]:
    if path is None or os.path.isabs(path):
        return path
    return os.path.normpath(os.path.join(base_dir, path))


def _mode_params(parser: configparser.ConfigParser, base: ModeCostParams) -> ModeCostParams:
    update = {}
    for mode in ALL_MODES:
        values = _section(parser, mode.value)
        if values:
            current = base.for_mode(mode).dict()
            current.update(values)
            update[mode.value] = ModeCoefficients(**current)
    return base.copy(update=update)


def load_scenario(path: str) -> ScenarioConfig:
    if not os.path.exists(path):
        raise ScenarioConfigError(f"scenario file not found: {path}")
    parser = configparser.ConfigParser()
    # keys stay case-sensitive so mode sections read like the cost tables
    parser.optionxform = str
    try:
        parser.read(path)
    except configparser.Error as e:
        raise ScenarioConfigError(f"{path}: {e}") from e
    base_dir = os.path.dirname(os.path.abspath(path))

    scenario = _section(parser, "scenario")
    network = _section(parser, "network")
    demand = _section(parser, "demand")
    run = _section(parser, "run")
    builtin = scenario.get("builtin")
    if builtin is not None and builtin not in BUILTINS:
        raise ScenarioConfigError(f"unknown builtin network {builtin!r}, expected one of {BUILTINS}")
    base_params = illustrative_params() if builtin == "illustrative" else ModeCostParams()

    try:
        mode_params = _mode_params(parser, base_params)
        solver = EquilibriumConfig(**_section(parser, "solver"))
        matching = MatchingSettings(**_section(parser, "matching"))
        sweep = None
        if parser.has_section("sweep"):
            s = _section(parser, "sweep")
            sweep = SweepSpec(parameter=s.get("parameter"), start=s.get("from"), stop=s.get("to", s.get("from")),
                              steps=s.get("steps", 1))
        mode_trips = {m.value: _resolve(base_dir, demand[f"{m.value.lower()}_trips"])
                      for m in ALL_MODES if f"{m.value.lower()}_trips" in demand}
        cfg = ScenarioConfig(
            name=scenario.get("name", os.path.splitext(os.path.basename(path))[0]),
            path=os.path.abspath(path),
            builtin=builtin,
            net_file=_resolve(base_dir, network.get("net_file")),
            trips_file=_resolve(base_dir, demand.get("trips_file")),
            mode_trips=mode_trips,
            demand_scale=demand.get("demand_scale", 1.0),
            mode_params=mode_params,
            solver=solver.copy(update={"mode_params": mode_params}),
            matching=matching,
            sweep=sweep,
            output_dir=_resolve(base_dir, run.get("output_dir")) or ScenarioConfig.__fields__["output_dir"].default,
            threads=run.get("threads", ScenarioConfig.__fields__["threads"].default),
            deterministic=run.get("deterministic", False),
            verify=run.get("verify", "auto"),
        )
    except (ValidationError, TypeError) as e:
        raise ScenarioConfigError(f"{path}: {e}") from e

    if cfg.builtin is None and cfg.net_file is None:
        raise ScenarioConfigError(f"{path}: [network] net_file or [scenario] builtin is required")
    if cfg.builtin is None and cfg.trips_file is None and not cfg.mode_trips:
        raise ScenarioConfigError(f"{path}: [demand] needs trips_file or per-mode trip tables")
    if cfg.trips_file is not None and cfg.mode_trips:
        raise ScenarioConfigError(f"{path}: trips_file and per-mode trip tables are mutually exclusive")
    logger.info(f"Loaded scenario {cfg.name} from {path}")
    return cfg


def _scaled(table: DemandTable, scale: float) -> DemandTable:
    if scale == 1.0:
        return table
    return DemandTable(demands={od: q * scale for od, q in table.demands.items()})


def _without_intrazonal(table: DemandTable, what: str) -> DemandTable:
    kept = {od: q for od, q in table.demands.items() if od[0] != od[1]}
    dropped = len(table.demands) - len(kept)
    if dropped:
        logger.warning(f"Dropped {dropped} intra-zonal entries from {what}")
    return DemandTable(demands=kept)


def load_instance(cfg: ScenarioConfig) -> Tuple[Network, Demands]:
    """Network plus either one aggregate trip table (mode choice) or fixed per-mode tables."""
    if cfg.builtin == "illustrative":
        network = illustrative_network()
        demands: Demands = illustrative_demands()
    else:
        network = read_network(cfg.net_file)
        if cfg.trips_file:
            demands = read_trips(cfg.trips_file)
        else:
            demands = {Mode(m): read_trips(p) for m, p in cfg.mode_trips.items()}
    if isinstance(demands, DemandTable):
        demands = _without_intrazonal(_scaled(demands, cfg.demand_scale), "the trip table")
    else:
        demands = {m: _without_intrazonal(_scaled(t, cfg.demand_scale), f"{m.value} trips") for m, t in demands.items()}
    return network, demands


def solver_config(cfg: ScenarioConfig) -> EquilibriumConfig:
    """Solver settings carrying the scenario cost parameters; fixed per-mode tables freeze the split on their own."""
    return cfg.solver.copy(update={"mode_params": cfg.mode_params})


def build_pool(cfg: ScenarioConfig, network: Network, demands: Demands) -> SequencePool:
    """
    Sequences for every driver od against every passenger od: both come from the aggregate
    table under mode choice, from the RD and RP tables when the split is fixed.
    """
    if not cfg.matching.enabled:
        return SequencePool()
    if isinstance(demands, DemandTable):
        driver_ods = passenger_ods = demands.ods
    else:
        driver_ods = demands.get(Mode.RD, DemandTable()).ods
        passenger_ods = demands.get(Mode.RP, DemandTable()).ods
    if not driver_ods or not passenger_ods:
        return SequencePool()
    m = cfg.matching
    return build_sequence_pool(network, driver_ods, passenger_ods, capacity=m.capacity,
                               max_passengers=m.max_passengers, detour_factor=m.detour_factor,
                               same_od_passengers=m.same_od_passengers,
                               passenger_detour_factor=m.passenger_detour_factor,
                               max_sequences_per_driver_od=m.max_sequences_per_driver_od,
                               threads=cfg.effective_threads)
