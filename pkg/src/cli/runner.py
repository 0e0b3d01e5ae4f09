import concurrent.futures
import os
import time
from typing import List, Optional, Tuple

from src import config
from src.assign.models import EquilibriumSolution
from src.assign.problem import Demands, Problem
from src.assign.solver import solve
from src.cli import EXIT_NOT_CONVERGED, EXIT_OK, EXIT_VERIFY_FAILED, logger
from src.cli.models import RunReport, ScenarioConfig
from src.cli.report import build_run_report, load_solution, write_reports, write_residuals, write_sweep
from src.cli.scenario import build_pool, load_instance, load_scenario, solver_config
from src.matchgen.models import SequencePool
from src.matchgen.pool import dump_sequences
from src.netio.models import ModeCostParams, Network
from src.oracle.verify import ResidualReport, verify_solution

VERIFY_TOLERANCE = 1e-2

SolvedPair = Tuple[EquilibriumSolution, EquilibriumSolution]


def apply_parameter(cfg: ScenarioConfig, parameter: str, value: float) -> ScenarioConfig:
    """
    nu_d_rd sets the RD distance price and the RP one at half of it;
    alpha_driver sets the value of time of DA and RD together.
    """
    p: ModeCostParams = cfg.mode_params
    if parameter == "nu_d_rd":
        params = p.copy(update={"RD": p.RD.copy(update={"nu_d": value}), "RP": p.RP.copy(update={"nu_d": 0.5 * value})})
    elif parameter == "alpha_driver":
        params = p.copy(update={"DA": p.DA.copy(update={"alpha": value}), "RD": p.RD.copy(update={"alpha": value})})
    else:
        raise ValueError(f"unknown sweep parameter {parameter!r}")
    return cfg.copy(update={"mode_params": params})


def should_verify(cfg: ScenarioConfig, network: Network) -> bool:
    if cfg.verify == "always":
        return True
    if cfg.verify == "never":
        return False
    return network.num_nodes <= config.ORACLE_MAX_NODES


def solve_pair(cfg: ScenarioConfig, network: Network, demands: Demands, pool: SequencePool,
               warm: Optional[SolvedPair] = None) -> SolvedPair:
    """
    Ridesharing scenario and its baseline: same network, demand and prices, empty sequence pool.
    `warm` is an earlier pair of the same instance to start both runs from.
    """
    settings = solver_config(cfg)
    solution = solve(network, demands, pool, settings, warm_start=warm[0] if warm else None)
    logger.info(f"{cfg.name}: ridesharing run {'converged' if solution.converged else 'did not converge'} "
                f"in {solution.inner_iterations} inner iterations")
    baseline = solve(network, demands, SequencePool(), settings, warm_start=warm[1] if warm else None)
    logger.info(f"{cfg.name}: baseline run {'converged' if baseline.converged else 'did not converge'}")
    return solution, baseline


def run_scenario(cfg: ScenarioConfig, output_dir: Optional[str] = None, dump: bool = False,
                 verify: bool = True) -> Tuple[RunReport, int]:
    """Solves, verifies on desk-scale networks and writes every report; returns the report and exit code."""
    started = time.time()
    out_dir = output_dir or os.path.join(cfg.output_dir, cfg.name)
    os.makedirs(out_dir, exist_ok=True)
    network, demands = load_instance(cfg)
    pool = build_pool(cfg, network, demands)
    if dump:
        dump_sequences(pool, os.path.join(out_dir, "sequences.jsonl"))

    solution, baseline = solve_pair(cfg, network, demands, pool)
    residuals: Optional[ResidualReport] = None
    if verify and should_verify(cfg, network):
        residuals = verify_solution(solution.problem, solution.state, VERIFY_TOLERANCE, solution.snapshot)
        write_residuals(out_dir, residuals.rows())
    verified = residuals.passed(VERIFY_TOLERANCE) if residuals is not None else None

    report = build_run_report(cfg.name, solution, baseline, verified)
    report = report.copy(update={"wall_time": time.time() - started})
    write_reports(out_dir, report, solution, cfg.path)

    if not solution.converged:
        return report, EXIT_NOT_CONVERGED
    if verified is False:
        logger.error(f"Verification failed: {residuals.worst().family} {residuals.worst().value:.3e} "
                     f"({residuals.worst().witness})")
        return report, EXIT_VERIFY_FAILED
    return report, EXIT_OK


def _sweep_point(cfg: ScenarioConfig, network: Network, demands: Demands, pool: SequencePool,
                 parameter: str, value: float, warm: Optional[SolvedPair] = None) -> Tuple[RunReport, Optional[SolvedPair]]:
    point = apply_parameter(cfg, parameter, value)
    name = f"{cfg.name}[{parameter}={value:g}]"
    try:
        pair = solve_pair(point, network, demands, pool, warm)
        return build_run_report(name, *pair), pair
    except Exception as e:
        logger.error(f"Sweep point {name} failed: {e}")
        return RunReport(name=name, converged=False, error=str(e)), None


def sweep(cfg: ScenarioConfig, parameter: str, grid: List[float], threads: int = 1,
          output_dir: Optional[str] = None) -> List[Tuple[float, RunReport]]:
    """
    One ridesharing run and one baseline per grid point. The sequence pool does not depend on
    prices, so it is built once and shared. Serial sweeps start every point from the last
    solved one; threaded sweeps solve their points cold. A failed point is recorded, never raised.
    """
    network, demands = load_instance(cfg)
    pool = build_pool(cfg, network, demands)
    reports = {}
    if threads > 1 and len(grid) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
            futures = {executor.submit(_sweep_point, cfg, network, demands, pool, parameter, v): i
                       for i, v in enumerate(grid)}
            for future in concurrent.futures.as_completed(futures):
                reports[futures[future]] = future.result()[0]
    else:
        warm = None
        for i, v in enumerate(grid):
            reports[i], solved = _sweep_point(cfg, network, demands, pool, parameter, v, warm)
            warm = solved or warm
    points = [(v, reports[i]) for i, v in enumerate(grid)]
    write_sweep(output_dir or os.path.join(cfg.output_dir, cfg.name), parameter, points)
    return points


def verify_directory(solution_dir: str, tolerance: float = VERIFY_TOLERANCE) -> Tuple[ResidualReport, int]:
    """Rebuilds the instance named in run.json, checks the saved arrays and writes residuals.csv."""
    meta, state = load_solution(solution_dir)
    if not meta.get("scenario"):
        raise FileNotFoundError(f"{solution_dir}: run.json does not name a scenario file")
    cfg = load_scenario(meta["scenario"])
    network, demands = load_instance(cfg)
    pool = build_pool(cfg, network, demands)
    problem = Problem(network, demands, pool, solver_config(cfg))
    residuals = verify_solution(problem, state, tolerance)
    write_residuals(solution_dir, residuals.rows())
    print(residuals.format())
    return residuals, EXIT_OK if residuals.passed(tolerance) else EXIT_VERIFY_FAILED
