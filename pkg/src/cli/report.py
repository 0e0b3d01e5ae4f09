"""
Run reports: tabular outputs, the plain-text summary and solution persistence.
"""
import json
import os
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
import pandas as pd

from src import config
from src.assign import FLOW_TOL
from src.assign.modalcosts import generalized_costs
from src.assign.models import EquilibriumSolution, FlowState
from src.assign.problem import DA, PT, RD, RP, Problem
from src.cli import logger
from src.cli.models import RunReport
from src.share.modes import ALL_MODES, MODE_INDEX

SOLUTION_FILE = "solution.npz"
RUN_FILE = "run.json"
STATE_ARRAYS = ["q", "Z", "F", "level_flows", "da_flows", "pt_flows", "x_veh"]


def _shares(columns: np.ndarray) -> Dict[str, float]:
    total = float(columns.sum())
    if total <= 0:
        return {m.value: 0.0 for m in ALL_MODES}
    return {m.value: float(columns[MODE_INDEX[m]] / total) for m in ALL_MODES}


def modal_shares(state: FlowState) -> Dict[str, float]:
    return _shares(state.q.sum(axis=0))


def effective_shares(problem: Problem, state: FlowState) -> Dict[str, float]:
    """Unmatched drivers count as DA and unmatched passengers as PT."""
    quit_rd = problem.quit_rd(state.q, state.F)
    pool = problem.rp_pool(state.q, state.F)
    columns = np.array([
        float((state.q[:, DA] + quit_rd).sum()),
        float((state.q[:, RD] - quit_rd).sum()),
        float((state.q[:, RP] - pool).sum()),
        float((state.q[:, PT] + pool).sum()),
    ])
    return _shares(columns)


def network_performance(problem: Problem, state: FlowState, times: np.ndarray, pt_times: np.ndarray,
                        pce: float = config.PT_PCE) -> Tuple[float, float, float]:
    """
    Vehicle trips, VKT and VHT. Every RD driver is a vehicle trip whether matched or not;
    PT enters VKT and VHT at `pce` car equivalents. VHT is flow times link time over 60.
    """
    length = problem.network.arrays.length
    pt = state.pt_flows.sum(axis=0)
    trips = float(state.q[:, DA].sum() + state.q[:, RD].sum())
    vkt = float(state.x_veh @ length) + pce * float(pt @ length)
    vht = (float(state.x_veh @ times) + pce * float(pt @ pt_times)) / 60.0
    return trips, vkt, vht


def detour_and_sharing(problem: Problem, state: FlowState) -> Tuple[float, float]:
    """Flow-weighted mean of driven over solo distance, and of shared over driven distance."""
    if not problem.num_sequences or state.F.sum() <= FLOW_TOL:
        return 0.0, 0.0
    length = problem.network.arrays.length
    graph = problem.network.to_digraph(length)
    solo = {}
    weight = detour = shared = 0.0
    for n, seq in enumerate(problem.sequences):
        if state.F[n] <= FLOW_TOL:
            continue
        od = seq.driver_od
        if od not in solo:
            solo[od] = nx.shortest_path_length(graph, od[0], od[1], weight="weight")
        driven = on_board = 0.0
        for lod, status in zip(problem.seq_levels[n], seq.status):
            if lod.virtual:
                continue
            d = float(state.level_flows[problem.level_row(n, lod.level)] @ length) / state.F[n]
            driven += d
            if status >= 0:
                on_board += d
        weight += state.F[n]
        detour += state.F[n] * (driven / solo[od] if solo[od] > 0 else 1.0)
        shared += state.F[n] * (on_board / driven if driven > 0 else 0.0)
    return detour / weight, shared / weight


def build_run_report(name: str, solution: EquilibriumSolution, baseline: Optional[EquilibriumSolution] = None,
                     verified: Optional[bool] = None, pce: float = config.PT_PCE) -> RunReport:
    problem, state, snapshot = solution.problem, solution.state, solution.snapshot
    times = snapshot.times if snapshot is not None else problem.network.arrays.free_flow_time
    pt_times = snapshot.pt_times if snapshot is not None else problem.network.arrays.free_flow_time
    trips, vkt, vht = network_performance(problem, state, times, pt_times, pce)
    detour, sharing = detour_and_sharing(problem, state)
    last = solution.last_gap
    report = RunReport(
        name=name,
        converged=solution.converged,
        warm_started=solution.warm_started,
        verified=verified,
        shares=modal_shares(state),
        effective_shares=effective_shares(problem, state),
        vehicle_trips=trips,
        vkt=vkt,
        vht=vht,
        mean_detour=detour,
        mean_shared_fraction=sharing,
        num_sequences=problem.num_sequences,
        inner_iterations=solution.inner_iterations,
        outer_iterations=solution.outer_iterations,
        final_g_m=last.g_m if last else 0.0,
        final_g_n=last.g_n if last else 0.0,
        wall_time=solution.wall_time,
    )
    if baseline is not None:
        b = baseline.snapshot
        b_times = b.times if b is not None else baseline.problem.network.arrays.free_flow_time
        b_pt = b.pt_times if b is not None else baseline.problem.network.arrays.free_flow_time
        b_trips, b_vkt, b_vht = network_performance(baseline.problem, baseline.state, b_times, b_pt, pce)
        report = report.copy(update={
            "baseline_shares": modal_shares(baseline.state),
            "baseline_vehicle_trips": b_trips,
            "baseline_vkt": b_vkt,
            "baseline_vht": b_vht,
        })
    return report


def link_table(solution: EquilibriumSolution) -> pd.DataFrame:
    problem, state, snapshot = solution.problem, solution.state, solution.snapshot
    arrays = problem.network.arrays
    return pd.DataFrame({
        "tail": [link.tail for link in problem.network.links],
        "head": [link.head for link in problem.network.links],
        "vehicle_flow": state.x_veh,
        "da_class_flow": state.da_flows.sum(axis=0),
        "sequence_flow": state.level_flows.sum(axis=0),
        "pt_flow": state.pt_flows.sum(axis=0),
        "time": snapshot.times if snapshot is not None else arrays.free_flow_time,
        "length": arrays.length,
        "capacity": arrays.capacity,
    })


def sequence_table(solution: EquilibriumSolution) -> pd.DataFrame:
    """One row per sequence and one quit row per driver od, with realized and generalized costs."""
    problem, state = solution.problem, solution.state
    rows = []
    for w in sorted(solution.evaluations):
        evaluation = solution.evaluations[w]
        generalized = generalized_costs(evaluation)
        for o, g in zip(evaluation.options, generalized):
            used = o.flow > FLOW_TOL
            row = {
                "driver_od": str(problem.ods[w]),
                "rd_cost": o.rd_realized if used else o.rd_cost,
                "effective_cost": o.realized_cost if used else o.min_cost,
                "generalized_cost": g,
                "flow": o.flow,
            }
            if o.is_quit:
                row.update({"sequence": "quit", "tasks": "", "passenger_ods": "", "r_value": 0.0, "Z": np.nan, "rp_cost": ""})
            else:
                seq = problem.sequences[o.sequence_id]
                row.update({
                    "sequence": str(o.sequence_id),
                    "tasks": seq.label(),
                    "passenger_ods": ";".join(str(od) for od in seq.passenger_ods),
                    "r_value": seq.r_value,
                    "Z": float(state.Z[o.sequence_id]),
                    "rp_cost": ";".join(f"{c:.4f}" for _, c in o.slot_costs),
                })
            rows.append(row)
    columns = ["driver_od", "sequence", "tasks", "passenger_ods", "r_value", "Z", "flow",
               "rd_cost", "rp_cost", "effective_cost", "generalized_cost"]
    return pd.DataFrame(rows, columns=columns)


def mode_table(solution: EquilibriumSolution) -> pd.DataFrame:
    problem, state = solution.problem, solution.state
    costs = solution.modal_costs.cost if solution.modal_costs is not None else np.zeros_like(state.q)
    quit_rd = problem.quit_rd(state.q, state.F)
    pool = problem.rp_pool(state.q, state.F)
    rows = []
    for w, od in enumerate(problem.ods):
        row = {"origin": od[0], "destination": od[1], "total": float(problem.total[w])}
        for m in ALL_MODES:
            row[f"q_{m.value}"] = float(state.q[w, MODE_INDEX[m]])
            row[f"cost_{m.value}"] = float(costs[w, MODE_INDEX[m]])
        row["rd_unmatched"] = float(quit_rd[w])
        row["rp_unmatched"] = float(pool[w])
        rows.append(row)
    return pd.DataFrame(rows)


def gap_table(solution: EquilibriumSolution) -> pd.DataFrame:
    return pd.DataFrame([g.dict() for g in solution.gaps])


def format_summary(report: RunReport) -> str:
    lines = [f"Scenario: {report.name}",
             f"Converged: {report.converged}   Verified: {'n/a' if report.verified is None else report.verified}",
             f"Iterations: {report.inner_iterations} inner, {report.outer_iterations} outer, "
             f"final G_M {report.final_g_m:.3e}, G_N {report.final_g_n:.3e}",
             f"Sequences: {report.num_sequences}",
             "",
             f"{'mode':<6}{'share':>10}{'effective':>12}{'baseline':>12}"]
    for m in ALL_MODES:
        base = report.baseline_shares.get(m.value)
        base_text = f"{100 * base:>11.2f}%" if base is not None else f"{'':>12}"
        lines.append(f"{m.value:<6}{100 * report.shares.get(m.value, 0.0):>9.2f}%"
                     f"{100 * report.effective_shares.get(m.value, 0.0):>11.2f}%{base_text}")
    lines.append("")
    lines.append(f"Vehicle trips: {report.vehicle_trips:.1f}   VKT: {report.vkt:.1f}   VHT: {report.vht:.1f}")
    if report.baseline_vkt is not None:
        lines.append(f"Saved vs baseline: trips {report.trips_saved:.1f}, VKT {report.vkt_saved:.1f} "
                     f"({report.vkt_saved_pct or 0.0:.2f}%), VHT {report.vht_saved:.1f} ({report.vht_saved_pct or 0.0:.2f}%)")
    lines.append(f"Mean RD detour: {report.mean_detour:.3f}   Mean shared fraction: {report.mean_shared_fraction:.3f}")
    lines.append(f"Wall time: {report.wall_time:.1f}s")
    return "\n".join(lines) + "\n"


def save_solution(out_dir: str, solution: EquilibriumSolution, scenario_path: Optional[str], extra: Optional[dict] = None):
    state = solution.state
    np.savez(os.path.join(out_dir, SOLUTION_FILE), **{name: getattr(state, name) for name in STATE_ARRAYS})
    meta = {
        "scenario": scenario_path,
        "converged": solution.converged,
        "inner_iterations": solution.inner_iterations,
        "outer_iterations": solution.outer_iterations,
        "num_sequences": solution.problem.num_sequences,
    }
    meta.update(extra or {})
    with open(os.path.join(out_dir, RUN_FILE), "w") as f:
        json.dump(meta, f, indent=2)


def load_solution(solution_dir: str) -> Tuple[dict, FlowState]:
    with open(os.path.join(solution_dir, RUN_FILE)) as f:
        meta = json.load(f)
    with np.load(os.path.join(solution_dir, SOLUTION_FILE)) as data:
        state = FlowState(**{name: data[name] for name in STATE_ARRAYS})
    return meta, state


def write_reports(out_dir: str, report: RunReport, solution: EquilibriumSolution,
                  scenario_path: Optional[str] = None) -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, table in (("links.csv", link_table(solution)), ("sequences.csv", sequence_table(solution)),
                        ("modes.csv", mode_table(solution)), ("gaps.csv", gap_table(solution))):
        path = os.path.join(out_dir, name)
        table.to_csv(path, index=False)
        written.append(path)
    summary = os.path.join(out_dir, "summary.txt")
    with open(summary, "w") as f:
        f.write(format_summary(report))
    written.append(summary)
    save_solution(out_dir, solution, scenario_path, {"report": report.dict()})
    written += [os.path.join(out_dir, SOLUTION_FILE), os.path.join(out_dir, RUN_FILE)]
    logger.info(f"Wrote {len(written)} files to {out_dir}")
    return written


def write_residuals(out_dir: str, rows: List[dict]) -> str:
    path = os.path.join(out_dir, "residuals.csv")
    pd.DataFrame(rows, columns=["family", "value", "witness"]).to_csv(path, index=False)
    return path


def write_sweep(out_dir: str, parameter: str, points: List[Tuple[float, RunReport]]) -> str:
    rows = []
    for value, report in points:
        row = {parameter: value, "converged": report.converged, "warm_started": report.warm_started,
               "error": report.error or ""}
        for m in ALL_MODES:
            row[f"share_{m.value}"] = report.shares.get(m.value, np.nan)
            row[f"effective_{m.value}"] = report.effective_shares.get(m.value, np.nan)
        row.update({"vkt": report.vkt, "vht": report.vht, "vkt_saved_pct": report.vkt_saved_pct,
                    "vht_saved_pct": report.vht_saved_pct, "trips_saved": report.trips_saved})
        rows.append(row)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "sweep.csv")
    pd.DataFrame(rows).to_csv(path, index=False)
    logger.info(f"Wrote {len(rows)} sweep points to {path}")
    return path
