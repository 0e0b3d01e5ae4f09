import os

import pandas as pd
import pytest

from src.cli.runner import sweep
from src.cli.scenario import build_pool, load_instance, load_scenario

pytestmark = pytest.mark.slow


@pytest.fixture
def corridor(resources_dir):
    return load_scenario(os.path.join(resources_dir, "corridor.ini"))


def test_corridor_has_a_single_sequence(corridor):
    network, demands = load_instance(corridor)
    pool = build_pool(corridor, network, demands)
    assert [s.label() for s in pool.sequences] == ["(1,2,3,4)"]


def test_ridesharing_follows_the_driver_price(tmp_path, corridor):
    # the shared leg costs beta + tau_d - nu_d per distance against beta when quitting:
    # dearer than driving alone up to nu_d = 0.2, cheaper beyond it
    points = dict(sweep(corridor, "nu_d_rd", [0.0, 0.1, 1.0], output_dir=str(tmp_path)))
    assert all(report.error is None for report in points.values())
    for price in (0.0, 0.1):
        assert points[price].effective_shares["RD"] < 1e-3
        assert points[price].effective_shares["RP"] < 1e-3
    assert points[1.0].effective_shares["RD"] > points[0.0].effective_shares["RD"]
    assert points[1.0].effective_shares["RP"] > 1e-3


def test_serial_sweep_starts_from_the_previous_point(tmp_path, corridor):
    points = sweep(corridor, "nu_d_rd", [0.0, 0.5, 1.0], output_dir=str(tmp_path))
    assert [report.warm_started for _, report in points] == [False, True, True]
    table = pd.read_csv(tmp_path / "sweep.csv")
    assert table["warm_started"].tolist() == [False, True, True]


def test_threaded_sweep_solves_cold(tmp_path, corridor):
    points = sweep(corridor, "nu_d_rd", [0.0, 1.0], threads=2, output_dir=str(tmp_path))
    assert [report.warm_started for _, report in points] == [False, False]
