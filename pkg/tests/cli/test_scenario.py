import os

import pytest

from src.cli import ScenarioConfigError
from src.cli.runner import apply_parameter, should_verify
from src.cli.scenario import build_pool, load_instance, load_scenario, solver_config
from src.netio.costs import PT_CONGESTED
from src.netio.models import DemandTable
from src.share.modes import Mode


def write_ini(tmp_path, text, name="scenario.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_load_illustrative(resources_dir):
    cfg = load_scenario(os.path.join(resources_dir, "illustrative.ini"))
    assert cfg.name == "illustrative"
    assert cfg.builtin == "illustrative"
    assert cfg.solver.pt_time == PT_CONGESTED
    assert cfg.solver.mode_choice is False
    assert cfg.solver.max_inner == 500
    assert cfg.matching.detour_factor == 3.0
    assert cfg.mode_params.RD.fixed_shared == 10.0
    assert cfg.verify == "always"
    assert solver_config(cfg).mode_params == cfg.mode_params


def test_load_two_route_resolves_paths(resources_dir):
    cfg = load_scenario(os.path.join(resources_dir, "two_route.ini"))
    assert cfg.net_file == os.path.join(os.path.abspath(resources_dir), "two_route_net.tntp")
    assert cfg.mode_params.PT.alpha == 0.4
    assert cfg.mode_params.DA.alpha == 1.0
    assert cfg.matching.enabled is False
    assert cfg.sweep.grid() == pytest.approx([0.8, 1.0, 1.2])


def test_two_route_instance(resources_dir):
    cfg = load_scenario(os.path.join(resources_dir, "two_route.ini"))
    network, demands = load_instance(cfg)
    assert network.num_nodes == 4
    assert isinstance(demands, DemandTable)
    assert demands.total() == 200.0
    assert len(build_pool(cfg, network, demands)) == 0
    assert should_verify(cfg, network)


def test_illustrative_pool(resources_dir):
    cfg = load_scenario(os.path.join(resources_dir, "illustrative.ini"))
    network, demands = load_instance(cfg)
    assert demands[Mode.RD].total() == 40000.0
    assert len(build_pool(cfg, network, demands)) == 12


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioConfigError):
        load_scenario(str(tmp_path / "nope.ini"))


def test_unknown_builtin(tmp_path):
    with pytest.raises(ScenarioConfigError):
        load_scenario(write_ini(tmp_path, "[scenario]\nbuiltin = anaheim\n"))


def test_network_required(tmp_path):
    with pytest.raises(ScenarioConfigError):
        load_scenario(write_ini(tmp_path, "[demand]\ntrips_file = t.tntp\n"))


def test_trip_sources_are_exclusive(tmp_path):
    text = "[network]\nnet_file = n.tntp\n[demand]\ntrips_file = t.tntp\nrd_trips = rd.tntp\n"
    with pytest.raises(ScenarioConfigError):
        load_scenario(write_ini(tmp_path, text))


def test_per_mode_tables(tmp_path):
    text = "[network]\nnet_file = n.tntp\n[demand]\nrd_trips = rd.tntp\nrp_trips = rp.tntp\ndemand_scale = 0.5\n"
    cfg = load_scenario(write_ini(tmp_path, text))
    assert sorted(cfg.mode_trips) == ["RD", "RP"]
    assert cfg.mode_trips["RD"] == str(tmp_path / "rd.tntp")
    assert cfg.demand_scale == 0.5


@pytest.mark.parametrize("section", [
    "[run]\nverify = sometimes\n",
    "[matching]\ncapacity = 0\n",
    "[sweep]\nparameter = gamma\nfrom = 0\n",
    "[solver]\nepsilon_m = 0\n",
])
def test_invalid_values(tmp_path, section):
    with pytest.raises(ScenarioConfigError):
        load_scenario(write_ini(tmp_path, "[scenario]\nbuiltin = illustrative\n" + section))


def test_apply_parameter(resources_dir):
    cfg = load_scenario(os.path.join(resources_dir, "illustrative.ini"))
    priced = apply_parameter(cfg, "nu_d_rd", 0.6)
    assert priced.mode_params.RD.nu_d == 0.6
    assert priced.mode_params.RP.nu_d == 0.3
    assert cfg.mode_params.RD.nu_d == 0.0
    slower = apply_parameter(cfg, "alpha_driver", 1.2)
    assert slower.mode_params.DA.alpha == 1.2 and slower.mode_params.RD.alpha == 1.2
    assert slower.mode_params.RD.fixed_shared == 10.0
    with pytest.raises(ValueError):
        apply_parameter(cfg, "gamma", 1.0)
