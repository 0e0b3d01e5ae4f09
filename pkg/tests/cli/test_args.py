import pytest

from src.cli.args import get_args


def test_solve_defaults():
    args = get_args(["solve", "scenario.ini"])
    assert args.command == "solve"
    assert args.target == "scenario.ini"
    assert args.dump_sequences is False
    assert args.no_verify is False
    assert args.threads >= 1


def test_deterministic_forces_one_thread():
    args = get_args(["solve", "scenario.ini", "--threads", "8", "--deterministic"])
    assert args.threads == 1
    assert args.deterministic


def test_sweep_grid_flags():
    args = get_args(["sweep", "s.ini", "--param", "nu_d_rd", "--from", "0", "--to", "1", "--steps", "11"])
    assert (args.param, args.grid_from, args.grid_to, args.steps) == ("nu_d_rd", 0.0, 1.0, 11)


def test_verify_targets_a_directory():
    args = get_args(["verify", "out/illustrative", "--debug"])
    assert args.target == "out/illustrative"
    assert args.debug


def test_unknown_sweep_parameter():
    with pytest.raises(SystemExit):
        get_args(["sweep", "s.ini", "--param", "gamma"])


def test_command_required():
    with pytest.raises(SystemExit):
        get_args([])


def test_env_deterministic(monkeypatch):
    monkeypatch.setenv("RIDESHARE_DETERMINISTIC", "yes")
    assert get_args(["solve", "s.ini"]).deterministic
