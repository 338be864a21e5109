# tests/test_config.py
from pathlib import Path

import pytest

from roadhawkes.cli import build_parser
from roadhawkes.commands import CORE_COMMANDS, command, is_command
from roadhawkes.commands.base import RunConfig, format_table
from roadhawkes.commands.config import build_run_config, parse_sweep, read_config_file
from roadhawkes.errors import ConfigError
from tests.helpers import write_lines


def _args(*argv: str):
    return build_parser().parse_args(list(argv))


# ---------- config files ----------
def test_read_config_file(tmp_path: Path) -> None:
    path = write_lines(
        tmp_path / "fit.cfg",
        [
            "# a run",
            "events = data/events.csv",
            "out-dir = runs/a   # trailing comment",
            "",
            "bandwidth-g = 15",
            "MAX_ITERS=7",
        ],
    )
    assert read_config_file(path) == {
        "events": "data/events.csv",
        "out_dir": "runs/a",
        "omega_g": "15",
        "max_iters": "7",
    }


def test_unknown_key_names_the_line(tmp_path: Path) -> None:
    path = write_lines(tmp_path / "x.cfg", ["seed = 1", "colour = red"])
    with pytest.raises(ConfigError, match=r"x\.cfg:2: unknown key 'colour'"):
        read_config_file(path)


def test_line_without_equals(tmp_path: Path) -> None:
    path = write_lines(tmp_path / "x.cfg", ["seed 1"])
    with pytest.raises(ConfigError, match="key=value"):
        read_config_file(path)


def test_missing_config_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="no such config file"):
        read_config_file(tmp_path / "nope.cfg")


# ---------- sweeps ----------
def test_parse_sweep() -> None:
    assert parse_sweep("g=10,20,40") == ("g", (10.0, 20.0, 40.0))
    assert parse_sweep("h = 500, 1000") == ("h", (500.0, 1000.0))


@pytest.mark.parametrize("text", ["g", "q=1,2", "g=", "g=1,two"])
def test_parse_sweep_rejects(text: str) -> None:
    with pytest.raises(ConfigError):
        parse_sweep(text)


# ---------- merging flags and files ----------
def test_flags_win_over_file() -> None:
    args = _args("fit", "--events", "a.csv", "--bandwidth-g", "15")
    cfg = build_run_config(
        "fit",
        args,
        {"events": "b.csv", "omega_g": "30", "out_dir": "runs", "disable": "trend, weekly", "max_iters": "7"},
    )
    assert cfg.events == Path("a.csv")
    assert cfg.out_dir == Path("runs")
    assert cfg.fit.omega_g == 15.0
    assert cfg.fit.max_iters == 7
    assert cfg.disable == frozenset({"trend", "weekly"})
    assert cfg.enabled == frozenset({"daily", "spatial", "triggering"})


def test_disable_flag_replaces_file_value() -> None:
    args = _args("fit", "--disable", "trend", "--disable", "triggering")
    cfg = build_run_config("fit", args, {"disable": "weekly"})
    assert cfg.disable == frozenset({"trend", "triggering"})


def test_no_monotone_and_tolerance() -> None:
    cfg = build_run_config("fit", _args("fit", "--no-monotone", "--tol", "1e-6"))
    assert cfg.fit.monotone is False
    assert cfg.fit.tol == 1e-6


def test_mode_spellings() -> None:
    assert build_run_config("validate", _args("validate", "--out-of-sample")).mode == "out_of_sample"
    assert build_run_config("validate", _args("validate", "--mode", "in-sample")).mode == "in_sample"
    assert build_run_config("validate", _args("validate"), {"mode": "out-of-sample"}).mode == "out_of_sample"
    with pytest.raises(ConfigError, match="mode"):
        build_run_config("validate", _args("validate"), {"mode": "sideways"})


def test_sweep_from_flag() -> None:
    cfg = build_run_config("fit", _args("fit", "--bandwidth-sweep", "g=10,20"))
    assert cfg.bandwidth_sweep == ("g", (10.0, 20.0))


def test_bad_number_in_file() -> None:
    with pytest.raises(ConfigError, match="seed"):
        build_run_config("simulate", _args("simulate"), {"seed": "seven"})


# ---------- run config checks ----------
def test_run_config_rejects() -> None:
    with pytest.raises(ConfigError, match="speed"):
        RunConfig("fit", disable=frozenset({"speed"}))
    with pytest.raises(ConfigError, match="threshold"):
        RunConfig("localize", threshold_pct=100.0)
    with pytest.raises(ConfigError, match="seed"):
        RunConfig("simulate", seed=-1)


def test_require(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="needs --events"):
        RunConfig("fit").require("events")
    with pytest.raises(ConfigError, match="no such file"):
        RunConfig("fit", events=tmp_path / "missing.csv").require("events")
    path = write_lines(tmp_path / "e.csv", ["t_min,x_m"])
    assert RunConfig("fit", events=path).require("events") == [path]


# ---------- commands ----------
def test_core_commands_are_registered() -> None:
    assert sorted(CORE_COMMANDS) == ["fit", "localize", "report", "simulate", "validate"]
    assert is_command("fit")
    assert not is_command("plot")
    assert command("simulate", RunConfig("simulate")).COMMAND == "simulate"


def test_format_table() -> None:
    text = format_table(["model", "A"], [["Poisson", None], ["Full", 0.123456789]])
    assert text.splitlines() == [
        "model    A",
        "-------  --------",
        "Poisson  -",
        "Full     0.123457",
    ]
