# tests/test_series.py
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from roadhawkes.errors import LocalizationError
from roadhawkes.loops.series import (
    LoopNetwork,
    cell_median,
    clock_keys,
    load_loops,
    profile_lookup,
    rolling_average,
    save_loops,
    seasonal_median,
    seasonal_profile,
    seasonal_quantiles,
)
from roadhawkes.loops.synthetic import PlantedIncident, history_minutes, synthetic_network
from tests.helpers import write_lines

WEEK = 10080


# ---------- smoothing ----------
def test_rolling_average_tail() -> None:
    out = rolling_average(pd.Series([0.0, 0.0, 0.0, 0.0, 10.0]))
    assert out.iloc[-1] == 2.0


def test_rolling_average_constant() -> None:
    s = pd.Series(np.full(20, 7.5))
    assert rolling_average(s).tolist() == s.tolist()


def test_rolling_average_skips_gaps() -> None:
    out = rolling_average(pd.Series([10.0, np.nan, 20.0]))
    assert out.tolist() == [10.0, 10.0, 15.0]


def test_rolling_average_rejects() -> None:
    with pytest.raises(LocalizationError):
        rolling_average(pd.Series([], dtype=float))
    with pytest.raises(LocalizationError):
        rolling_average(pd.Series([1.0]), window=0)


# ---------- seasonal medians ----------
def test_cell_median_even_count() -> None:
    assert cell_median([50.0, 60.0, 70.0, 80.0]) == 65.0


def test_cell_median_needs_four_samples() -> None:
    assert np.isnan(cell_median([50.0, 60.0, 70.0]))
    assert cell_median([50.0, 60.0, 70.0], min_samples=3) == 60.0
    assert np.isnan(cell_median([50.0, np.nan, 60.0, 70.0]))


def test_clock_keys_with_anchor() -> None:
    weekday, minute = clock_keys(np.array([0, 1440 * 6 - 510]), 1950.0)
    assert weekday.tolist() == [1, 0]
    assert minute.tolist() == [510, 0]


def _weekly_frame() -> pd.DataFrame:
    t = [0, WEEK, 2 * WEEK, 3 * WEEK, 1, WEEK + 1, 2 * WEEK + 1]
    speed = [50.0, 60.0, 70.0, 80.0, 90.0, 91.0, 92.0]
    df = pd.DataFrame({"speed": speed, "flow": 1.0, "occ": 5.0}, index=pd.Index(t, name="t"))
    return df.sort_index()


def test_seasonal_profile_cells() -> None:
    prof = seasonal_profile(_weekly_frame())
    assert prof.loc[(0, 0), "speed"] == 65.0
    assert np.isnan(prof.loc[(0, 1), "speed"])


def test_seasonal_median_single_cell() -> None:
    med = seasonal_median(_weekly_frame(), 0, 0)
    assert med["speed"] == 65.0
    assert med["occ"] == 5.0


def test_seasonal_quantiles() -> None:
    q = seasonal_quantiles(_weekly_frame(), quantiles=(0.0, 1.0))
    assert q[0.0].loc[(0, 0), "speed"] == 50.0
    assert q[1.0].loc[(0, 0), "speed"] == 80.0


def test_profile_lookup_marks_missing() -> None:
    prof = seasonal_profile(_weekly_frame())
    got = profile_lookup(prof, np.array([4 * WEEK, 4 * WEEK + 1, 4 * WEEK + 2]), 0.0)
    assert got["speed"].iloc[0] == 65.0
    assert got["speed"].iloc[1:].isna().all()
    assert got.index.tolist() == [4 * WEEK, 4 * WEEK + 1, 4 * WEEK + 2]


# ---------- networks and files ----------
def test_network_orders_by_position() -> None:
    df = pd.DataFrame(
        {
            "t": [0, 0, 1],
            "loop_id": ["b", "a", "a"],
            "pos": [900.0, 100.0, 100.0],
            "speed": 100.0,
            "flow": 10.0,
            "occ": 5.0,
        }
    )
    net = LoopNetwork.from_frame(df)
    assert [lp.loop_id for lp in net] == ["a", "b"]
    assert net[1].frame["speed"].isna().tolist() == [False, True]


def test_network_rejects_bad_loops() -> None:
    two_pos = pd.DataFrame(
        {"t": [0, 1], "loop_id": ["a", "a"], "pos": [1.0, 2.0], "speed": 1.0, "flow": 1.0, "occ": 1.0}
    )
    with pytest.raises(LocalizationError):
        LoopNetwork.from_frame(two_pos)
    same_pos = pd.DataFrame(
        {"t": [0, 0], "loop_id": ["a", "b"], "pos": [1.0, 1.0], "speed": 1.0, "flow": 1.0, "occ": 1.0}
    )
    with pytest.raises(LocalizationError):
        LoopNetwork.from_frame(same_pos)


def test_save_then_load(tmp_path: Path) -> None:
    net = synthetic_network([0.0, 500.0, 1200.0], history_minutes(1, 0, 30), np.random.default_rng(1))
    save_loops(net, tmp_path / "loops.csv")
    back = load_loops(tmp_path / "loops.csv")
    assert back.positions.tolist() == [0.0, 500.0, 1200.0]
    for a, b in zip(net, back):
        assert np.array_equal(a.frame.to_numpy(), b.frame.to_numpy())


def test_load_reads_anchor(tmp_path: Path) -> None:
    path = write_lines(
        tmp_path / "loops.csv",
        ["#anchor=tue,08:30", "t_min,loop_id,pos_m,speed_kmh,flow_vpm,occ_pct", "0,L0,10,100,20,8"],
    )
    assert load_loops(path).origin == 1950.0


def test_load_rejects_missing_columns(tmp_path: Path) -> None:
    path = write_lines(tmp_path / "loops.csv", ["t_min,loop_id,pos_m,speed_kmh", "0,L0,10,100"])
    with pytest.raises(LocalizationError, match="occ_pct"):
        load_loops(path)


def test_load_rejects_fractional_minutes(tmp_path: Path) -> None:
    path = write_lines(
        tmp_path / "loops.csv",
        ["t_min,loop_id,pos_m,speed_kmh,flow_vpm,occ_pct", "0.5,L0,10,100,20,8"],
    )
    with pytest.raises(LocalizationError, match="whole minutes"):
        load_loops(path)


# ---------- synthetic data ----------
def test_history_minutes() -> None:
    assert history_minutes(2, 0, 3).tolist() == [0, 1, 2, WEEK, WEEK + 1, WEEK + 2]


def test_planted_incident_checks() -> None:
    with pytest.raises(LocalizationError):
        PlantedIncident(downstream=0, t_start=0.0, t_end=1.0)
    with pytest.raises(LocalizationError):
        PlantedIncident(downstream=2, t_start=0.0, t_end=1.0, queue_loops=0)


def test_synthetic_incident_depresses_upstream_loop() -> None:
    inc = PlantedIncident(downstream=2, t_start=100.0, t_end=120.0, speed_drop=40.0)
    minutes = history_minutes(1, 0, 200)
    calm = synthetic_network([0.0, 1000.0, 2000.0], minutes, np.random.default_rng(5))
    hit = synthetic_network([0.0, 1000.0, 2000.0], minutes, np.random.default_rng(5), inc)
    during = slice(100, 120)
    drop = calm[1].frame["speed"].loc[during] - hit[1].frame["speed"].loc[during]
    assert drop.min() > 0.0
    assert hit[2].frame["speed"].equals(calm[2].frame["speed"])
    assert hit[0].frame["speed"].equals(calm[0].frame["speed"])
