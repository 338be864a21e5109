# roadhawkes/commands/core/localize.py

from __future__ import annotations

import argparse
import logging

import numpy as np

from roadhawkes.commands.base import Command, format_table
from roadhawkes.errors import ConfigError, LocalizationError
from roadhawkes.io import write_csv
from roadhawkes.loops.localizer import (
    link_speed,
    load_windows,
    localize,
    network_profiles,
    select_members,
    significance_filter,
)
from roadhawkes.loops.series import load_loops
from roadhawkes.process.catalog import (
    MINUTES_PER_DAY,
    Event,
    EventCatalog,
    StudyDomain,
    save_catalog,
)

log = logging.getLogger(__name__)

LOCALIZED_HEADER = [
    "t_min", "x_m", "t_end", "x_lo", "x_hi",
    "loop_up", "loop_down", "score", "low_confidence", "max_drop_pct", "kept",
]


class Localize(Command):
    """Place each event window's incident between two loop sensors.

    `roadhawkes localize --loops LOOPS --windows WINDOWS --out-dir DIR [--threshold-pct P]`

    ---

    ## Inputs

    - `LOOPS`: `t_min,loop_id,pos_m,speed_kmh,flow_vpm,occ_pct`, one row
      per loop and minute, loops numbered in the direction of travel.
    - `WINDOWS`: `t_start,t_end,x_lo,x_hi`, one row per reported event.

    ## Method

    Speed and occupancy are smoothed with a 5 minute trailing mean and
    compared to the weekday and time-of-day median. For each pair of
    neighbouring loops the event impact score is the jump in speed residual
    minus the jump in occupancy residual; the event is placed halfway
    between the pair with the largest score. Windows where no pair scores
    above zero fall back to the link midpoint with `low_confidence=1`.

    ## Significance

    `max_drop_pct` is the largest percentage fall of link speed below its
    seasonal median inside the window. With `--threshold-pct P` only
    windows reaching P are `kept`; raising P never adds events.

    With `--days` and `--length-m` the kept events are also written as a
    catalog, `DIR/events.csv`, ready for `fit`.
    """

    COMMAND = "localize"
    SUMMARY = "Localize events from loop-sensor data"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--loops", help="Loop-sensor CSV")
        parser.add_argument("--windows", help="Event window CSV")
        parser.add_argument("--threshold-pct", type=float, help="Minimum speed drop to keep (0-100)")
        parser.add_argument("--aggregate", choices=("max", "top5"), help="Score aggregation over minutes")
        parser.add_argument("--days", type=int, help="Study length for the events.csv catalog")
        parser.add_argument("--length-m", type=float, help="Road length for the events.csv catalog")

    def run(self) -> int:
        cfg = self.config
        loops_path, windows_path = cfg.require("loops", "windows")
        if cfg.aggregate not in ("max", "top5"):
            raise ConfigError(f"unknown aggregation {cfg.aggregate!r}")
        network = load_loops(loops_path)
        windows = load_windows(windows_path)
        profiles = network_profiles(network)
        threshold = cfg.threshold_pct if cfg.threshold_pct is not None else 0.0

        rows: list[list[object]] = []
        for w in windows:
            try:
                win = select_members(w, network)
                loc = localize(win, network, profiles, cfg.aggregate)  # type: ignore[arg-type]
                speed, median = link_speed(win, network, profiles)
                sig = significance_filter(speed, median, threshold, (w.t_start, w.t_end))
            except LocalizationError as e:
                log.warning("window [%s, %s]: %s", w.t_start, w.t_end, e)
                rows.append([w.t_start, w.midpoint, w.t_end, w.x_lo, w.x_hi,
                             None, None, None, 1, None, 0])
                continue
            up, down = loc.pair if loc.pair is not None else (None, None)
            rows.append([
                w.t_start, loc.position, w.t_end, w.x_lo, w.x_hi,
                up, down, loc.score if np.isfinite(loc.score) else None,
                int(loc.low_confidence), sig.max_drop_pct, int(sig.kept),
            ])

        comments = [f"origin={network.origin!r}", f"threshold_pct={threshold!r}"]
        write_csv(cfg.out_dir / "localized.csv", LOCALIZED_HEADER, rows, comments)

        kept = [r for r in rows if r[-1] == 1]
        if cfg.days and cfg.length_m:
            dom = StudyDomain(T=cfg.days * MINUTES_PER_DAY, X=cfg.length_m, origin=network.origin)
            events = [Event(float(r[0]), float(r[1])) for r in kept]  # type: ignore[arg-type]
            inside = [e for e in events if dom.contains(e.t, e.x)]
            if len(inside) < len(events):
                log.warning("%d kept events fall outside the domain", len(events) - len(inside))
            save_catalog(EventCatalog.from_events(dom, inside), cfg.out_dir / "events.csv")

        print(format_table(
            ["windows", "localized", "low_confidence", "kept"],
            [[len(rows), sum(1 for r in rows if r[5] is not None),
              sum(1 for r in rows if r[8] == 1), len(kept)]],
        ))
        return 0
