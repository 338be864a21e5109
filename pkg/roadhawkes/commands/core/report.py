# roadhawkes/commands/core/report.py

from __future__ import annotations

import argparse
import logging

import numpy as np

from roadhawkes.commands.base import Command, format_table
from roadhawkes.commands.core.fit import add_fit_arguments, fit_row
from roadhawkes.io import write_csv
from roadhawkes.process.catalog import load_catalog
from roadhawkes.process.fitter import (
    NESTED_MODELS,
    extract_hotspots,
    fit,
    hotspot_counts,
    log_likelihood,
    responsibilities,
)

log = logging.getLogger(__name__)

TAIL_LAG = 100.0


class Report(Command):
    """Compare nested models on one catalog and list spatial hotspots.

    `roadhawkes report --events EVENTS --out-dir DIR`

    ---

    ## Model table

    The catalog is fitted six times, from the fixed-rate Poisson process up
    to the full model:

    | model                                       |
    |---------------------------------------------|
    | Fixed Rate Poisson Process                  |
    | Daily + Weekly Background                   |
    | Daily + Weekly + Trend Background           |
    | Daily + Weekly + Triggering                 |
    | Daily + Weekly + Trend + Triggering         |
    | Daily + Weekly + Trend + Spatial + Triggering |

    `DIR/report.csv` holds the model, A, the log-likelihood and
    `triggered_mass`, A times the share of g within the first 100 minutes.
    A is `-` for models without triggering.

    ## Hotspots

    Intervals where the full model's spatial background exceeds 1 go to
    `DIR/hotspots.csv` with the number of events inside each. On a ring
    road a hotspot crossing the seam has `start_m > end_m`.

    The last line printed is the share of events the full model attributes
    to triggering.
    """

    COMMAND = "report"
    SUMMARY = "Nested-model comparison and hotspot table"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        add_fit_arguments(parser, disable=False)

    def run(self) -> int:
        cfg = self.config
        (events,) = cfg.require("events")
        catalog = load_catalog(events)

        rows = []
        model = None
        for enabled in NESTED_MODELS:
            model, report = fit(catalog, cfg.fit, enabled)
            ll = log_likelihood(model, catalog)
            if not report.converged:
                log.warning("%s did not converge", sorted(enabled) or "homogeneous")
            mass = model.triggered_mass(TAIL_LAG) if model.is_enabled("triggering") else None
            rows.append([*fit_row(model, ll), mass])
        assert model is not None

        header = ["model", "A", "log_likelihood", "triggered_mass"]
        write_csv(cfg.out_dir / "report.csv", header, rows)
        print(format_table(header, rows))

        spots = extract_hotspots(model.spatial)
        counts = hotspot_counts(catalog, spots)
        spot_rows = [[lo, hi, n] for (lo, hi), n in zip(spots, counts)]
        write_csv(cfg.out_dir / "hotspots.csv", ["start_m", "end_m", "events"], spot_rows)
        print()
        print(format_table(["start_m", "end_m", "events"], spot_rows))

        psi, _ = responsibilities(model, catalog)
        print()
        print(f"triggered fraction: {float(np.mean(1.0 - psi)):.4f}")
        return 0
