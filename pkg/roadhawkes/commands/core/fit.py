# roadhawkes/commands/core/fit.py

from __future__ import annotations

import argparse
import logging

from roadhawkes.commands.base import Command, RunConfig, format_table
from roadhawkes.io import write_csv
from roadhawkes.process.catalog import BANDWIDTH_FIELDS, EventCatalog, load_catalog
from roadhawkes.process.fitter import FitReport, fit, log_likelihood, model_label
from roadhawkes.process.model import COMPONENTS, ModelComponents
from roadhawkes.process.persistence import export_curves, save_model

log = logging.getLogger(__name__)


def add_fit_arguments(parser: argparse.ArgumentParser, *, disable: bool = True) -> None:
    parser.add_argument("--events", help="Event catalog CSV")
    if disable:
        parser.add_argument(
            "--disable",
            action="append",
            choices=COMPONENTS,
            help="Leave a component out (repeatable)",
        )
    for name, field_name in BANDWIDTH_FIELDS.items():
        parser.add_argument(
            f"--bandwidth-{name}", type=float, metavar="W", help=f"Bandwidth {field_name}"
        )
    parser.add_argument("--max-iters", type=int, help="Iteration cap (default 100)")
    parser.add_argument("--tol", type=float, help="Convergence tolerance (default 1e-4)")
    parser.add_argument(
        "--no-monotone", action="store_true", help="Skip the monotone adjustment of g and h"
    )


def fit_row(model: ModelComponents, ll: float) -> list[object]:
    """One row of a comparison table: label, A (None without triggering), log-likelihood."""
    A = model.A if model.is_enabled("triggering") else None
    return [model_label(model.enabled), A, ll]


def write_iterations(report: FitReport, cfg: RunConfig) -> None:
    rows = [
        [r.iteration, r.A, r.mu0, r.log_likelihood, r.max_dpsi, r.partition_error]
        for r in report.iterations
    ]
    comments = [
        f"converged={int(report.converged)}",
        f"elapsed_s={report.elapsed!r}",
        *(f"monotone_failure={m}" for m in report.monotone_failures),
        *(f"degenerate={d}" for d in report.degenerate),
    ]
    write_csv(
        cfg.out_dir / "fit_report.csv",
        ["iteration", "A", "mu0", "log_likelihood", "max_dpsi", "partition_error"],
        rows,
        comments,
    )


class Fit(Command):
    """Fit the model to an event catalog.

    `roadhawkes fit --events EVENTS --out-dir DIR [--disable NAME]... [--bandwidth-NAME W]...`

    ---

    ## Outputs

    - `DIR/model.json`: the fitted model, reloadable bit-for-bit.
    - `DIR/fit_report.csv`: A, mu0, log-likelihood and the largest change
      in background probability per iteration.
    - `DIR/curve_<name>.csv`: every component on its cache grid.

    A one-row table (model, A, log-likelihood) is printed. The A column is
    `-` when triggering is disabled.

    ## Nested models

    Each `--disable` removes one of `daily`, `weekly`, `trend`, `spatial`,
    `triggering`; the removed component stays at 1 (0 for triggering).

    ```sh
    roadhawkes fit --events events.csv --disable trend --disable triggering
    ```

    ## Bandwidth sweeps

    `--bandwidth-sweep g=10,20,40` refits once per value and writes
    `DIR/sweep.csv` with A and log-likelihood for each; no model is saved.
    """

    COMMAND = "fit"
    SUMMARY = "Fit background and triggering components to a catalog"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        add_fit_arguments(parser)
        parser.add_argument(
            "--bandwidth-sweep",
            metavar="NAME=V1,V2,...",
            help="Refit across bandwidth values and tabulate A and log-likelihood",
        )

    def run(self) -> int:
        cfg = self.config
        (events,) = cfg.require("events")
        catalog = load_catalog(events)
        if cfg.bandwidth_sweep is not None:
            return self._sweep(catalog)

        model, report = fit(catalog, cfg.fit, cfg.enabled)
        ll = log_likelihood(model, catalog)
        save_model(model, cfg.out_dir / "model.json")
        write_iterations(report, cfg)
        export_curves(model, cfg.out_dir)

        print(format_table(["model", "A", "log_likelihood"], [fit_row(model, ll)]))
        if not report.converged:
            print(f"warning: no convergence after {report.n_iterations} iterations")
        return 0

    def _sweep(self, catalog: EventCatalog) -> int:
        cfg = self.config
        assert cfg.bandwidth_sweep is not None
        name, values = cfg.bandwidth_sweep
        rows = []
        for v in values:
            fc = cfg.fit.with_bandwidth(name, v)
            model, report = fit(catalog, fc, cfg.enabled)
            ll = log_likelihood(model, catalog)
            log.info("sweep %s=%g: A=%.6f loglik=%.4f", name, v, model.A, ll)
            rows.append([name, v, model.A, model.mu0, ll, int(report.converged)])
        header = ["bandwidth", "value", "A", "mu0", "log_likelihood", "converged"]
        write_csv(cfg.out_dir / "sweep.csv", header, rows)
        print(format_table(header, rows))
        return 0
