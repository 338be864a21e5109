# roadhawkes/commands/core/validate.py

from __future__ import annotations

import argparse

from roadhawkes.commands.base import Command
from roadhawkes.process.catalog import load_catalog
from roadhawkes.process.persistence import load_model
from roadhawkes.process.validation import validate

EXIT_PASS = 0
EXIT_FAIL = 2


class Validate(Command):
    """Check a model against a catalog by time rescaling.

    `roadhawkes validate --model MODEL --events EVENTS --out-dir DIR [--mode in-sample|out-of-sample]`

    ---

    ## Verdict

    Event times are mapped through the model's integrated intensity; if the
    model is right the gaps are unit exponentials, so `1 - exp(-gap)` is
    uniform. The command passes when the largest distance between the
    empirical CDF of those values and the diagonal stays inside the 95%
    Kolmogorov-Smirnov band.

    Exit codes: `0` pass, `2` fail, `1` error.

    ## Outputs

    - `DIR/cdf.csv`: sorted values, empirical CDF and the 95% and 99% bands.
    - `DIR/qq.csv`: order, observed, expected `k/(n+1)` and the Beta band.

    ## Out-of-sample

    `--mode out-of-sample` (or `--out-of-sample`) checks a model on a window
    it was not trained on. The model must have been fitted with
    `--disable trend`, and the catalog's window (its `#origin=` header)
    must not overlap the training window.
    """

    COMMAND = "validate"
    SUMMARY = "Time-rescaling goodness-of-fit check"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--model", help="Model document from `fit`")
        parser.add_argument("--events", help="Event catalog CSV")
        mode = parser.add_mutually_exclusive_group()
        mode.add_argument("--mode", choices=("in-sample", "out-of-sample"))
        mode.add_argument(
            "--in-sample", dest="mode", action="store_const", const="in-sample"
        )
        mode.add_argument(
            "--out-of-sample", dest="mode", action="store_const", const="out-of-sample"
        )

    def run(self) -> int:
        cfg = self.config
        model_path, events = cfg.require("model", "events")
        model = load_model(model_path)
        catalog = load_catalog(events)
        report = validate(model, catalog, "out_of_sample" if cfg.mode == "out_of_sample" else "in_sample")
        report.write_csvs(cfg.out_dir)
        print(report.summary())
        return EXIT_PASS if report.passed else EXIT_FAIL
