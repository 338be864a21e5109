# roadhawkes/commands/config.py
"""
Flat ``key=value`` config files and their merge with command-line flags.

Keys are the long flag names (dashes or underscores) or any fit setting,
for example::

    # fit.cfg
    events = data/events.csv
    out-dir = runs/full
    disable = trend, weekly
    omega_g = 20
    max_iters = 50

A flag given on the command line always wins over the file.
"""

from __future__ import annotations

import argparse
from dataclasses import fields
from pathlib import Path
from typing import Any, Mapping, Optional

from roadhawkes.commands.base import RunConfig
from roadhawkes.errors import ConfigError
from roadhawkes.process.catalog import BANDWIDTH_FIELDS, FitConfig

RUN_KEYS = {
    f.name for f in fields(RunConfig) if f.name not in ("command", "fit")
}
FIT_KEYS = {f.name for f in fields(FitConfig) if f.init}
MODE_ALIASES = {
    "in-sample": "in_sample",
    "in_sample": "in_sample",
    "out-of-sample": "out_of_sample",
    "out_of_sample": "out_of_sample",
}


def _key(raw: str) -> str:
    return raw.strip().lower().replace("-", "_")


def read_config_file(path: Path) -> dict[str, str]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"no such config file: {p}")
    out: dict[str, str] = {}
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{p}:{lineno}: expected key=value, got {line.strip()!r}")
        key, _, value = body.partition("=")
        k = _key(key)
        if k.startswith("bandwidth_") and k[len("bandwidth_"):] in BANDWIDTH_FIELDS:
            k = BANDWIDTH_FIELDS[k[len("bandwidth_"):]]
        if k not in RUN_KEYS and k not in FIT_KEYS:
            raise ConfigError(f"{p}:{lineno}: unknown key {key.strip()!r}")
        out[k] = value.strip()
    return out


def parse_sweep(text: str) -> tuple[str, tuple[float, ...]]:
    """``"g=10,20,40"`` -> ("g", (10.0, 20.0, 40.0))."""
    name, sep, values = text.partition("=")
    name = name.strip()
    if not sep or name not in BANDWIDTH_FIELDS:
        raise ConfigError(
            f"bad sweep {text!r}; expected <{'|'.join(BANDWIDTH_FIELDS)}>=v1,v2,..."
        )
    try:
        vals = tuple(float(v) for v in values.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"bad sweep values in {text!r}") from None
    if not vals:
        raise ConfigError(f"sweep {text!r} lists no values")
    return name, vals


def _split_names(text: str) -> frozenset[str]:
    return frozenset(s.strip().lower() for s in text.split(",") if s.strip())


def _coerce(name: str, value: Any) -> Any:
    try:
        if name in ("events", "loops", "windows", "model", "out_dir"):
            return Path(value)
        if name in ("seed", "days"):
            return int(value)
        if name in ("threshold_pct", "length_m"):
            return float(value)
        if name == "provenance":
            return value if isinstance(value, bool) else str(value).strip().lower() in ("1", "true", "yes")
        if name == "disable":
            return _split_names(value) if isinstance(value, str) else frozenset(value)
        if name == "mode":
            mode = MODE_ALIASES.get(str(value).strip().lower())
            if mode is None:
                raise ConfigError(f"unknown mode {value!r}")
            return mode
        if name == "bandwidth_sweep":
            return parse_sweep(value) if isinstance(value, str) else value
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: cannot read {value!r}") from None
    return value


def build_run_config(
    command: str, args: argparse.Namespace, file_values: Optional[Mapping[str, str]] = None
) -> RunConfig:
    """Flags over file values over defaults."""
    merged: dict[str, Any] = dict(file_values or {})
    flags = vars(args)

    for name in RUN_KEYS:
        v = flags.get(name)
        if v is None or (name == "disable" and not v):
            continue
        merged[name] = v

    fit_values = {k: merged.pop(k) for k in list(merged) if k in FIT_KEYS}
    for short, field_name in BANDWIDTH_FIELDS.items():
        v = flags.get(f"bandwidth_{short}")
        if v is not None:
            fit_values[field_name] = v
    for name in ("max_iters", "tol"):
        if flags.get(name) is not None:
            fit_values[name] = flags[name]
    if flags.get("no_monotone"):
        fit_values["monotone"] = False

    run_values = {k: _coerce(k, v) for k, v in merged.items()}
    return RunConfig(command=command, fit=FitConfig.from_dict(fit_values), **run_values)
