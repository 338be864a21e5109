# roadhawkes/process/persistence.py
"""
Model documents and curve tables.

A model document is JSON holding the domain, the fit configuration, mu0, A,
the enabled components and every curve's recipe. Curves are rebuilt from
their recipes on load by the same code that first built them, so a
reloaded model evaluates bit-identically to the saved one. Python's json
writes floats with repr, which round-trips exactly.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from roadhawkes.errors import ConfigError
from roadhawkes.io import write_atomic, write_csv
from roadhawkes.process.catalog import FitConfig, StudyDomain
from roadhawkes.process.curves import ComponentCurve, KernelCurve, TriggerCurve
from roadhawkes.process.model import BACKGROUND, ModelComponents

log = logging.getLogger(__name__)

FORMAT = "roadhawkes-model/1"

_ARRAY_FIELDS = ("centers", "weights", "masses", "cutoffs", "support_lengths", "table")
_SCALAR_FIELDS = (
    "axis", "kind", "lo", "hi", "points", "periodic", "bandwidth", "scale", "monotone", "degenerate",
)
CURVES = BACKGROUND + ("g", "h")


def curve_to_dict(curve: KernelCurve) -> dict[str, Any]:
    out: dict[str, Any] = {name: getattr(curve, name) for name in _SCALAR_FIELDS}
    for name in _ARRAY_FIELDS:
        arr = getattr(curve, name)
        if arr.size:
            out[name] = arr.tolist()
    return out


def curve_from_dict(data: Mapping[str, Any], cls: type[KernelCurve]) -> KernelCurve:
    unknown = set(data) - set(_SCALAR_FIELDS) - set(_ARRAY_FIELDS)
    if unknown:
        raise ConfigError(f"unknown curve fields: {', '.join(sorted(unknown))}")
    recipe: dict[str, Any] = {k: data[k] for k in _SCALAR_FIELDS if k in data}
    for name in _ARRAY_FIELDS:
        if name in data:
            recipe[name] = np.asarray(data[name], dtype=np.float64)
    return cls(**recipe)


def model_to_dict(model: ModelComponents) -> dict[str, Any]:
    return {
        "format": FORMAT,
        "domain": model.domain.to_dict(),
        "config": model.config.to_dict(),
        "mu0": model.mu0,
        "A": model.A,
        "enabled": sorted(model.enabled),
        "curves": {name: curve_to_dict(getattr(model, name)) for name in CURVES},
    }


def model_from_dict(data: Mapping[str, Any]) -> ModelComponents:
    if data.get("format") != FORMAT:
        raise ConfigError(f"not a {FORMAT} document (format={data.get('format')!r})")
    try:
        curves = data["curves"]
        built: dict[str, Any] = {}
        for name in CURVES:
            cls = TriggerCurve if name in ("g", "h") else ComponentCurve
            built[name] = curve_from_dict(curves[name], cls)
        return ModelComponents(
            domain=StudyDomain.from_dict(data["domain"]),
            config=FitConfig.from_dict(data["config"]),
            mu0=float(data["mu0"]),
            A=float(data["A"]),
            enabled=frozenset(data["enabled"]),
            **built,
        )
    except KeyError as e:
        raise ConfigError(f"model document is missing {e}") from None


def save_model(model: ModelComponents, path: Path) -> None:
    write_atomic(Path(path), json.dumps(model_to_dict(model), indent=1) + "\n")
    log.info("wrote model to %s", path)


def load_model(path: Path) -> ModelComponents:
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p}: not valid JSON ({e})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{p}: expected a JSON object")
    return model_from_dict(data)


def export_curves(model: ModelComponents, out_dir: Path) -> list[Path]:
    """One CSV per curve: coord,value for the background, lag,value for g and h."""
    out = Path(out_dir)
    written = []
    for name in CURVES:
        curve: KernelCurve = getattr(model, name)
        path = out / f"curve_{name}.csv"
        header = ["lag", "value"] if name in ("g", "h") else ["coord", "value"]
        comments = [f"axis={curve.axis}", f"kind={curve.kind}", f"enabled={int(_enabled(model, name))}"]
        write_csv(path, header, curve.export_rows(), comments)
        written.append(path)
    return written


def _enabled(model: ModelComponents, name: str) -> bool:
    return model.is_enabled("triggering" if name in ("g", "h") else name)
