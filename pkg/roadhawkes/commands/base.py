# roadhawkes/commands/base.py

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, TypeAlias

from roadhawkes.errors import ConfigError
from roadhawkes.process.catalog import FitConfig
from roadhawkes.process.model import COMPONENTS


@dataclass(frozen=True)
class RunConfig:
    """Everything one sub-command needs, merged from flags and a config file."""

    command: str
    events: Optional[Path] = None
    loops: Optional[Path] = None
    windows: Optional[Path] = None
    model: Optional[Path] = None
    out_dir: Path = Path(".")
    seed: int = 0
    disable: frozenset[str] = frozenset()
    threshold_pct: Optional[float] = None
    mode: str = "in_sample"
    days: Optional[int] = None
    length_m: Optional[float] = None
    provenance: bool = False
    aggregate: str = "max"
    bandwidth_sweep: Optional[tuple[str, tuple[float, ...]]] = None
    fit: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self) -> None:
        unknown = self.disable - set(COMPONENTS)
        if unknown:
            raise ConfigError(f"cannot disable unknown components: {', '.join(sorted(unknown))}")
        if self.threshold_pct is not None and not 0.0 <= self.threshold_pct < 100.0:
            raise ConfigError(f"threshold-pct must lie in [0, 100), got {self.threshold_pct}")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")

    @property
    def enabled(self) -> frozenset[str]:
        return frozenset(COMPONENTS) - self.disable

    def require(self, *names: str) -> list[Path]:
        """The named input paths, checked to exist before any work starts."""
        out = []
        for name in names:
            p = getattr(self, name)
            if p is None:
                raise ConfigError(f"{self.command} needs --{name.replace('_', '-')}")
            if not Path(p).is_file():
                raise ConfigError(f"--{name.replace('_', '-')}: no such file: {p}")
            out.append(Path(p))
        return out


class Command:
    COMMAND = "command"
    SUMMARY = "Base command, override and add description in subclass."
    CATEGORY = "core"

    def __init__(self, config: RunConfig) -> None:
        self.config = config

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Sub-command specific flags; the shared ones are added by the CLI."""

    def run(self) -> int:
        raise NotImplementedError


CommandMap: TypeAlias = dict[str, type[Command]]


def format_table(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Left-aligned plain-text table; None prints as '-'."""
    cells = [[str(h) for h in header]]
    for row in rows:
        cells.append(["-" if v is None else (f"{v:.6g}" if isinstance(v, float) else str(v)) for v in row])
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
