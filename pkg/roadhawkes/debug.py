import os
from pathlib import Path
from typing import Iterable


def _dbg_enabled() -> bool:
    v = os.getenv("ROADHAWKES_DEBUG")
    return bool(v) and v != "0"


def _dbg_path() -> Path:
    return Path(os.getenv("ROADHAWKES_DEBUG_OUT", "/tmp/roadhawkes_debug.txt"))


def _dbg_write(text: str) -> None:
    if not _dbg_enabled():
        return
    with _dbg_path().open("a", encoding="utf-8") as fp:
        fp.write(text if text.endswith("\n") else text + "\n")


def debug_dump(header: str, rows: Iterable[object]) -> None:
    """
    Append a numbered dump of `rows` under `header` to the debug file,
    but only when ROADHAWKES_DEBUG is set.
    """
    if not _dbg_enabled():
        return

    lines = [f"== {header} =="]
    for i, row in enumerate(rows):
        lines.append(f"{i:03d}: {row!r}")
    _dbg_write("\n".join(lines))
