# docs/_ext/commands_autogen.py
from __future__ import annotations

import importlib
import inspect
import pkgutil
from pathlib import Path
from typing import Iterable, List, Tuple

# Paths
DOCS_DIR = Path(__file__).resolve().parents[1]
GEN_DIR = DOCS_DIR / "commands"
ROOT_PACKAGE = "roadhawkes.commands"


# -------------------------
# Discovery & docstring utils
# -------------------------


def _iter_command_classes() -> Iterable[type]:
    """
    Yield sub-command classes defined under roadhawkes.commands.*, skipping
    the base module and re-exports.
    """
    try:
        root = importlib.import_module(ROOT_PACKAGE)
    except Exception:
        return

    seen: set[str] = set()
    for modinfo in pkgutil.walk_packages(root.__path__, ROOT_PACKAGE + "."):
        mod_name = modinfo.name
        if mod_name.rsplit(".", 1)[-1].startswith("__"):
            continue
        if mod_name in (f"{ROOT_PACKAGE}.base", f"{ROOT_PACKAGE}.config"):
            continue
        try:
            mod = importlib.import_module(mod_name)
        except Exception:
            continue

        for _, obj in inspect.getmembers(mod, inspect.isclass):
            if obj.__module__ != mod.__name__:
                continue
            if not getattr(obj, "COMMAND", None) or not callable(getattr(obj, "run", None)):
                continue
            fq = f"{obj.__module__}.{obj.__name__}"
            if fq in seen:
                continue
            seen.add(fq)
            yield obj


def _split_docstring(cls: type) -> tuple[str, str, str]:
    """
    Return (summary, usage, details) from a command docstring laid out as

        Summary line.

        `usage line`

        ---

        ## Sections ...
    """
    doc = (inspect.getdoc(cls) or "").strip()
    if not doc:
        return getattr(cls, "SUMMARY", "_No documentation_"), "", ""
    head, sep, details = doc.partition("\n---\n")
    if not sep:
        head, details = doc, ""
    lines = [ln.strip() for ln in head.splitlines() if ln.strip()]
    summary = lines[0] if lines else getattr(cls, "SUMMARY", "")
    usage = next((ln for ln in lines[1:] if ln.startswith("`")), "")
    return summary, usage, details.strip()


# -------------------------
# Page generation
# -------------------------


def _write_command_page(cls: type) -> str:
    """Write docs/commands/<name>.md and return its slug."""
    name = cls.COMMAND
    summary, usage, details = _split_docstring(cls)
    slug = "".join(ch.lower() if ch.isalnum() else "-" for ch in name).strip("-")

    parts: List[str] = [f"# {name}", "", summary, ""]
    if usage:
        parts += ["```sh", usage.strip("`"), "```", ""]
    parts += [
        "Shared flags: `--config FILE`, `--out-dir DIR`, `-v`.",
        "",
        "---",
        "",
        details or "_No detailed documentation yet._",
        "",
    ]
    (GEN_DIR / f"{slug}.md").write_text("\n".join(parts), encoding="utf-8")
    return slug


def _generate_commands_index(pages: Iterable[Tuple[str, str, str]]) -> None:
    """Write docs/commands.md: a table of sub-commands plus a hidden toctree."""
    rows = sorted(pages, key=lambda p: p[1])
    lines: list[str] = [
        "# Commands Reference",
        "",
        "| command | summary |",
        "|---------|---------|",
    ]
    lines += [f"| [{name}](commands/{slug}.md) | {summary} |" for slug, name, summary in rows]
    lines += ["", "```{toctree}", ":maxdepth: 1", ":hidden:", ""]
    lines += [f"commands/{slug}" for slug, _, _ in rows]
    lines += ["```", ""]
    (DOCS_DIR / "commands.md").write_text("\n".join(lines), encoding="utf-8")


def _generate_all_commands(_app=None) -> None:
    GEN_DIR.mkdir(parents=True, exist_ok=True)
    pages: list[Tuple[str, str, str]] = []
    for cls in _iter_command_classes():
        slug = _write_command_page(cls)
        pages.append((slug, cls.COMMAND, getattr(cls, "SUMMARY", "")))
    _generate_commands_index(pages)


def setup(app):
    app.connect("builder-inited", _generate_all_commands)
    return {"parallel_read_safe": True}
