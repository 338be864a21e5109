# docs/conf.py
# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html


import sys
from pathlib import Path

# Make the project importable and add our _ext/ to sys.path
DOCS_DIR = Path(__file__).resolve().parent
PROJECT_ROOT = DOCS_DIR.parent
EXT_DIR = DOCS_DIR / "_ext"

sys.path.insert(0, str(PROJECT_ROOT))  # import roadhawkes
sys.path.insert(0, str(EXT_DIR))  # import commands_autogen


# -- Project information -----------------------------------------------------

project = "roadhawkes"
author = "roadhawkes contributors"
copyright = "2026, roadhawkes contributors"

try:
    import roadhawkes as _rh  # type: ignore

    release = getattr(_rh, "__version__", "0.0.0")
except Exception:
    release = "0.1"

# -- General configuration ---------------------------------------------------

extensions = [
    "myst_parser",
    "commands_autogen",  # one page per sub-command, from the class docstrings
]

myst_enable_extensions = ["colon_fence"]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

# -- Options for HTML output -------------------------------------------------

html_theme = "alabaster"
html_static_path = ["_static"]

highlight_language = "sh"
