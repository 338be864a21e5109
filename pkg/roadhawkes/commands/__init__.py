# roadhawkes/commands/__init__.py

from roadhawkes.commands.base import Command, RunConfig
from roadhawkes.commands.core import CORE_COMMANDS


def is_command(name: str) -> bool:
    return name in CORE_COMMANDS


def command(name: str, config: RunConfig) -> Command:
    cls = CORE_COMMANDS[name]
    return cls(config)
