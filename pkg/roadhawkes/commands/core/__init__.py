from roadhawkes.commands.base import CommandMap
from roadhawkes.commands.core.fit import Fit
from roadhawkes.commands.core.localize import Localize
from roadhawkes.commands.core.report import Report
from roadhawkes.commands.core.simulate import Simulate
from roadhawkes.commands.core.validate import Validate

CORE_COMMANDS: CommandMap = {
    "simulate": Simulate,
    "fit": Fit,
    "validate": Validate,
    "localize": Localize,
    "report": Report,
}
