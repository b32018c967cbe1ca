"""Exception types shared by the library and the CLI.

The CLI turns these into exit codes (see scripts/drinfeld_cli.py), so keep the
hierarchy shallow and raise the most specific one.
"""


class DrinfeldError(Exception):
    """Base class for everything this package raises on purpose."""


class FieldUnsupported(DrinfeldError, ValueError):
    """The configured field cannot host the requested object."""


class ConfigError(DrinfeldError, ValueError):
    """A config file or CLI value is malformed or out of range."""


class PrecisionError(DrinfeldError, ArithmeticError):
    """Not enough known digits to answer."""


class TailBoundError(PrecisionError):
    """A series tail could not be bounded below the requested precision."""


class ConvergenceError(PrecisionError):
    """A truncated lattice product has not stabilized far enough."""


class PoleError(PrecisionError):
    """The argument hits a lattice point, so the requested inverse blows up."""


class BudgetExceeded(DrinfeldError, RuntimeError):
    """An enumeration or linear-system budget would be exceeded."""


class NotAPeriod(DrinfeldError, ValueError):
    """A supplied basis vector is not killed by the exponential."""


class NotInOmega(DrinfeldError, ValueError):
    """A point fails the Drinfeld upper half plane test."""


class InconclusiveRelation(DrinfeldError):
    """The algebraicity detector found nothing within its bounds."""
