"""Exception types shared across the toolkit.

The CLI maps these onto exit codes (see cli.EXIT_*): parameter and
configuration problems are distinguished from numerical failures so that
scripted callers can react differently to "your input is wrong" versus
"the solve went bad".
"""


class ToolkitError(Exception):
    """Base class for all toolkit-raised errors."""


class ParameterError(ToolkitError):
    """Invalid argument, geometry, configuration, or network description."""


class AssemblyError(ToolkitError):
    """The network could not be turned into a solvable MNA system."""


class SolverError(ToolkitError):
    """Numerical failure during factorization or time stepping."""
