"""Exception hierarchy shared by all belltool engines.

The CLI maps these onto exit codes: ValidationError -> 3, ResourceError -> 4,
anything else uncaught -> nonzero failure.
"""


class BellToolError(Exception):
    """Base class for all belltool errors."""


class ValidationError(BellToolError):
    """Malformed input: bad arguments, broken invariants, schema violations."""


class ResourceError(BellToolError):
    """A computation would exceed its configured budget."""


class ConvergenceError(BellToolError):
    """An iterative kernel failed to converge within its iteration limit."""


class InfeasibleError(BellToolError):
    """LP has no feasible point."""


class UnboundedError(BellToolError):
    """LP objective is unbounded on the feasible region."""
