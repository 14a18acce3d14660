"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: schema/data problems exit 3,
degenerate or infeasible inputs exit 4 (usage errors exit 2 via argparse).
"""


class BeamrefineError(Exception):
    """Base class for all package errors."""


class InvalidCodewordError(BeamrefineError):
    """A steering-vector index lies outside the configured grid."""


class DegenerateChannelError(BeamrefineError):
    """Channel vector is identically zero, so MRC is undefined."""


class BudgetExceededError(BeamrefineError):
    """Exhaustive search refused because the codebook exceeds the budget."""


class SchemaError(BeamrefineError):
    """A data file does not match its declared schema."""


class InvalidArgumentError(BeamrefineError):
    """An argument violates an operation's precondition."""
