"""Exception hierarchy shared by every solver.

The CLI maps these onto its exit-code contract, so solvers raise them
instead of returning sentinel values.
"""


class MorphError(Exception):
    """Base class for all package errors."""


class ValidationError(MorphError):
    """The instance document or a call argument is malformed."""


class InfeasibleError(MorphError):
    """No selection satisfies the constraints of the problem."""


class CapExceededError(MorphError):
    """A search or table grew beyond its configured cap."""
