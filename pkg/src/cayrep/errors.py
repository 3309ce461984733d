"""Exception types shared across the package."""


class MalformedInput(ValueError):
    """Input violates a structural requirement (degrees, ranges, formats)."""


class PreconditionViolation(ValueError):
    """An operation was called outside its documented precondition."""


class NotInImage(ValueError):
    """Requested a preimage of an element outside the image of a block action."""


class UnsupportedShape(ValueError):
    """Centralizer requested for a cycle shape outside the supported cases."""


class DivisibilityError(ValueError):
    """p does not divide the group order."""


class FeasibilityViolation(ValueError):
    """Operation requires a feasible scheme."""


class NotQuasinormal(ValueError):
    """Operation requires a quasinormal scheme."""


class BudgetExceeded(RuntimeError):
    """A brute-force oracle refused an input larger than its budget."""
