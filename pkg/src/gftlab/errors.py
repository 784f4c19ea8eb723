"""Exception hierarchy shared by all transform modules."""


class GFTError(ValueError):
    """Base class for all errors raised by gftlab."""


class SizeError(GFTError):
    """Sample count exceeds the configured cap."""


class ShapeError(GFTError):
    """Grid geometries of two operands do not match."""


class DomainError(GFTError):
    """Input lies outside the supported domain (box, chart, parameter range)."""


class SingularityError(GFTError):
    """A multiplier was evaluated at a singular point."""


class DegenerateError(GFTError):
    """A normalising quantity vanished."""


class ConstructionError(GFTError):
    """A discrete structure could not be built to tolerance."""


class ConsistencyError(GFTError):
    """Independent samples of a supposedly constant quantity disagree."""


class HypothesisError(GFTError):
    """A precondition stated as a hypothesis of a formula does not hold."""
