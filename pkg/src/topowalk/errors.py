"""Exception hierarchy shared by the topowalk modules."""


class TopowalkError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TopowalkError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(TopowalkError, ValueError):
    """A dense construction was requested for a register that is too large."""


class UnsupportedError(TopowalkError, NotImplementedError):
    """The requested construction has no formula in this package."""


class NoBoundStateError(TopowalkError, ValueError):
    """The Hamiltonian has no zero mode with support at the requested site."""


class LoweringRequiredError(TopowalkError, ValueError):
    """A circuit still contains gates that the target format cannot express."""
