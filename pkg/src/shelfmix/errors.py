"""Exception types shared across modules."""


class ShelfmixError(Exception):
    """Base class for errors raised by shelfmix."""


class BoundExceeded(ShelfmixError, ValueError):
    """A computation would exceed a configured size or work budget."""


class InvariantViolation(ShelfmixError):
    """An exact identity that must hold did not; indicates an arithmetic bug."""
