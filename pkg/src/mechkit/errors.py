"""Exception types shared across the toolkit."""


class MechkitError(Exception):
    """Base class for toolkit errors."""


class SchemaError(MechkitError):
    """Raised when an input file or JSON object does not match the expected schema."""


class CapExceededError(MechkitError):
    """Raised when an enumeration would exceed the configured work cap."""

    def __init__(self, needed: int, cap: int, hint: str = ""):
        self.needed = needed
        self.cap = cap
        msg = f"enumeration of {needed} assignments exceeds cap {cap}"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)
