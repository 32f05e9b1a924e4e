"""Exception types shared across the package."""


class InputError(ValueError):
    """Arguments violate an operation's preconditions."""


class CapabilityError(RuntimeError):
    """The request is valid but exceeds a configured size guard."""
