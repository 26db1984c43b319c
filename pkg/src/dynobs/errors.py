class InputError(ValueError):
    """Malformed model, unknown symbol or mismatched alphabets."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class ResourceError(RuntimeError):
    """A construction exceeded its configured state cap."""

    def __init__(self, what, cap):
        super().__init__(f"{what} exceeded the cap of {cap} states")
        self.cap = cap
