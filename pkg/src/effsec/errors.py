"""Exception types shared across the toolkit."""


class EffsecError(Exception):
    """Base class for toolkit errors. ``code`` is a short stable identifier."""

    code = "E_GENERIC"


class DimensionError(EffsecError, ValueError):
    code = "E_DIMENSION"


class DomainError(EffsecError, ValueError):
    code = "E_DOMAIN"


class EnumerationOverflowError(EffsecError, MemoryError):
    """A dense enumeration would exceed the configured cap."""

    code = "E_ENUM_CAP"

    def __init__(self, required: int, allowed: int, what: str = "sequence space"):
        self.required = int(required)
        self.allowed = int(allowed)
        super().__init__(
            f"{what} needs {self.required} entries but the cap is {self.allowed}; "
            "reduce the blocklength or raise the cap"
        )


class ResourceError(EffsecError, MemoryError):
    code = "E_RESOURCE"


class PreconditionError(EffsecError, ValueError):
    code = "E_PRECONDITION"
