"""Exception types shared across the package."""


class AttnetError(Exception):
    """Base class for all attnet errors."""


class ParameterError(AttnetError, ValueError):
    """A parameter or parameter range is outside its documented bounds."""


class ContractError(AttnetError, ValueError):
    """Arguments violate an operation's contract (shape, encoding, labels)."""


class CapacityError(AttnetError):
    """Request exceeds a hard capacity limit, e.g. the exact-enumeration size."""


class DegenerateDataError(AttnetError):
    """Input data carry no usable signal (constant column, empty sample, ...)."""


class SchemaError(AttnetError):
    """An input file does not match the documented schema."""


class ConfigurationError(AttnetError):
    """A configuration artefact (element map, filter choice) does not match the data."""
