"""Exception and warning types shared across the package."""


class ConfigurationError(ValueError):
    """A config, model file or argument combination is invalid."""


class HierarchyError(ValueError):
    """A hierarchy or layout file violates its schema or referential rules."""


class RangeEmptyError(ValueError):
    """A feasible range contains no usable colors."""


class RangeCapacityWarning(UserWarning):
    """A feasible range probably cannot hold the requested class count."""


class NotFoundError(KeyError):
    """A referenced session or hierarchy node id does not exist."""


class ExpansionError(ValueError):
    """A node cannot be expanded (it is a leaf or not currently visible)."""
