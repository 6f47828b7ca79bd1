"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class BranchCutError(DomainError):
    """A square-root radicand landed on the branch cut (-inf, 0]."""


class CaseMismatchError(DomainError):
    """A symbol or solver was requested for an incompatible parameter case."""


class GridError(ValueError):
    """Malformed or empty scan/field grid."""


class ConfigurationError(ValueError):
    """Grid or solver configuration that cannot produce a valid result."""


class ConsistencyError(RuntimeError):
    """An internal identity that should hold by construction failed."""
