"""Exception hierarchy shared by all modules."""


class TopoentError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(TopoentError, ValueError):
    """Shapes, lengths or symmetry of an input do not match what is required."""


class DomainError(TopoentError, ValueError):
    """A parameter lies outside the domain where the formula is valid."""


class NumericalError(TopoentError, ArithmeticError):
    """A numerical routine failed to converge or violated its residual contract."""


class ClassificationError(TopoentError, ValueError):
    """A spectrum does not have the mid-gap structure that was asked for."""


class DerivationError(TopoentError, RuntimeError):
    """An ensemble procedure found no data to derive its result from."""


class ConfigError(TopoentError, ValueError):
    """Invalid run configuration (unknown key, duplicate key, bad value)."""
