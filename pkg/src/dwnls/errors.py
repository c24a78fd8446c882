"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class SingularPointError(ArithmeticError):
    """The requested quantity has a pole or a 0/0 at the given point."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""


class OracleMismatchError(AssertionError):
    """An independent oracle disagrees with the primary computation."""


class ConfigError(ValueError):
    """A configuration file or command-line parameter is malformed."""
