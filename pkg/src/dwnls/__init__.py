"""Two-mode reduction and grid verification for the double-well nonlinear Schrödinger equation."""
from .errors import ConfigError, ConvergenceError, DomainError, OracleMismatchError, SingularPointError

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "OracleMismatchError",
    "SingularPointError",
    "__version__",
]
