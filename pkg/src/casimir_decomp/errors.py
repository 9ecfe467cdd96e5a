"""Exception hierarchy shared by the computational modules and the CLI."""


class CasimirError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ValidationError(CasimirError, ValueError):
    """Input data (tables, configs) violate a structural invariant."""


class CapabilityError(CasimirError):
    """The requested quantity is not available for this model."""


class NumericalDegeneracyError(CasimirError, ArithmeticError):
    """A formula hit a vanishing denominator."""


class ConvergenceError(CasimirError, RuntimeError):
    """An integral or series did not reach the requested tolerance.

    ``diagnostics`` carries whatever partial state the caller found useful
    (partial sums, terms used, error estimates).
    """

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
