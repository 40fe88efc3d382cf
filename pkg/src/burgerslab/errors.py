"""Exception types shared across the package."""


class BurgersLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BurgersLabError, ValueError):
    """A parameter or evaluation point lies outside its admissible range."""


class TimeDomainError(DomainError):
    """A time argument is negative, at or past blow-up, or inside the
    configured near-blow-up guard band."""


class KinkPointError(DomainError):
    """Evaluation requested exactly at a derivative-jump point where the
    quantity is undefined."""


class DegenerateParameterError(DomainError):
    """The parameter recipe produced values too small to certify in double
    precision."""


class ConvergenceError(BurgersLabError, RuntimeError):
    """Iterative inversion failed to reach tolerance.

    Signals a misconfigured solver (tolerance/iteration budget), not a
    mathematical failure: the underlying map is strictly monotone.
    """

    def __init__(self, message, iterations=None, index=None):
        super().__init__(message)
        self.iterations = iterations
        self.index = index


class DepthExhaustedError(BurgersLabError, RuntimeError):
    """Adaptive quadrature hit its subdivision limit; carries the worst
    remaining subinterval and its error estimate."""

    def __init__(self, message, interval=None, error_estimate=None):
        super().__init__(message)
        self.interval = interval
        self.error_estimate = error_estimate


class CertificationError(BurgersLabError, RuntimeError):
    """An inflation-certificate inequality failed; carries the failing check
    and its signed margin."""

    def __init__(self, message, check_name=None, margin=None, report=None):
        super().__init__(message)
        self.check_name = check_name
        self.margin = margin
        self.report = report


class UsageError(BurgersLabError):
    """Command line or config-file misuse."""
