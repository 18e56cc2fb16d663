"""Exception hierarchy.

Every failure mode the library can report maps to one of these classes;
the CLI translates them to distinct exit codes (see cli.EXIT_CODES).
"""


class QBrownianError(Exception):
    """Base class for all library errors."""


class ConfigError(QBrownianError):
    """Malformed configuration: unknown key, bad value, invalid grid spec."""


class DomainError(QBrownianError):
    """An argument is outside the mathematical domain of an operation
    (negative time, nonpositive frequency, high-T factor at T = 0, ...)."""


class RegimeError(QBrownianError):
    """Parameters are outside the validated physical regime
    (kappa <= 0, alpha < 3*Gamma, negative radicand, r^2 outside [0, 1),
    log expansion requested at alpha*t >= 1, ...)."""


class ScopeError(DomainError):
    """The requested check is well defined but outside the scope of the
    result it implements (e.g. the non-positivity test needs a > 0, or
    zero first moments)."""


class FactorizationError(RegimeError):
    """Moment propagation requires 4ab - c^2 >= 0 (the propagator only
    factors into dissipation and fluctuation parts under that bound)."""


class NotDecomposableError(DomainError):
    """The 2x2 dissipator coefficient matrix is not positive semidefinite,
    so no Lindblad decomposition exists.  This is the positivity diagnostic."""


class NoViolationError(RegimeError):
    """No grid time qualified for the violation construction.  Carries the
    per-condition margins at the best point for diagnosis."""

    def __init__(self, message, best_t=None, margins=None):
        super().__init__(message)
        self.best_t = best_t
        self.margins = margins or {}


class IntegrationError(QBrownianError):
    """Quadrature failed to meet the requested tolerance.  ``achieved``
    holds the error bound that was reached, ``requested`` the target."""

    def __init__(self, message, achieved=None, requested=None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


class InternalConsistencyError(QBrownianError):
    """An internal invariant failed (the library caught itself producing
    inconsistent values).  Always a bug, never a user error."""
