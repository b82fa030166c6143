"""Exception hierarchy shared by every module of the package."""


class NewtonHorizonError(ValueError):
    """Base class for all package errors."""


class InvalidDistribution(NewtonHorizonError):
    """A mass distribution violates its construction invariants."""


class InsideBody(NewtonHorizonError):
    """An exterior-only quantity was requested at a point of the closed support."""


class ToleranceNotMet(NewtonHorizonError):
    """Adaptive quadrature exhausted its subdivision budget."""


class DegenerateSupport(NewtonHorizonError):
    """The support has zero volume (point mass), so no average density exists."""


class AtOrAboveEscape(NewtonHorizonError):
    """Launch speed does not satisfy the strict sub-escape hypothesis."""


class DomainExceeded(NewtonHorizonError):
    """A closed-form radial solution was evaluated past its collapse time."""


class BadParameters(NewtonHorizonError):
    """Parameters outside the domain of a closed-form expression."""


class NotContaining(NewtonHorizonError):
    """The candidate ball does not contain the closed support."""


class WrongShape(NewtonHorizonError):
    """A criterion that needs a spherically symmetric body got something else."""
