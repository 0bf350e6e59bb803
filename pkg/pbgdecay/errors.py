# SPDX-License-Identifier: GPL-3.0+

""" Exceptions shared by the evaluators, the oracles and the command line. """

from typing import Optional


class PbgError(Exception):
    """ Base class for every error raised by pbgdecay. """


class ConfigError(PbgError, ValueError):
    """ Invalid physical parameters, run specification or config file. """


class NumericalError(PbgError, RuntimeError):
    """ A numerical method could not deliver the requested accuracy. """


class ConvergenceError(NumericalError):
    """ A series or a quadrature did not converge within its budget. """


class SeriesDivergenceError(NumericalError):
    """ The Mittag-Leffler double series is unusable at this time (route elsewhere). """


class InversionError(NumericalError):
    """ The numerical Laplace inversion is unstable for this configuration. """


class RootFindingError(NumericalError):
    """ Polynomial or transcendental roots failed their residual check. """


class StepSizeError(NumericalError):
    """ The Volterra march did not meet its Richardson tolerance. """


class InapplicableError(NumericalError):
    """ A representation of G does not hold for this configuration. """


class EvaluationError(NumericalError):
    """ Evaluation of G failed at a given time; carries method and time. """

    def __init__(self, message: str, method: Optional[str] = None, t: Optional[float] = None):
        super().__init__(message)
        self.method = method
        self.t = t

    def __str__(self):
        base = super().__str__()
        if self.method is None and self.t is None:
            return base
        return f"{base} (method={self.method}, t={self.t!r})"
