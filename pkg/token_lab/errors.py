from __future__ import (
    absolute_import,
    unicode_literals,
)


__all__ = (
    'InconsistencyError',
    'NumericConsistencyError',
    'ParameterError',
    'SingularityError',
    'SizeError',
    'TokenLabError',
)


class TokenLabError(Exception):
    """
    The base class of all errors raised deliberately by Token Lab.
    """


class ParameterError(TokenLabError, ValueError):
    """
    Raised when an argument is outside the domain an operation accepts (nonpositive rates, negative deadlines,
    probabilities outside (0, 1), and so on).
    """


class SingularityError(ParameterError):
    """
    Raised when a first-passage law would carry a point mass where a density is required.
    """


class SizeError(ParameterError):
    """
    Raised when an exact computation is asked for a token count above its enumeration cap. The message names the
    estimator to use instead.
    """


class InconsistencyError(TokenLabError, ValueError):
    """
    Raised when launches and arrivals cannot have been produced by any causal assignment.
    """


class NumericConsistencyError(TokenLabError, ArithmeticError):
    """
    Raised when a computed quantity violates an identity or ordering that holds mathematically. This always signals
    a bug or a numerical breakdown and is never silently clamped.
    """
