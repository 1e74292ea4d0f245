"""
MIT License

Copyright (c) 2026 ballistic.py contributors

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""
from __future__ import annotations

__all__ = (
    'BallisticException',
    'InputError',
    'ConfigError',
    'SizeMismatch',
    'GridMismatch',
    'DimensionUnsupported',
    'ProblemTooLarge',
    'EmptyDomain',
    'OutOfDomain',
    'NonConvexInput',
    'VariantUnsupported',
    'NumericalError',
    'NoConvergence',
    'Infeasible',
    'StepUnderflow',
    'InfeasiblePath',
    'MapUnavailable',
)

class BallisticException(Exception):
    """Base exception class for ballistic.

    Every error raised on purpose by this library inherits from this one,
    so catching it is enough to handle all of them.
    """
    pass

class InputError(BallisticException):
    """Raised when the data handed to an operation is malformed.

    The command line maps these errors to the exit code ``2``.
    """
    pass

class ConfigError(InputError):
    """Raised when a problem file cannot be parsed or refers to missing data."""
    pass

class SizeMismatch(InputError):
    """Raised when a cost matrix and the measures do not have matching sizes."""
    pass

class GridMismatch(InputError):
    """Raised when a density path and a velocity path are not sampled on the same grid."""
    pass

class DimensionUnsupported(InputError):
    """Raised when an operation that only exists in one dimension gets higher dimensional data."""
    pass

class ProblemTooLarge(InputError):
    """Raised when a transport problem exceeds the dense desk-scale cap."""
    pass

class EmptyDomain(InputError):
    """Raised when every value of a grid function is the sentinel."""
    pass

class OutOfDomain(InputError):
    """Raised when a point lies outside the hull of a grid.

    Attributes
    ----------
    point: :class:`numpy.ndarray`
        The offending point.
    """
    def __init__(self, point, message: str = 'point lies outside the grid hull'):
        self.point = point
        super().__init__('{0}: {1}'.format(message, point))

class NonConvexInput(InputError):
    """Raised when a function that must be convex is flagged otherwise."""
    pass

class VariantUnsupported(InputError):
    """Raised when an operation is not implemented for a Lagrangian variant."""
    pass

class NumericalError(BallisticException):
    """Base class of the failures that happen while computing.

    The command line maps these errors to the exit code ``3``.
    """
    pass

class NoConvergence(NumericalError):
    """Raised when an iterative method hits its iteration cap.

    Attributes
    ----------
    iterations: :class:`int`
        The number of iterations that were performed.
    """
    def __init__(self, message: str, iterations: int = 0):
        self.iterations = iterations
        super().__init__(message)

class Infeasible(NumericalError):
    """Raised when the sentinel pattern of a cost matrix blocks every transport plan."""
    pass

class StepUnderflow(NumericalError):
    """Raised when an integrator samples a derivative that is not finite."""
    pass

class InfeasiblePath(NumericalError):
    """Raised when a density path does not solve the continuity equation within tolerance
    or does not end at the requested measure."""
    pass

class MapUnavailable(NumericalError):
    """Raised when a transport map is requested for a degenerate measure."""
    pass
