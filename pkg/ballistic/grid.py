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
from typing import Any, Callable, Optional, Tuple

import logging

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .abc import Report
from .enums import Convexity
from .errors import EmptyDomain, NonConvexInput, OutOfDomain
from .utils import SENTINEL, as_points, as_vector, chunks, product_points

__all__ = (
    'GridFunction',
    'ConvexityReport',
    'legendre_conjugate',
    'concave_conjugate',
    'convex_envelope',
    'is_convex',
    'is_concave',
    'grid_gradient',
    'grid_gradients',
)

_log = logging.getLogger(__name__)

Axes = Tuple[np.ndarray, ...]

# entries of the (dual nodes x primal nodes) score block held in memory at once
_BLOCK = 1 << 22

def coerce_axes(axes: Any) -> Axes:
    """Normalizes a single axis or a sequence of axes into a tuple of float arrays."""
    if isinstance(axes, np.ndarray):
        if axes.ndim == 1:
            return (axes.astype(float),)
        raise TypeError('axes given as an array must be one dimensional')

    axes = list(axes)
    if axes and np.ndim(axes[0]) == 0:
        return (np.asarray(axes, dtype=float),)
    return tuple(np.asarray(a, dtype=float).ravel() for a in axes)


class GridFunction:
    """Represents a scalar function sampled on a rectangular grid in one or two dimensions.

    Grid functions carry potentials, value functions, conjugates and
    Lagrangian profiles through the library. Entries that equal
    :data:`~ballistic.utils.SENTINEL` stand for ``+inf`` (``-inf`` for its
    negative) and never take part in a min or max.

    Parameters
    ----------
    axes:
        A strictly increasing axis, or a sequence of up to two of them.
    values: :class:`numpy.ndarray`
        The samples over the product of ``axes``, in ``ij`` order.
    convexity: :class:`str`
        One of the :class:`Convexity` constants.

    Attributes
    ----------
    axes: Tuple[:class:`numpy.ndarray`, ...]
        The sample coordinates per dimension.
    values: :class:`numpy.ndarray`
        The sampled values with shape ``tuple(len(a) for a in axes)``.
    convexity: :class:`str`
        What is known about the shape of the function.
    """
    __slots__ = ('axes', 'values', 'convexity', '_interpolator')

    def __init__(self, axes: Any, values: Any, convexity: str = Convexity.UNKNOWN):
        axes = coerce_axes(axes)
        if not 1 <= len(axes) <= 2:
            raise TypeError('grid functions support one or two dimensions, got {0}'.format(len(axes)))

        for axis in axes:
            if axis.size < 2:
                raise ValueError('every axis needs at least 2 samples')
            if np.any(np.diff(axis) <= 0):
                raise ValueError('axes must be strictly increasing')

        shape = tuple(a.size for a in axes)
        values = np.asarray(values, dtype=float)
        if values.size != int(np.prod(shape)):
            raise ValueError('values of size {0} do not match grid shape {1}'.format(values.size, shape))
        values = values.reshape(shape)

        if np.isnan(values).any():
            raise ValueError('grid function values must not be NaN')

        if convexity not in Convexity.ALL:
            raise ValueError('unknown convexity flag {0!r}'.format(convexity))

        values = np.clip(values, -SENTINEL, SENTINEL)
        self.axes = axes
        self.values = values
        self.convexity = convexity
        self._interpolator = None

    @classmethod
    def from_function(cls, axes: Any, func: Callable[[np.ndarray], Any], convexity: str = Convexity.UNKNOWN) -> GridFunction:
        """Samples ``func`` on the grid spanned by ``axes``.

        ``func`` receives the ``(N, d)`` array of grid nodes and returns ``N`` values.
        """
        axes = coerce_axes(axes)
        points = product_points(axes)
        values = np.asarray(func(points), dtype=float).reshape(tuple(a.size for a in axes))
        return cls(axes, values, convexity)

    @property
    def dim(self) -> int:
        """:class:`int`: Returns the dimension of the state space the grid lives in."""
        return len(self.axes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def points(self) -> np.ndarray:
        """:class:`numpy.ndarray`: Returns the ``(N, d)`` array of grid nodes."""
        return product_points(self.axes)

    @property
    def resolution(self) -> float:
        """:class:`float`: Returns the largest spacing between neighbouring samples."""
        return float(max(np.diff(a).max() for a in self.axes))

    @property
    def lower(self) -> np.ndarray:
        return np.array([a[0] for a in self.axes])

    @property
    def upper(self) -> np.ndarray:
        return np.array([a[-1] for a in self.axes])

    @property
    def finite(self) -> np.ndarray:
        """:class:`numpy.ndarray`: Returns the mask of entries that are not the sentinel."""
        return np.abs(self.values) < SENTINEL

    @property
    def scale(self) -> float:
        """:class:`float`: Returns ``max(1, max |f|)`` over the finite entries."""
        finite = self.values[self.finite]
        if finite.size == 0:
            return 1.0
        return float(max(1.0, np.abs(finite).max()))

    def contains(self, points: Any, atol: float = 1e-12) -> np.ndarray:
        points = as_points(points, self.dim)
        return np.all((points >= self.lower - atol) & (points <= self.upper + atol), axis=1)

    def with_values(self, values: Any, convexity: Optional[str] = None) -> GridFunction:
        return GridFunction(self.axes, values, self.convexity if convexity is None else convexity)

    def __neg__(self) -> GridFunction:
        flipped = {
            Convexity.CONVEX: Convexity.CONCAVE,
            Convexity.CONCAVE: Convexity.CONVEX,
        }.get(self.convexity, Convexity.UNKNOWN)
        return GridFunction(self.axes, -self.values, flipped)

    def __call__(self, points: Any) -> np.ndarray:
        """Evaluates the multilinear interpolant at ``points``.

        Raises
        ------
        OutOfDomain:
            A point lies outside the grid hull.
        """
        points = as_points(points, self.dim)
        inside = self.contains(points)
        if not inside.all():
            raise OutOfDomain(points[~inside][0])

        points = np.clip(points, self.lower, self.upper)
        if self._interpolator is None:
            self._interpolator = RegularGridInterpolator(self.axes, self.values, method='linear')
        return self._interpolator(points)

    def verify_flag(self, tol: Optional[float] = None) -> None:
        """Checks that the convexity flag agrees with the samples.

        Raises
        ------
        NonConvexInput:
            The samples contradict the flag.
        """
        if self.convexity == Convexity.UNKNOWN:
            return

        report = is_convex(self if self.convexity == Convexity.CONVEX else -self, tol)
        if not report.passed:
            raise NonConvexInput('function flagged {0} violates the flag by {1:.3g} at {2}'.format(
                self.convexity, report.worst_violation, report.witness))

    def __repr__(self):
        return '<GridFunction dim={0} shape={1} convexity={2}>'.format(self.dim, self.shape, self.convexity)


class ConvexityReport(Report):
    """Represents the outcome of :func:`is_convex`.

    Attributes
    ----------
    passed: :class:`bool`
        Whether every sampled second difference stayed above ``-tolerance``.
    worst_violation: :class:`float`
        The largest amount by which a midpoint exceeded its chord; ``0`` if none did.
    witness: Optional[Tuple[:class:`float`, ...]]
        The middle node of the worst triple, if any violation was found.
    tolerance: :class:`float`
        The tolerance that was applied.
    """
    __slots__ = ('passed', 'worst_violation', 'witness', 'tolerance', 'triples')
    _fields = ('worst_violation', 'witness', 'tolerance', 'triples')

    def __init__(self, passed: bool, worst_violation: float, witness: Optional[tuple], tolerance: float, triples: int):
        self.passed = passed
        self.worst_violation = worst_violation
        self.witness = witness
        self.tolerance = tolerance
        self.triples = triples


def _finite_points(f: GridFunction) -> Tuple[np.ndarray, np.ndarray]:
    values = f.values.ravel()
    mask = np.abs(values) < SENTINEL
    if not mask.any():
        raise EmptyDomain('every value of the grid function is the sentinel')
    return f.points[mask], values[mask]

def legendre_conjugate(f: GridFunction, dual_axes: Any) -> GridFunction:
    """Computes the convex conjugate ``f*(q) = max_x <q, x> - f(x)`` by an exhaustive scan.

    Parameters
    ----------
    f: :class:`GridFunction`
        The function to transform. Sentinel entries are skipped.
    dual_axes:
        The axes the conjugate is sampled on.

    Returns
    -------
    :class:`GridFunction`
        The conjugate, flagged convex.

    Raises
    ------
    EmptyDomain:
        Every value of ``f`` is the sentinel.
    """
    dual_axes = coerce_axes(dual_axes)
    if len(dual_axes) != f.dim:
        raise ValueError('dual axes must have the same dimension as the function')

    nodes, values = _finite_points(f)
    dual = product_points(dual_axes)
    out = np.empty(dual.shape[0])

    block = max(1, _BLOCK // nodes.shape[0])
    for sl in chunks(dual.shape[0], block):
        scores = dual[sl] @ nodes.T - values
        out[sl] = scores.max(axis=1)

    return GridFunction(dual_axes, out, Convexity.CONVEX)

def concave_conjugate(g: GridFunction, dual_axes: Any) -> GridFunction:
    """Computes the concave conjugate ``g~(v) = min_x <v, x> - g(x)``.

    The value is obtained as ``-(-g)*(-v)`` through :func:`legendre_conjugate`,
    so both routes agree bit for bit.

    Returns
    -------
    :class:`GridFunction`
        The conjugate, flagged concave.
    """
    dual_axes = coerce_axes(dual_axes)
    mirrored = tuple(-a[::-1] for a in dual_axes)
    conj = legendre_conjugate(-g, mirrored)
    flip = (slice(None, None, -1),) * len(dual_axes)
    return GridFunction(dual_axes, -conj.values[flip], Convexity.CONCAVE)

def convex_envelope(f: GridFunction, dual_axes: Any) -> GridFunction:
    """Returns ``(f*)*`` sampled back on the axes of ``f``."""
    return legendre_conjugate(legendre_conjugate(f, dual_axes), f.axes)

def _triples(values: np.ndarray, coords: np.ndarray, axis: int):
    moved = np.moveaxis(values, axis, -1)
    a, m, b = moved[..., :-2], moved[..., 1:-1], moved[..., 2:]
    lam = (coords[2:] - coords[1:-1]) / (coords[2:] - coords[:-2])
    valid = (np.abs(a) < SENTINEL) & (np.abs(m) < SENTINEL) & (np.abs(b) < SENTINEL)
    excess = m - (lam * a + (1.0 - lam) * b)
    return np.where(valid, excess, -np.inf), valid

def _uniform(axis: np.ndarray) -> bool:
    steps = np.diff(axis)
    return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0.0))

def is_convex(f: GridFunction, tol: Optional[float] = None) -> ConvexityReport:
    """Tests discrete midpoint convexity along grid lines (and diagonals in two dimensions).

    A middle sample may not exceed the chord through its two neighbours by
    more than ``tol``. Diagonals are only scanned on uniform grids, where the
    middle node sits on the chord.

    Parameters
    ----------
    f: :class:`GridFunction`
        The function to test.
    tol: Optional[:class:`float`]
        The admissible excess. Defaults to ``1e-9`` times the value scale.

    Returns
    -------
    :class:`ConvexityReport`
    """
    if tol is None:
        tol = 1e-9 * f.scale

    worst = -np.inf
    witness = None
    count = 0

    def consider(excess: np.ndarray, valid: np.ndarray, locate: Callable[[tuple], tuple]):
        nonlocal worst, witness, count
        count += int(valid.sum())
        if excess.size == 0 or not valid.any():
            return
        idx = np.unravel_index(int(np.argmax(excess)), excess.shape)
        if excess[idx] > worst:
            worst = float(excess[idx])
            witness = locate(idx)

    for axis in range(f.dim):
        if f.axes[axis].size < 3:
            continue
        excess, valid = _triples(f.values, f.axes[axis], axis)

        def locate(idx, axis=axis):
            # idx is in moved-axis order: other axes first, this axis last
            node = list(idx[:-1])
            node.insert(axis, idx[-1] + 1)
            return tuple(float(f.axes[k][node[k]]) for k in range(f.dim))

        consider(excess, valid, locate)

    if f.dim == 2 and all(a.size >= 3 for a in f.axes) and all(_uniform(a) for a in f.axes):
        v = f.values
        m = v[1:-1, 1:-1]
        for a, b in ((v[:-2, :-2], v[2:, 2:]), (v[:-2, 2:], v[2:, :-2])):
            valid = (np.abs(a) < SENTINEL) & (np.abs(m) < SENTINEL) & (np.abs(b) < SENTINEL)
            excess = np.where(valid, m - 0.5 * (a + b), -np.inf)
            consider(excess, valid, lambda idx: (float(f.axes[0][idx[0] + 1]), float(f.axes[1][idx[1] + 1])))

    violation = max(0.0, worst) if np.isfinite(worst) else 0.0
    passed = violation <= tol
    if violation <= 0.0:
        witness = None
    return ConvexityReport(passed, violation, witness, float(tol), count)

def is_concave(f: GridFunction, tol: Optional[float] = None) -> ConvexityReport:
    """Tests concavity of ``f`` as convexity of ``-f``."""
    return is_convex(-f, tol)

def grid_gradients(f: GridFunction, points: Any) -> np.ndarray:
    """Evaluates the finite difference gradient of ``f`` at many points.

    Nodal gradients use central differences inside the grid and one-sided
    differences on its boundary; they are then interpolated multilinearly.

    Returns
    -------
    :class:`numpy.ndarray`
        The ``(n, d)`` array of gradients.

    Raises
    ------
    OutOfDomain:
        A point lies outside the grid hull.
    """
    points = as_points(points, f.dim)
    inside = f.contains(points)
    if not inside.all():
        raise OutOfDomain(points[~inside][0])
    points = np.clip(points, f.lower, f.upper)

    partials = np.gradient(f.values, *f.axes, edge_order=1)
    if f.dim == 1:
        partials = [partials]

    out = np.empty((points.shape[0], f.dim))
    for k, partial in enumerate(partials):
        out[:, k] = RegularGridInterpolator(f.axes, partial, method='linear')(points)
    return out

def grid_gradient(f: GridFunction, x: Any) -> np.ndarray:
    """Evaluates the finite difference gradient of ``f`` at a single point ``x``.

    See :func:`grid_gradients` for the scheme.
    """
    x = as_vector(x)
    return grid_gradients(f, x.reshape(1, -1))[0]
