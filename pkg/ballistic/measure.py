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
from typing import Any, Callable, Iterator, List, Optional, Tuple, Union

import logging
import re

import numpy as np

from .errors import InputError, SizeMismatch
from .utils import as_points

__all__ = (
    'DiscreteMeasure',
)

_log = logging.getLogger(__name__)

#: Tolerance on the total mass of a constructed measure.
MASS_TOLERANCE = 1e-12

#: Tolerance under which file weights are silently renormalised.
RENORMALIZE_TOLERANCE = 1e-6

_SPLIT = re.compile(r'[\s,;]+')


class DiscreteMeasure:
    """Represents a finitely supported probability measure on a space of dimension ``d``.

    Atoms sharing the same coordinates are merged on construction, keeping
    the order in which each point first appeared.

    Parameters
    ----------
    points:
        The ``(n, d)`` support points. A flat sequence is read as ``n`` points on the line.
    weights:
        The ``n`` nonnegative masses. They must sum to one within ``1e-12``.

    Attributes
    ----------
    points: :class:`numpy.ndarray`
        The distinct support points, shape ``(n, d)``.
    weights: :class:`numpy.ndarray`
        The mass carried by each support point.
    """
    __slots__ = ('points', 'weights')

    def __init__(self, points: Any, weights: Any):
        points = as_points(points)
        weights = np.asarray(weights, dtype=float).ravel()

        if points.shape[0] != weights.size:
            raise SizeMismatch('got {0} points but {1} weights'.format(points.shape[0], weights.size))
        if weights.size == 0:
            raise InputError('a measure needs at least one atom')
        if not np.all(np.isfinite(points)):
            raise InputError('support points must be finite')
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InputError('weights must be finite and nonnegative')

        total = weights.sum()
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise InputError('weights sum to {0!r}, expected 1'.format(float(total)))

        _, first, inverse = np.unique(points, axis=0, return_index=True, return_inverse=True)
        inverse = np.asarray(inverse).ravel()
        if first.size != points.shape[0]:
            order = np.argsort(first, kind='stable')
            rank = np.empty_like(order)
            rank[order] = np.arange(order.size)
            merged = np.zeros(first.size)
            np.add.at(merged, rank[inverse], weights)
            points = points[np.sort(first)]
            weights = merged

        self.points = points
        self.weights = weights

    @classmethod
    def dirac(cls, point: Any) -> DiscreteMeasure:
        """Returns the unit mass at ``point``."""
        return cls(np.atleast_1d(np.asarray(point, dtype=float)).reshape(1, -1), [1.0])

    @classmethod
    def uniform(cls, points: Any) -> DiscreteMeasure:
        """Returns the measure that puts equal mass on every row of ``points``."""
        points = as_points(points)
        n = points.shape[0]
        return cls(points, np.full(n, 1.0 / n))

    @classmethod
    def from_unnormalized(cls, points: Any, weights: Any, tolerance: float = RENORMALIZE_TOLERANCE) -> DiscreteMeasure:
        """Builds a measure from weights that sum to one only up to ``tolerance``.

        Raises
        ------
        InputError:
            The weights are off by more than ``tolerance``.
        """
        weights = np.asarray(weights, dtype=float).ravel()
        total = float(weights.sum())
        if abs(total - 1.0) > tolerance:
            raise InputError('weights sum to {0!r}, which is not within {1} of 1'.format(total, tolerance))
        return cls(points, weights / total)

    @classmethod
    def loadtxt(cls, path: str, dim: Optional[int] = None) -> DiscreteMeasure:
        """Reads a measure from a delimited text file.

        Every non blank line holds ``x1 ... xd weight``; fields may be split by
        whitespace, commas or semicolons. Text after ``#`` is ignored and a
        first line that does not parse as numbers is treated as a header.

        Raises
        ------
        InputError:
            The file is malformed or its weights do not sum to one.
        """
        rows: List[List[float]] = []
        with open(path, 'r', encoding='utf-8') as fp:
            for lineno, raw in enumerate(fp, start=1):
                line = raw.split('#', 1)[0].strip()
                if not line:
                    continue
                fields = [f for f in _SPLIT.split(line) if f]
                try:
                    rows.append([float(f) for f in fields])
                except ValueError:
                    if rows:
                        raise InputError('{0}:{1}: could not parse {2!r}'.format(path, lineno, line)) from None
                    _log.debug('Skipping header line of %s: %r', path, line)

        if not rows:
            raise InputError('{0}: no atoms found'.format(path))

        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise InputError('{0}: rows have inconsistent widths {1}'.format(path, sorted(widths)))

        table = np.asarray(rows)
        if table.shape[1] < 2:
            raise InputError('{0}: every row needs coordinates and a weight'.format(path))
        if dim is not None and table.shape[1] - 1 != dim:
            raise SizeMismatch('{0}: expected dimension {1}, got {2}'.format(path, dim, table.shape[1] - 1))

        _log.debug('Read %d atoms from %s', table.shape[0], path)
        return cls.from_unnormalized(table[:, :-1], table[:, -1])

    def savetxt(self, path: str) -> None:
        with open(path, 'w', encoding='utf-8') as fp:
            for line in self.to_lines():
                fp.write(line + '\n')

    def to_lines(self) -> List[str]:
        return [' '.join('{0:.12g}'.format(c) for c in (*p, w)) for p, w in zip(self.points, self.weights)]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        """:class:`int`: Returns the number of atoms."""
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Tuple[np.ndarray, float]]:
        return iter(zip(self.points, self.weights))

    def integrate(self, func: Union[Callable[[np.ndarray], Any], Any]) -> float:
        """Returns ``sum_i w_i f(p_i)``.

        ``func`` is either a vectorised callable receiving the ``(n, d)`` support
        or an array of values, one per atom.
        """
        values = func(self.points) if callable(func) else func
        values = np.asarray(values, dtype=float).ravel()
        if values.size != self.size:
            raise SizeMismatch('expected {0} values, got {1}'.format(self.size, values.size))
        return float(self.weights @ values)

    def mean(self) -> np.ndarray:
        return self.weights @ self.points

    def second_moment(self) -> float:
        """:class:`float`: Returns ``sum_i w_i |p_i|^2``."""
        return float(self.weights @ np.sum(self.points ** 2, axis=1))

    def pushforward(self, images: Union[Callable[[np.ndarray], Any], Any]) -> DiscreteMeasure:
        """Returns the image measure under a map, given as a callable or as one image per atom."""
        images = images(self.points) if callable(images) else images
        images = as_points(images)
        if images.shape[0] != self.size:
            raise SizeMismatch('expected {0} images, got {1}'.format(self.size, images.shape[0]))
        return DiscreteMeasure(images, self.weights)

    def reflected(self) -> DiscreteMeasure:
        """Returns the measure ``A -> mu(-A)``."""
        return DiscreteMeasure(-self.points, self.weights)

    def translated(self, offset: Any) -> DiscreteMeasure:
        return DiscreteMeasure(self.points + np.asarray(offset, dtype=float), self.weights)

    def charged(self) -> DiscreteMeasure:
        """Returns the same measure without its zero weight atoms."""
        keep = self.weights > 0
        if keep.all():
            return self
        return DiscreteMeasure(self.points[keep], self.weights[keep])

    def sorted(self) -> DiscreteMeasure:
        """Returns the same measure with atoms in increasing order (one dimension only)."""
        order = np.argsort(self.points[:, 0], kind='stable')
        return DiscreteMeasure(self.points[order], self.weights[order])

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (self.points.shape == other.points.shape
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.weights, other.weights))

    __hash__ = None  # type: ignore

    def __repr__(self):
        return '<DiscreteMeasure dim={0} size={1}>'.format(self.dim, self.size)
