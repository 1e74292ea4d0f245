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
from typing import Any, Iterable, Optional, Sequence, Tuple

import numpy as np

__all__ = (
    'MISSING',
    'SENTINEL',
    'as_points',
    'make_axis',
    'product_points',
    'nested_axes',
    'default_rng',
)

class Missing:
    def __eq__(self, other: Any) -> bool:
        return False

    def __bool__(self) -> bool:
        return False

    def __hash__(self) -> int:
        return 0

    def __repr__(self):
        return '<ballistic.utils.MISSING>'

MISSING: Any = Missing()

#: The value used in place of +infinity. It is absorbing under addition
#: and entries at or above it never take part in a min or max.
SENTINEL: float = 1e300

def as_points(points: Any, dim: Optional[int] = None) -> np.ndarray:
    """Coerces scalars, 1-D sequences or ``(n, d)`` arrays into a ``(n, d)`` float array.

    A flat sequence is read as ``n`` points in one dimension unless ``dim``
    says otherwise.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        if dim is not None and dim > 1:
            arr = arr.reshape(-1, dim)
        else:
            arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise TypeError('points must be at most two dimensional, got shape {0}'.format(arr.shape))

    if dim is not None and arr.shape[1] != dim:
        raise TypeError('expected points of dimension {0}, got {1}'.format(dim, arr.shape[1]))
    return arr

def as_vector(point: Any) -> np.ndarray:
    return np.atleast_1d(np.asarray(point, dtype=float)).ravel()

def make_axis(lo: float, hi: float, spacing: float) -> np.ndarray:
    """Builds an evenly spaced axis from ``lo`` to ``hi`` (both included).

    The number of intervals is rounded so that the last sample lands on ``hi``.
    """
    if hi <= lo:
        raise ValueError('axis upper bound must exceed the lower bound')
    if spacing <= 0:
        raise ValueError('axis spacing must be positive')

    intervals = max(1, int(round((hi - lo) / spacing)))
    return np.linspace(lo, hi, intervals + 1)

def nested_axes(lo: float, hi: float, intervals: int, levels: int) -> Tuple[np.ndarray, ...]:
    """Builds ``levels`` axes over ``[lo, hi]``, each one a refinement of the previous one."""
    return tuple(np.linspace(lo, hi, intervals * 2 ** level + 1) for level in range(levels))

def product_points(axes: Sequence[np.ndarray]) -> np.ndarray:
    """Returns the ``(N, d)`` array of nodes of the rectangular grid spanned by ``axes``."""
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.stack([m.ravel() for m in mesh], axis=-1)

def default_rng(seed: Optional[int]) -> np.random.Generator:
    if seed is None:
        raise ValueError('a seed is required for randomized probes')
    return np.random.default_rng(seed)

def chunks(total: int, size: int) -> Iterable[slice]:
    for start in range(0, total, size):
        yield slice(start, min(total, start + size))
