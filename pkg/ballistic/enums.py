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
    'Convexity',
    'Variant',
    'Provenance',
    'Direction',
    'Sense',
    'MapMethod',
    'Integrator',
)

class Convexity:
    """
    An enumeration that details what is known about the shape of a :class:`GridFunction`.

    Attributes
    -----------
    CONVEX:
        The function is convex along every grid line.
    CONCAVE:
        The function is concave along every grid line.
    UNKNOWN:
        Nothing is known about the shape.
    """
    CONVEX = 'convex'
    CONCAVE = 'concave'
    UNKNOWN = 'unknown'

    ALL = frozenset((CONVEX, CONCAVE, UNKNOWN))

class Variant:
    """
    An enumeration that details the families of Lagrangians that are supported.

    Attributes
    -----------
    QUADRATIC:
        ``L(x, p) = m|p|^2/2`` for a mass ``m > 0``.
    STATE_INDEPENDENT:
        ``L(x, p) = L0(p)`` for a convex ``L0``.
    SEPARABLE_CONVEX:
        ``L(x, p) = L0(p) + U(x)`` for convex ``L0`` and ``U``.
    """
    QUADRATIC = 'quadratic'
    STATE_INDEPENDENT = 'state_independent'
    SEPARABLE_CONVEX = 'separable_convex'

    ALL = frozenset((QUADRATIC, STATE_INDEPENDENT, SEPARABLE_CONVEX))

class Provenance:
    """
    An enumeration that details which cost a :class:`CostMatrix` was filled with.

    Attributes
    -----------
    BALLISTIC:
        The ballistic cost ``b_T(v, x)``.
    FIXED_END:
        The fixed-end cost ``c_T(y, x)``.
    DUAL_FIXED_END:
        The dual fixed-end cost built from the dual Lagrangian.
    BILINEAR:
        The pairing ``<v, x>``.
    COMPOSED:
        The restricted infimum ``min_y <v, y> + c_T(y, x)`` over an intermediate grid.
    CUSTOM:
        Any user supplied matrix.
    """
    BALLISTIC = 'ballistic'
    FIXED_END = 'fixed_end'
    DUAL_FIXED_END = 'dual_fixed_end'
    BILINEAR = 'bilinear'
    COMPOSED = 'composed'
    CUSTOM = 'custom'

class Direction:
    """
    An enumeration that details whether a transport problem is minimized or maximized.

    Attributes
    -----------
    MIN:
        Potentials satisfy ``h(x) - g(v) <= cost(v, x)``.
    MAX:
        Potentials satisfy ``h(x) - g(v) >= cost(v, x)``.
    """
    MIN = 'min'
    MAX = 'max'

class Sense:
    """
    An enumeration that details the orientation of a one dimensional rearrangement.

    Attributes
    -----------
    MONOTONE:
        Increasing pairing, optimal for the maximal bilinear value.
    ANTITONE:
        Decreasing pairing, optimal for the minimal bilinear value.
    """
    MONOTONE = 'monotone'
    ANTITONE = 'antitone'

class MapMethod:
    """
    An enumeration that details how a :class:`TransportMapSample` was produced.

    Attributes
    -----------
    FLOW_FROM_POTENTIAL:
        Hamiltonian flow started from the gradient of a potential.
    LP_SUPPORT:
        Read off the support of an optimal plan.
    """
    FLOW_FROM_POTENTIAL = 'flow_from_potential'
    LP_SUPPORT = 'lp_support'

class Integrator:
    """
    An enumeration that details the time stepping of Hamiltonian flows.

    Attributes
    -----------
    VERLET:
        Störmer-Verlet, second order and symplectic.
    EULER:
        Semi-implicit (symplectic) Euler, first order.
    """
    VERLET = 'verlet'
    EULER = 'euler'
