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
from typing import Any, Dict, Optional, Tuple, Union

import logging

import numpy as np

from .abc import Report
from .enums import Convexity, Variant
from .errors import NonConvexInput, VariantUnsupported
from .flags import AssumptionFlags
from .grid import GridFunction, coerce_axes, grid_gradients, is_convex, legendre_conjugate
from .utils import SENTINEL, as_points, default_rng

__all__ = (
    'ConvexProfile',
    'PROFILES',
    'profile_from_name',
    'AssumptionParams',
    'LagrangianSpec',
    'HamiltonianSpec',
    'DualLagrangian',
    'AssumptionReport',
    'hamiltonian_of',
    'dual_lagrangian',
    'validate_assumptions',
)

_log = logging.getLogger(__name__)

# closed form shapes and the shape of their conjugate
_DUAL_KIND = {
    'quadratic': 'quadratic',
    'abs': 'ball',
    'ball': 'abs',
    'zero': 'origin',
    'origin': 'zero',
    'power': 'power',
}

# points closer than this to the boundary of an indicator's domain count as inside
_INDICATOR_SLACK = 1e-12


class ConvexProfile:
    """Represents a convex function of a single vector argument.

    Closed form profiles are ``scale * base(p / stretch)`` for one of the
    base shapes ``quadratic`` (``|u|^2/2``), ``abs`` (``|u|``), ``ball``
    (indicator of the unit ball), ``zero``, ``origin`` (indicator of
    ``{0}``) and ``power`` (``|u|^r/r``). Their conjugates are closed form
    too, so :meth:`conjugate` is an exact involution. Sampled profiles wrap
    a convex :class:`GridFunction` and are conjugated by scan.

    Attributes
    ----------
    kind: :class:`str`
        The base shape, or ``'grid'`` for sampled profiles.
    scale: :class:`float`
        The factor in front of the base shape.
    stretch: :class:`float`
        The factor the argument is divided by.
    exponent: :class:`float`
        The exponent ``r`` of ``power`` profiles.
    grid: Optional[:class:`GridFunction`]
        The samples of a ``grid`` profile.
    """
    __slots__ = ('kind', 'scale', 'stretch', 'exponent', 'grid')

    def __init__(self, kind: str, scale: float = 1.0, stretch: float = 1.0, *, exponent: float = 2.0, grid: Optional[GridFunction] = None):
        if kind != 'grid' and kind not in _DUAL_KIND:
            raise ValueError('unknown profile kind {0!r}'.format(kind))
        if scale <= 0 or stretch <= 0:
            raise ValueError('profile scale and stretch must be positive')
        if kind == 'power' and exponent <= 1:
            raise ValueError('power profiles need an exponent above 1')

        if kind == 'grid':
            if grid is None:
                raise TypeError('grid profiles need a GridFunction')
            if grid.convexity != Convexity.CONVEX:
                raise NonConvexInput('sampled profiles must be flagged convex, got {0}'.format(grid.convexity))
            grid.verify_flag()

        self.kind = kind
        self.scale = float(scale)
        self.stretch = float(stretch)
        self.exponent = float(exponent)
        self.grid = grid

    @classmethod
    def from_grid(cls, grid: GridFunction) -> ConvexProfile:
        """Wraps a convex-flagged :class:`GridFunction`.

        Raises
        ------
        NonConvexInput:
            The function is not flagged convex or its samples contradict the flag.
        """
        return cls('grid', grid=grid)

    @property
    def is_closed_form(self) -> bool:
        return self.kind != 'grid'

    @property
    def is_indicator(self) -> bool:
        """:class:`bool`: Returns ``True`` for profiles that only take the values ``0`` and ``+inf``."""
        return self.kind in ('ball', 'origin')

    def _base(self, u: np.ndarray) -> np.ndarray:
        norm = np.linalg.norm(u, axis=1)
        kind = self.kind
        if kind == 'quadratic':
            return 0.5 * norm ** 2
        if kind == 'abs':
            return norm
        if kind == 'zero':
            return np.zeros_like(norm)
        if kind == 'ball':
            return np.where(norm <= 1.0 + _INDICATOR_SLACK, 0.0, SENTINEL)
        if kind == 'origin':
            return np.where(norm <= _INDICATOR_SLACK, 0.0, SENTINEL)
        return norm ** self.exponent / self.exponent

    def _base_gradient(self, u: np.ndarray) -> np.ndarray:
        norm = np.linalg.norm(u, axis=1, keepdims=True)
        kind = self.kind
        if kind == 'quadratic':
            return u.copy()
        if kind == 'abs':
            safe = np.where(norm > 0, norm, 1.0)
            return np.where(norm > 0, u / safe, 0.0)
        if kind == 'zero':
            return np.zeros_like(u)
        if kind == 'ball':
            return np.where(norm < 1.0, 0.0, np.nan) * np.ones_like(u)
        if kind == 'origin':
            return np.where(norm <= _INDICATOR_SLACK, 0.0, np.nan) * np.ones_like(u)
        safe = np.where(norm > 0, norm, 1.0)
        return np.where(norm > 0, safe ** (self.exponent - 2.0) * u, 0.0)

    def __call__(self, p: Any) -> np.ndarray:
        """Evaluates the profile at the rows of ``p``; ``+inf`` comes back as the sentinel."""
        if self.kind == 'grid':
            p = as_points(p, self.grid.dim)
            out = np.full(p.shape[0], SENTINEL)
            inside = self.grid.contains(p)
            if inside.any():
                out[inside] = self.grid(p[inside])
            return out

        p = as_points(p)
        values = self.scale * self._base(p / self.stretch)
        return np.minimum(values, SENTINEL)

    def gradient(self, p: Any) -> np.ndarray:
        """Returns a gradient (a subgradient at kinks) at the rows of ``p``.

        Points outside the effective domain give ``nan`` rows.
        """
        if self.kind == 'grid':
            p = as_points(p, self.grid.dim)
            out = np.full(p.shape, np.nan)
            inside = self.grid.contains(p)
            if inside.any():
                out[inside] = grid_gradients(self.grid, p[inside])
            return out

        p = as_points(p)
        return (self.scale / self.stretch) * self._base_gradient(p / self.stretch)

    def conjugate(self, dual_axes: Any = None) -> ConvexProfile:
        """Returns the Legendre transform of this profile.

        Parameters
        ----------
        dual_axes:
            Where to sample the conjugate of a ``grid`` profile. Defaults to the
            profile's own axes. Ignored for closed form profiles.
        """
        if self.kind == 'grid':
            axes = self.grid.axes if dual_axes is None else coerce_axes(dual_axes)
            return ConvexProfile.from_grid(legendre_conjugate(self.grid, axes))

        exponent = self.exponent
        if self.kind == 'power':
            exponent = self.exponent / (self.exponent - 1.0)

        # (a f(./b))* = a f*(b ./ a)
        return ConvexProfile(_DUAL_KIND[self.kind], self.scale, self.scale / self.stretch, exponent=exponent)

    def domain_distance(self) -> float:
        """Returns the distance from the origin to the set where the profile is finite."""
        if self.kind != 'grid':
            return 0.0

        finite = self.grid.finite.ravel()
        if not finite.any():
            return float('inf')
        return float(np.linalg.norm(self.grid.points[finite], axis=1).min())

    def to_grid(self, axes: Any) -> GridFunction:
        """Samples the profile on ``axes`` as a convex-flagged :class:`GridFunction`."""
        return GridFunction.from_function(axes, self.__call__, Convexity.CONVEX)

    @property
    def name(self) -> str:
        if self.kind == 'grid':
            return 'grid{0}'.format(self.grid.shape)
        if self.kind == 'power':
            return 'power(r={0:g}, scale={1:g}, stretch={2:g})'.format(self.exponent, self.scale, self.stretch)
        return '{0}(scale={1:g}, stretch={2:g})'.format(self.kind, self.scale, self.stretch)

    def __repr__(self):
        return '<ConvexProfile {0}>'.format(self.name)


#: Closed form profiles that configuration files can name, as ``(kind, exponent)``.
#: ``harmonic`` is the quadratic profile under the name potentials usually go by.
PROFILES: Dict[str, Tuple[str, float]] = {
    'quadratic': ('quadratic', 2.0),
    'harmonic': ('quadratic', 2.0),
    'abs': ('abs', 1.0),
    'zero': ('zero', 2.0),
    'quartic': ('power', 4.0),
}

def profile_from_name(name: str, scale: float = 1.0) -> ConvexProfile:
    """Builds ``scale`` times a closed form profile registered in :data:`PROFILES`.

    Raises
    ------
    ValueError:
        The name is not registered or the scale is not positive.
    """
    try:
        kind, exponent = PROFILES[name.strip().lower()]
    except KeyError:
        raise ValueError('unknown profile {0!r}, expected one of {1}'.format(name, ', '.join(sorted(PROFILES)))) from None
    return ConvexProfile(kind, scale, exponent=exponent)


class AssumptionParams:
    """Holds the constants of the standing growth hypotheses on a Lagrangian.

    Parameters
    ----------
    rho: :class:`float`
        The bound in ``dist(0, F(x)) <= rho (1 + |x|)``.
    alpha: :class:`float`
        The shift in ``theta(max(0, |p| - alpha |x|))``.
    beta: :class:`float`
        The slack in ``- beta |x|``.
    theta: Optional[Union[:class:`GridFunction`, :class:`ConvexProfile`]]
        A non-decreasing function on ``[0, inf)``, either sampled on an axis
        starting at ``0`` or given as a closed form radial profile.
        Defaults to zero.
    """
    __slots__ = ('rho', 'alpha', 'beta', 'theta')

    def __init__(self, rho: float = 0.0, alpha: float = 0.0, beta: float = 0.0, theta: Optional[Union[GridFunction, ConvexProfile]] = None):
        if min(rho, alpha, beta) < 0:
            raise ValueError('rho, alpha and beta must be nonnegative')

        if theta is None:
            theta = ConvexProfile('zero')
        if isinstance(theta, GridFunction):
            if theta.dim != 1 or theta.axes[0][0] != 0.0:
                raise ValueError('theta must be sampled on a one dimensional axis starting at 0')
            if np.any(np.diff(theta.values) < 0):
                raise ValueError('theta must be non-decreasing')
        elif not isinstance(theta, ConvexProfile) or theta.is_indicator or theta.kind == 'grid':
            raise TypeError('theta must be a GridFunction or a finite closed form ConvexProfile')

        self.rho = float(rho)
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.theta = theta

    @classmethod
    def from_profile(cls, name: str, scale: float = 1.0, **kwargs: float) -> AssumptionParams:
        """Uses a registered radial profile from :data:`PROFILES` as ``theta``."""
        return cls(theta=profile_from_name(name, scale), **kwargs)

    def _samples(self, r_max: float = 16.0) -> Tuple[np.ndarray, np.ndarray]:
        if isinstance(self.theta, GridFunction):
            return self.theta.axes[0], self.theta.values
        axis = np.linspace(0.0, r_max, 1601)
        return axis, self.theta(axis)

    def theta_at(self, r: Any) -> np.ndarray:
        """Evaluates ``theta``; a sampled ``theta`` continues with its last slope beyond its axis."""
        r = np.asarray(r, dtype=float)
        if isinstance(self.theta, ConvexProfile):
            return self.theta(r.ravel()).reshape(r.shape)

        axis, values = self._samples()
        out = np.interp(r, axis, values)
        beyond = r > axis[-1]
        if np.any(beyond):
            slope = (values[-1] - values[-2]) / (axis[-1] - axis[-2])
            out = np.where(beyond, values[-1] + slope * (r - axis[-1]), out)
        return out

    @property
    def superlinear(self) -> bool:
        """:class:`bool`: A heuristic growth test on sampled ``theta``.

        The last slope has to exceed the first one and the last value has to
        exceed the value of the chord through the first two samples.
        """
        axis, values = self._samples()
        first = (values[1] - values[0]) / (axis[1] - axis[0])
        last = (values[-1] - values[-2]) / (axis[-1] - axis[-2])
        linear = values[0] + first * (axis[-1] - axis[0])
        return bool(last > first and values[-1] > linear)

    def __repr__(self):
        return '<AssumptionParams rho={0} alpha={1} beta={2}>'.format(self.rho, self.alpha, self.beta)


class LagrangianSpec:
    """Represents a time independent, jointly convex Lagrangian ``L(x, p)``.

    Parameters
    ----------
    variant: :class:`str`
        One of the :class:`Variant` constants.
    mass: :class:`float`
        The mass of the quadratic variant.
    l0: Optional[Union[:class:`ConvexProfile`, :class:`GridFunction`]]
        The velocity profile of the other variants.
    potential: Optional[Union[:class:`ConvexProfile`, :class:`GridFunction`]]
        The convex potential ``U`` of the separable variant.
    params: Optional[:class:`AssumptionParams`]
        The growth constants checked by :func:`validate_assumptions`.
    dim: :class:`int`
        The dimension of the state space.

    Attributes
    ----------
    kinetic: :class:`ConvexProfile`
        ``L0``; for the quadratic variant ``m |p|^2 / 2``.
    potential: Optional[:class:`ConvexProfile`]
        ``U``, or ``None`` when the Lagrangian does not depend on the state.

    Raises
    ------
    NonConvexInput:
        A sampled profile is not convex.
    """
    __slots__ = ('variant', 'mass', 'kinetic', 'potential', 'params', 'dim')

    def __init__(
        self,
        variant: str,
        *,
        mass: float = 1.0,
        l0: Optional[Union[ConvexProfile, GridFunction]] = None,
        potential: Optional[Union[ConvexProfile, GridFunction]] = None,
        params: Optional[AssumptionParams] = None,
        dim: int = 1,
    ):
        if variant not in Variant.ALL:
            raise VariantUnsupported('unknown Lagrangian variant {0!r}'.format(variant))
        if dim not in (1, 2):
            raise ValueError('only dimensions 1 and 2 are supported')

        if variant == Variant.QUADRATIC:
            if mass <= 0:
                raise ValueError('mass must be positive')
            kinetic = ConvexProfile('quadratic', mass)
            potential = None
        else:
            if l0 is None:
                raise TypeError('the {0} variant needs an l0 profile'.format(variant))
            kinetic = _as_profile(l0)

        if variant == Variant.SEPARABLE_CONVEX:
            if potential is None:
                raise TypeError('the separable variant needs a potential')
            potential = _as_profile(potential)
        elif variant == Variant.STATE_INDEPENDENT:
            potential = None

        if kinetic.kind == 'grid' and not kinetic.grid.finite.any():
            raise NonConvexInput('l0 must be proper')

        self.variant = variant
        self.mass = float(mass)
        self.kinetic = kinetic
        self.potential = potential
        self.params = params or AssumptionParams()
        self.dim = dim

    @classmethod
    def quadratic(cls, mass: float = 1.0, **kwargs: Any) -> LagrangianSpec:
        return cls(Variant.QUADRATIC, mass=mass, **kwargs)

    @classmethod
    def state_independent(cls, l0: Union[ConvexProfile, GridFunction], **kwargs: Any) -> LagrangianSpec:
        return cls(Variant.STATE_INDEPENDENT, l0=l0, **kwargs)

    @classmethod
    def separable(cls, l0: Union[ConvexProfile, GridFunction], potential: Union[ConvexProfile, GridFunction], **kwargs: Any) -> LagrangianSpec:
        return cls(Variant.SEPARABLE_CONVEX, l0=l0, potential=potential, **kwargs)

    @property
    def is_quadratic(self) -> bool:
        return self.variant == Variant.QUADRATIC

    @property
    def is_state_independent(self) -> bool:
        """:class:`bool`: Returns ``True`` if ``L`` does not depend on ``x``."""
        return self.potential is None

    def __call__(self, x: Any, p: Any) -> np.ndarray:
        """Evaluates ``L`` at paired rows of ``x`` and ``p``."""
        p = as_points(p, self.dim)
        values = self.kinetic(p)
        if self.potential is not None:
            values = values + self.potential(as_points(x, self.dim))
        return np.minimum(values, SENTINEL)

    def __repr__(self):
        return '<LagrangianSpec variant={0} kinetic={1} potential={2}>'.format(
            self.variant, self.kinetic.name, None if self.potential is None else self.potential.name)


def _as_profile(value: Union[ConvexProfile, GridFunction]) -> ConvexProfile:
    if isinstance(value, ConvexProfile):
        return value
    if isinstance(value, GridFunction):
        return ConvexProfile.from_grid(value)
    raise TypeError('expected ConvexProfile or GridFunction, got {0.__class__.__name__}'.format(value))


class HamiltonianSpec:
    """Represents a separable Hamiltonian ``H(x, q) = K(q) + coupling * U(x)``.

    Hamiltonians of a :class:`LagrangianSpec` have ``K = L0*`` and
    ``coupling = -1``, so they are convex in ``q`` and concave in ``x``.
    :meth:`separable` builds any other separable Hamiltonian, such as the
    harmonic oscillator ``q^2/2 + x^2/2``.

    Attributes
    ----------
    variant: :class:`str`
        The :class:`Variant` of the Lagrangian this came from.
    mass: :class:`float`
        The mass of the quadratic variant.
    kinetic: :class:`ConvexProfile`
        ``K``.
    potential: Optional[:class:`ConvexProfile`]
        ``U``.
    coupling: :class:`float`
        The sign in front of ``U``.
    dim: :class:`int`
        The dimension of the state space.
    """
    __slots__ = ('variant', 'mass', 'kinetic', 'potential', 'coupling', 'dim')

    def __init__(self, variant: str, kinetic: ConvexProfile, potential: Optional[ConvexProfile] = None, *, mass: float = 1.0, coupling: float = -1.0, dim: int = 1):
        self.variant = variant
        self.mass = float(mass)
        self.kinetic = kinetic
        self.potential = potential
        self.coupling = float(coupling)
        self.dim = dim

    @classmethod
    def separable(cls, kinetic: ConvexProfile, potential: ConvexProfile, coupling: float = 1.0, dim: int = 1) -> HamiltonianSpec:
        """Builds ``H(x, q) = kinetic(q) + coupling * potential(x)`` directly."""
        return cls(Variant.SEPARABLE_CONVEX, kinetic, potential, coupling=coupling, dim=dim)

    @property
    def is_quadratic(self) -> bool:
        return self.variant == Variant.QUADRATIC

    def __call__(self, x: Any, q: Any) -> np.ndarray:
        q = as_points(q, self.dim)
        values = self.kinetic(q)
        if self.potential is not None:
            values = values + self.coupling * self.potential(as_points(x, self.dim))
        return values

    def dq(self, q: Any) -> np.ndarray:
        """Returns ``dH/dq`` at the rows of ``q``."""
        return self.kinetic.gradient(q)

    def dx(self, x: Any) -> np.ndarray:
        """Returns ``dH/dx`` at the rows of ``x``."""
        x = as_points(x, self.dim)
        if self.potential is None:
            return np.zeros_like(x)
        return self.coupling * self.potential.gradient(x)

    def shape_report(self, axis: Any, slices: int = 5) -> Tuple[bool, bool]:
        """Tests convexity in ``q`` and concavity in ``x`` on one dimensional slices.

        Returns
        -------
        Tuple[:class:`bool`, :class:`bool`]
            Whether every ``q`` slice was convex and every ``x`` slice concave.
        """
        axis = coerce_axes(axis)[0]
        anchors = np.linspace(axis[0], axis[-1], slices)
        convex_q = concave_x = True
        for anchor in anchors:
            qs = GridFunction(axis, self(np.full(axis.size, anchor), axis))
            xs = GridFunction(axis, self(axis, np.full(axis.size, anchor)))
            convex_q &= is_convex(qs).passed
            concave_x &= is_convex(-xs).passed
        return bool(convex_q), bool(concave_x)

    def __repr__(self):
        return '<HamiltonianSpec variant={0} kinetic={1} coupling={2}>'.format(self.variant, self.kinetic.name, self.coupling)


def hamiltonian_of(lagrangian: LagrangianSpec, dual_axes: Any = None) -> HamiltonianSpec:
    """Builds the Hamiltonian ``H(x, q) = sup_p <p, q> - L(x, p)``.

    Closed form profiles are conjugated exactly. A sampled ``L0`` is
    conjugated on ``dual_axes`` and its biconjugate is compared with the
    samples.

    Raises
    ------
    NonConvexInput:
        The sampled ``L0`` does not agree with its biconjugate.
    """
    kinetic = lagrangian.kinetic
    conj = kinetic.conjugate(dual_axes)

    if kinetic.kind == 'grid':
        back = legendre_conjugate(conj.grid, kinetic.grid.axes)
        finite = kinetic.grid.finite & back.finite
        gap = float(np.abs(back.values[finite] - kinetic.grid.values[finite]).max()) if finite.any() else 0.0
        bound = 2.0 * kinetic.grid.resolution * max(1.0, float(np.abs(conj.grid.axes[0]).max()))
        _log.debug('Biconjugate of sampled L0 deviates by %.3g (bound %.3g)', gap, bound)
        if gap > bound:
            raise NonConvexInput('L0 differs from its biconjugate by {0:.3g}'.format(gap))

    return HamiltonianSpec(lagrangian.variant, conj, lagrangian.potential, mass=lagrangian.mass, dim=lagrangian.dim)


class DualLagrangian:
    """Represents ``L~(v, q) = L*(q, v) = L0*(v) + U*(q)``.

    For Lagrangians without a potential ``U*`` is the indicator of ``{0}``,
    which pins the dual path in place.

    Attributes
    ----------
    variant: :class:`str`
        The variant of the Lagrangian this was derived from.
    position: :class:`ConvexProfile`
        ``L0*``, the part that depends on ``v``.
    velocity: :class:`ConvexProfile`
        ``U*``, the part that depends on ``q``.
    mass: :class:`float`
        The mass of the quadratic variant.
    """
    __slots__ = ('variant', 'position', 'velocity', 'mass', 'dim')

    def __init__(self, variant: str, position: ConvexProfile, velocity: ConvexProfile, mass: float = 1.0, dim: int = 1):
        self.variant = variant
        self.position = position
        self.velocity = velocity
        self.mass = mass
        self.dim = dim

    @property
    def constrained(self) -> bool:
        """:class:`bool`: Returns ``True`` if ``q`` is forced to zero."""
        return self.velocity.kind == 'origin'

    def __call__(self, v: Any, q: Any) -> np.ndarray:
        values = self.position(as_points(v, self.dim)) + self.velocity(as_points(q, self.dim))
        return np.minimum(values, SENTINEL)

    def dual(self) -> LagrangianSpec:
        """Returns the Lagrangian whose dual this is."""
        kinetic = self.position.conjugate()
        potential = self.velocity.conjugate()
        if self.variant == Variant.QUADRATIC:
            return LagrangianSpec.quadratic(kinetic.scale, dim=self.dim)
        if potential.kind == 'zero':
            return LagrangianSpec.state_independent(kinetic, dim=self.dim)
        return LagrangianSpec.separable(kinetic, potential, dim=self.dim)

    def __repr__(self):
        return '<DualLagrangian position={0} velocity={1}>'.format(self.position.name, self.velocity.name)


def dual_lagrangian(lagrangian: Union[LagrangianSpec, DualLagrangian], dual_axes: Any = None) -> Union[DualLagrangian, LagrangianSpec]:
    """Builds ``L~(v, q) = L*(q, v)``.

    Applied to a :class:`DualLagrangian` it returns the original
    :class:`LagrangianSpec`, so the construction is an involution.
    """
    if isinstance(lagrangian, DualLagrangian):
        return lagrangian.dual()

    position = lagrangian.kinetic.conjugate(dual_axes)
    if lagrangian.potential is None:
        velocity = ConvexProfile('origin')
    else:
        velocity = lagrangian.potential.conjugate(dual_axes)
    return DualLagrangian(lagrangian.variant, position, velocity, mass=lagrangian.mass, dim=lagrangian.dim)


class AssumptionReport(Report):
    """Represents the outcome of :func:`validate_assumptions`.

    Attributes
    ----------
    flags: :class:`AssumptionFlags`
        Which hypotheses held at every sample.
    witnesses: Dict[:class:`str`, Tuple[:class:`float`, ...]]
        For each failed hypothesis, the worst sampled ``(x, p)`` or ``x``.
    worst: Dict[:class:`str`, :class:`float`]
        The largest violation found per hypothesis; ``0`` if none.
    samples: :class:`int`
        How many points were drawn.
    """
    __slots__ = ('flags', 'witnesses', 'worst', 'samples')
    _fields = ('a1', 'a2', 'a3', 'superlinear', 'worst', 'witnesses', 'samples')

    def __init__(self, flags: AssumptionFlags, witnesses: Dict[str, tuple], worst: Dict[str, float], samples: int):
        self.flags = flags
        self.witnesses = witnesses
        self.worst = worst
        self.samples = samples

    @property
    def passed(self) -> bool:
        return self.flags.all_passed

    @property
    def a1(self) -> bool:
        return self.flags.a1

    @property
    def a2(self) -> bool:
        return self.flags.a2

    @property
    def a3(self) -> bool:
        return self.flags.a3

    @property
    def superlinear(self) -> bool:
        return self.flags.superlinear


def validate_assumptions(
    lagrangian: LagrangianSpec,
    box: Tuple[float, float] = (-4.0, 4.0),
    n_samples: int = 10_000,
    seed: int = 0,
    tol: float = 1e-9,
) -> AssumptionReport:
    """Checks the standing hypotheses on ``lagrangian`` by sampling.

    - (A1) midpoint convexity of ``L`` on random pairs of ``(x, p)``.
    - (A2) ``dist(0, F(x)) <= rho (1 + |x|)`` with ``F(x) = {p; L(x, p) < inf}``.
    - (A3) ``L(x, p) >= theta(max(0, |p| - alpha |x|)) - beta |x|``.

    Parameters
    ----------
    lagrangian: :class:`LagrangianSpec`
        The Lagrangian to check, with its :class:`AssumptionParams`.
    box: Tuple[:class:`float`, :class:`float`]
        The range every coordinate of ``x`` and ``p`` is drawn from.
    n_samples: :class:`int`
        How many pairs are drawn.
    seed: :class:`int`
        The seed of the generator.
    tol: :class:`float`
        The relative tolerance of every comparison.

    Returns
    -------
    :class:`AssumptionReport`
    """
    rng = default_rng(seed)
    lo, hi = box
    d = lagrangian.dim
    params = lagrangian.params

    x1, x2, p1, p2 = (rng.uniform(lo, hi, size=(n_samples, d)) for _ in range(4))
    l1 = lagrangian(x1, p1)
    l2 = lagrangian(x2, p2)
    lm = lagrangian((x1 + x2) / 2, (p1 + p2) / 2)

    witnesses: Dict[str, tuple] = {}
    worst: Dict[str, float] = {}

    finite = (l1 < SENTINEL) & (l2 < SENTINEL)
    scale = np.maximum(1.0, np.abs(np.where(finite, l1, 0.0)) + np.abs(np.where(finite, l2, 0.0)))
    excess = np.where(finite, lm - 0.5 * (l1 + l2), -np.inf) / scale
    a1 = _record('a1', excess, tol, np.hstack([(x1 + x2) / 2, (p1 + p2) / 2]), witnesses, worst)

    radius = np.linalg.norm(x1, axis=1)
    reach = lagrangian.kinetic.domain_distance()
    if lagrangian.potential is not None:
        reach = np.where(lagrangian.potential(x1) < SENTINEL, reach, np.inf)
    excess = reach - params.rho * (1.0 + radius)
    a2 = _record('a2', np.broadcast_to(excess, radius.shape), tol, x1, witnesses, worst)

    speed = np.linalg.norm(p1, axis=1)
    floor = params.theta_at(np.maximum(0.0, speed - params.alpha * radius)) - params.beta * radius
    excess = np.where(l1 < SENTINEL, (floor - l1) / np.maximum(1.0, np.abs(floor)), -np.inf)
    a3 = _record('a3', excess, tol, np.hstack([x1, p1]), witnesses, worst)

    flags = AssumptionFlags(a1=a1, a2=a2, a3=a3, superlinear=params.superlinear)
    _log.info('Assumption sampling on %s: %r', lagrangian, dict(flags))
    return AssumptionReport(flags, witnesses, worst, n_samples)

def _record(name: str, excess: np.ndarray, tol: float, where: np.ndarray, witnesses: Dict[str, tuple], worst: Dict[str, float]) -> bool:
    index = int(np.argmax(excess))
    value = float(excess[index])
    worst[name] = max(0.0, value)
    if value > tol:
        witnesses[name] = tuple(float(c) for c in where[index])
        return False
    return True
