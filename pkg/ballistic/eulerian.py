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
from typing import Any, Callable, List, Optional, Tuple, Union

import logging

import numpy as np
from scipy import integrate, stats

from .abc import Certificate, Report
from .costs import CostSpec
from .enums import Sense
from .errors import DimensionUnsupported, GridMismatch, InfeasiblePath, InputError, OutOfDomain
from .lagrangian import DualLagrangian, LagrangianSpec, dual_lagrangian
from .measure import DiscreteMeasure
from .transport import ballistic_over, ballistic_under, brenier_map_1d, c_transport
from .utils import SENTINEL

__all__ = (
    'DensityPath',
    'VelocityPath',
    'EulerianReport',
    'ConvergenceTable',
    'continuity_residual',
    'action',
    'displacement_path',
    'static_path',
    'eulerian_upper_bound_check',
    'eulerian_lower_bound_check',
    'convergence_table',
)

_log = logging.getLogger(__name__)

#: Cells holding less mass than this are dropped when a density is atomized.
MASS_FLOOR = 1e-14

#: Allowed drift of the total mass of a density from one.
MASS_TOLERANCE = 1e-8


def _edges(edges: Any) -> Tuple[np.ndarray, float]:
    edges = np.asarray(edges, dtype=float).ravel()
    if edges.size < 2:
        raise GridMismatch('a spatial grid needs at least one cell')
    widths = np.diff(edges)
    if np.any(widths <= 0) or not np.allclose(widths, widths[0], rtol=1e-9, atol=0.0):
        raise GridMismatch('cell edges must be uniformly spaced and increasing')
    return edges, float(widths[0])

def _times(times: Any) -> np.ndarray:
    times = np.asarray(times, dtype=float).ravel()
    if times.size < 2 or times[0] != 0 or np.any(np.diff(times) <= 0):
        raise GridMismatch('time nodes must start at 0 and increase')
    return times


class DensityPath:
    """Represents a path of probability densities on a one dimensional cell grid.

    Parameters
    ----------
    times:
        The time nodes ``0 = t_0 < ... < t_K = T``.
    edges:
        The ``n + 1`` uniformly spaced cell edges.
    densities:
        The ``(K + 1, n)`` cell masses.

    Raises
    ------
    GridMismatch:
        The shapes do not agree with the grids.
    InputError:
        A mass is negative or a total differs from one by more than ``1e-8``.
    """
    __slots__ = ('times', 'edges', 'width', 'densities')

    def __init__(self, times: Any, edges: Any, densities: Any):
        self.times = _times(times)
        self.edges, self.width = _edges(edges)
        densities = np.asarray(densities, dtype=float)
        if densities.shape != (self.times.size, self.edges.size - 1):
            raise GridMismatch('expected densities of shape {0}, got {1}'.format((self.times.size, self.edges.size - 1), densities.shape))
        if np.any(densities < 0) or not np.all(np.isfinite(densities)):
            raise InputError('densities must be finite and non-negative')
        totals = densities.sum(axis=1)
        if np.any(np.abs(totals - 1.0) > MASS_TOLERANCE):
            raise InputError('every density must have unit mass, worst total is {0!r}'.format(float(totals[np.argmax(np.abs(totals - 1.0))])))
        self.densities = densities

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def at(self, index: int) -> DiscreteMeasure:
        """Atomizes the density at a time node onto the cell centers."""
        masses = self.densities[index]
        keep = masses > MASS_FLOOR
        return DiscreteMeasure(self.centers[keep], masses[keep] / masses[keep].sum())

    def __repr__(self):
        return '<DensityPath steps={0} cells={1} width={2:g}>'.format(self.times.size - 1, self.edges.size - 1, self.width)


class VelocityPath:
    """Represents a path of velocity fields sampled on cell interfaces.

    Parameters
    ----------
    times:
        The time nodes.
    edges:
        The cell edges the velocities live on.
    velocities:
        The ``(K + 1, n + 1)`` interface velocities.
    v_max: Optional[:class:`float`]
        A bound on ``|w|``, if any.
    """
    __slots__ = ('times', 'edges', 'width', 'velocities', 'v_max')

    def __init__(self, times: Any, edges: Any, velocities: Any, v_max: Optional[float] = None):
        self.times = _times(times)
        self.edges, self.width = _edges(edges)
        velocities = np.asarray(velocities, dtype=float)
        if velocities.shape != (self.times.size, self.edges.size):
            raise GridMismatch('expected velocities of shape {0}, got {1}'.format((self.times.size, self.edges.size), velocities.shape))
        if not np.all(np.isfinite(velocities)):
            raise InputError('velocities must be finite')
        if v_max is not None and np.abs(velocities).max() > v_max:
            raise InputError('velocities exceed the bound {0:g}'.format(v_max))
        self.velocities = velocities
        self.v_max = v_max

    @property
    def cell_velocities(self) -> np.ndarray:
        """:class:`numpy.ndarray`: Returns the ``(K + 1, n)`` averages of neighbouring interface velocities."""
        return 0.5 * (self.velocities[:, 1:] + self.velocities[:, :-1])

    def __repr__(self):
        return '<VelocityPath steps={0} interfaces={1}>'.format(self.times.size - 1, self.edges.size)


def _check_grids(rho: DensityPath, w: VelocityPath) -> None:
    if rho.times.shape != w.times.shape or not np.allclose(rho.times, w.times):
        raise GridMismatch('density and velocity paths have different time nodes')
    if rho.edges.shape != w.edges.shape or not np.allclose(rho.edges, w.edges):
        raise GridMismatch('density and velocity paths have different cells')

def _upwind_flux(masses: np.ndarray, velocities: np.ndarray, width: float) -> np.ndarray:
    # zero flux through the two boundary interfaces
    inner = velocities[1:-1]
    upwind = np.where(inner > 0, masses[:-1], masses[1:])
    flux = np.zeros_like(velocities)
    flux[1:-1] = inner * upwind / width
    return flux

def continuity_residual(rho: DensityPath, w: VelocityPath) -> float:
    """Measures how far ``(rho, w)`` is from solving ``d_t rho + d_x (rho w) = 0``.

    The equation is tested in integrated form: the mass left of every
    interior interface has to change at the rate of the upwind flux through
    it, averaged over the two ends of each time step. The result has units
    of mass per time.

    Raises
    ------
    GridMismatch:
        The two paths are sampled differently.
    """
    _check_grids(rho, w)
    cumulative = np.cumsum(rho.densities, axis=1)[:, :-1]
    fluxes = np.array([_upwind_flux(m, v, rho.width) for m, v in zip(rho.densities, w.velocities)])[:, 1:-1]
    if cumulative.shape[1] == 0:
        return 0.0

    dt = np.diff(rho.times)[:, None]
    residual = np.diff(cumulative, axis=0) / dt + 0.5 * (fluxes[1:] + fluxes[:-1])
    return float(np.abs(residual).max())

def action(rho: DensityPath, w: VelocityPath, L: Union[LagrangianSpec, DualLagrangian, Callable[[np.ndarray, np.ndarray], np.ndarray]]) -> float:
    """Evaluates ``int_0^T sum_i L(x_i, w_i(t)) rho_i(t) dt``.

    Cells use the average of their interface velocities; time is integrated
    with the trapezoid rule. ``+inf`` comes back as the sentinel.
    """
    _check_grids(rho, w)
    centers = rho.centers[:, None]
    cells = w.cell_velocities
    slices = np.empty(rho.times.size)
    for k in range(rho.times.size):
        values = np.asarray(L(centers, cells[k][:, None]), dtype=float)
        charged = rho.densities[k] > 0
        if np.any(values[charged] >= SENTINEL):
            return SENTINEL
        slices[k] = float(np.sum(values[charged] * rho.densities[k][charged]))
    return float(integrate.trapezoid(slices, rho.times))

def _particles(nu0: DiscreteMeasure, nuT: DiscreteMeasure, sense: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    pairs = np.array(brenier_map_1d(nu0, nuT, sense).pairs)
    return pairs[:, 0], pairs[:, 1], pairs[:, 2]

def _deposit(positions: np.ndarray, values: np.ndarray, edges: np.ndarray, width: float) -> np.ndarray:
    # linear split between the two nearest cell centers, clamped in the outer half cells
    n = edges.size - 1
    u = (positions - edges[0]) / width - 0.5
    left = np.floor(u).astype(int)
    theta = u - left
    low = np.clip(left, 0, n - 1)
    high = np.clip(left + 1, 0, n - 1)
    return np.bincount(low, weights=values * (1.0 - theta), minlength=n) + np.bincount(high, weights=values * theta, minlength=n)

def _rasterized_slice(positions: np.ndarray, masses: np.ndarray, speeds: np.ndarray, edges: np.ndarray, width: float) -> Tuple[np.ndarray, np.ndarray]:
    cells = _deposit(positions, masses, edges, width)
    momenta = _deposit(positions, masses * speeds, edges, width)
    # an interface carries the mean speed of the mass in its two neighbouring cells
    pair_mass = np.concatenate([[0.0], cells]) + np.concatenate([cells, [0.0]])
    pair_momentum = np.concatenate([[0.0], momenta]) + np.concatenate([momenta, [0.0]])
    velocities = np.divide(pair_momentum, pair_mass, out=np.zeros_like(pair_mass), where=pair_mass > MASS_FLOOR)
    return cells, velocities

def _smoothed_slice(positions: np.ndarray, masses: np.ndarray, speeds: np.ndarray, edges: np.ndarray, width: float, bandwidth: float) -> Tuple[np.ndarray, np.ndarray]:
    z = (edges[:, None] - positions[None, :]) / bandwidth
    cdf = stats.norm.cdf(z) @ masses
    total = cdf[-1] - cdf[0]
    cells = np.diff(cdf) / total
    flux = (stats.norm.pdf(z) @ (masses * speeds)) / (bandwidth * total)

    velocities = np.zeros(edges.size)
    inner = flux[1:-1]
    upwind = np.where(inner > 0, cells[:-1], cells[1:])
    smeared = (stats.norm.pdf(z[1:-1]) @ (masses * speeds)) / np.maximum(stats.norm.pdf(z[1:-1]) @ masses, np.finfo(float).tiny)
    velocities[1:-1] = np.where(upwind > MASS_FLOOR, inner * width / np.maximum(upwind, MASS_FLOOR), smeared)
    return cells, velocities

def displacement_path(
    nu0: DiscreteMeasure,
    nuT: DiscreteMeasure,
    steps: int,
    edges: Any,
    horizon: float = 1.0,
    bandwidth: Optional[float] = None,
    sense: str = Sense.MONOTONE,
) -> Tuple[DensityPath, VelocityPath]:
    """Rasterizes the displacement interpolation between two measures on the line.

    Every charged cell ``(y, x, m)`` of the monotone coupling becomes a
    particle at ``y + t (x - y) / T``. By default its mass is split linearly
    between the two nearest cell centers and every interface carries the
    mean particle speed of the mass in its two neighbouring cells, so the
    quadratic action converges to ``C_T`` at first order in the cell width
    and the time step.

    With a ``bandwidth`` each particle is smeared by a Gaussian of that width
    instead, and interface velocities are the exact smeared flux divided by
    the upwind cell mass. Such a path solves the discrete continuity
    equation up to the time stepping error, which is what
    :func:`eulerian_upper_bound_check` asks for, but its action keeps a bias
    of the order of the bandwidth.

    Parameters
    ----------
    steps: :class:`int`
        The number ``K`` of time steps.
    edges:
        The cell edges; they must cover both measures, and a few bandwidths
        beyond them when smoothing.
    bandwidth: Optional[:class:`float`]
        The width of the Gaussian smearing, if any.
    sense: :class:`str`
        :attr:`Sense.ANTITONE` builds the (non optimal) crossing path instead.

    Raises
    ------
    DimensionUnsupported:
        A measure is not one dimensional.
    OutOfDomain:
        A rasterized particle leaves the grid.
    """
    if nu0.dim != 1 or nuT.dim != 1:
        raise DimensionUnsupported('displacement paths are built on the line only')
    if steps < 1 or horizon <= 0 or (bandwidth is not None and bandwidth <= 0):
        raise ValueError('steps, horizon and bandwidth must be positive')

    edges, width = _edges(edges)
    times = np.linspace(0.0, horizon, steps + 1)
    ys, xs, masses = _particles(nu0, nuT, sense)
    speeds = (xs - ys) / horizon

    if bandwidth is None:
        ends = np.concatenate([ys, xs])
        outside = (ends < edges[0]) | (ends > edges[-1])
        if outside.any():
            raise OutOfDomain(ends[outside][:1], 'a particle leaves the grid')

    densities = np.empty((times.size, edges.size - 1))
    velocities = np.zeros((times.size, edges.size))
    for k, t in enumerate(times):
        positions = ys + t * speeds
        if bandwidth is None:
            densities[k], velocities[k] = _rasterized_slice(positions, masses, speeds, edges, width)
        else:
            densities[k], velocities[k] = _smoothed_slice(positions, masses, speeds, edges, width, bandwidth)

    densities /= densities.sum(axis=1, keepdims=True)
    return DensityPath(times, edges, densities), VelocityPath(times, edges, velocities)

def static_path(measure: DiscreteMeasure, edges: Any, steps: int, horizon: float) -> Tuple[DensityPath, VelocityPath]:
    """Puts every atom of ``measure`` into the cell containing it and keeps it there.

    Raises
    ------
    DimensionUnsupported:
        ``measure`` is not one dimensional.
    OutOfDomain:
        An atom lies outside the grid.
    """
    if measure.dim != 1:
        raise DimensionUnsupported('static paths are built on the line only')

    edges, _ = _edges(edges)
    points = measure.points[:, 0]
    outside = (points < edges[0]) | (points > edges[-1])
    if outside.any():
        raise OutOfDomain(points[outside][:1], 'an atom lies outside the grid')

    cells = np.clip(np.searchsorted(edges, points, side='right') - 1, 0, edges.size - 2)
    masses = np.bincount(cells, weights=measure.weights, minlength=edges.size - 1)
    times = np.linspace(0.0, horizon, steps + 1)
    densities = np.repeat(masses[None, :], times.size, axis=0)
    return DensityPath(times, edges, densities), VelocityPath(times, edges, np.zeros((times.size, edges.size)))


class EulerianReport(Report):
    """Represents a comparison of a dynamic path with a static ballistic value.

    Attributes
    ----------
    certificate: :class:`Certificate`
        The one sided comparison.
    action: :class:`float`
        The action of the path.
    residual: :class:`float`
        The continuity residual of the path.
    terminal_distance: :class:`float`
        The Wasserstein-1 distance between the final density and the target measure.
    margin: :class:`float`
        How far the inequality holds; ``0`` means equality.
    """
    __slots__ = ('certificate', 'action', 'residual', 'terminal_distance', 'margin')
    _fields = ('certificate', 'action', 'residual', 'terminal_distance', 'margin')

    def __init__(self, certificate: Certificate, action: float, residual: float, terminal_distance: float, margin: float):
        self.certificate = certificate
        self.action = action
        self.residual = residual
        self.terminal_distance = terminal_distance
        self.margin = margin

    @property
    def passed(self) -> bool:
        return self.certificate.passed


def _feasibility(rho: DensityPath, w: VelocityPath, nuT: DiscreteMeasure, nuT_tol: float, feasibility_tol: Optional[float]) -> Tuple[float, float]:
    if nuT.dim != 1:
        raise DimensionUnsupported('Eulerian paths live on the line')

    tol = 10.0 * rho.width if feasibility_tol is None else feasibility_tol
    residual = continuity_residual(rho, w)
    if residual > tol:
        raise InfeasiblePath('continuity residual {0:.3g} exceeds {1:.3g}'.format(residual, tol))

    terminal = rho.at(rho.times.size - 1)
    distance = float(stats.wasserstein_distance(terminal.points[:, 0], nuT.points[:, 0], terminal.weights, nuT.weights))
    if distance > nuT_tol:
        raise InfeasiblePath('the path ends {0:.3g} away from the target measure'.format(distance))
    return residual, distance

def eulerian_upper_bound_check(
    spec: CostSpec,
    mu0: DiscreteMeasure,
    rho: DensityPath,
    w: VelocityPath,
    nuT: DiscreteMeasure,
    nuT_tol: float,
    tol: float = 1e-6,
    feasibility_tol: Optional[float] = None,
) -> EulerianReport:
    """Checks ``W_under(mu0, rho_0) + action(rho, w) >= B_under_T(mu0, nuT) - tol``.

    Parameters
    ----------
    nuT_tol: :class:`float`
        How far (in Wasserstein-1) the final density may be from ``nuT``.
    feasibility_tol: Optional[:class:`float`]
        The admissible continuity residual; defaults to ten cell widths.

    Raises
    ------
    InfeasiblePath:
        The path violates the continuity equation or misses ``nuT``.
    """
    residual, distance = _feasibility(rho, w, nuT, nuT_tol, feasibility_tol)
    start = brenier_map_1d(rho.at(0), mu0, Sense.ANTITONE).value
    moved = action(rho, w, spec.lagrangian)
    value = ballistic_under(spec.with_horizon(rho.horizon), mu0, nuT).value

    lhs = start + moved
    certificate = Certificate('W_under(mu0, rho_0) + action >= B_under', value, lhs, tol, inequality=True)
    _log.info('Eulerian upper bound: %.12g against %.12g (residual %.3g)', lhs, value, residual)
    return EulerianReport(certificate, moved, residual, distance, lhs - value)

def eulerian_lower_bound_check(
    spec: CostSpec,
    rho: DensityPath,
    w: VelocityPath,
    nuT: DiscreteMeasure,
    tol: float = 1e-6,
    feasibility_tol: Optional[float] = None,
) -> EulerianReport:
    """Checks ``W_over(nuT, rho_T) - action~(rho, w) <= B_over_T(rho_0, nuT) + tol``.

    ``rho`` is a path of covector densities and the action uses the dual
    Lagrangian, which pins covectors in place when there is no potential.
    The comparison is value only; ``rho_T`` is not matched against ``nuT``.

    Raises
    ------
    InfeasiblePath:
        The path violates the continuity equation.
    """
    residual = continuity_residual(rho, w)
    tol_path = 10.0 * rho.width if feasibility_tol is None else feasibility_tol
    if residual > tol_path:
        raise InfeasiblePath('continuity residual {0:.3g} exceeds {1:.3g}'.format(residual, tol_path))

    dual = dual_lagrangian(spec.lagrangian, spec.inner_axes if spec.lagrangian.kinetic.kind == 'grid' else None)
    moved = action(rho, w, dual)
    start = rho.at(0)
    end = rho.at(rho.times.size - 1)
    value = ballistic_over(spec.with_horizon(rho.horizon), start, nuT).value
    lhs = brenier_map_1d(end, nuT, Sense.MONOTONE).value - moved

    certificate = Certificate('W_over(nuT, rho_T) - action~ <= B_over', lhs, value, tol, inequality=True)
    return EulerianReport(certificate, moved, residual, 0.0, value - lhs)


class ConvergenceTable(Report):
    """Represents the action of displacement paths under joint refinement of cells and time steps.

    Attributes
    ----------
    rows: List[Tuple[:class:`float`, :class:`float`, :class:`float`, :class:`float`]]
        ``(cell width, time step, action, |action - C_T|)`` per level.
    rates: List[:class:`float`]
        ``log2`` of successive error ratios.
    exact: :class:`float`
        ``C_T(nu0, nuT)``.
    min_rate: :class:`float`
        The smallest acceptable rate.
    floor: :class:`float`
        Errors below this count as converged.
    """
    __slots__ = ('rows', 'rates', 'exact', 'min_rate', 'floor')
    _fields = ('rows', 'rates', 'exact', 'min_rate')

    def __init__(self, rows: List[Tuple[float, float, float, float]], rates: List[float], exact: float, min_rate: float, floor: float):
        self.rows = rows
        self.rates = rates
        self.exact = exact
        self.min_rate = min_rate
        self.floor = floor

    @property
    def passed(self) -> bool:
        for rate, row in zip(self.rates, self.rows[1:]):
            if row[3] > self.floor and rate < self.min_rate:
                return False
        return True

    def to_table(self) -> List[Tuple[float, ...]]:
        return [tuple(r) for r in self.rows]


def convergence_table(
    spec: CostSpec,
    nu0: DiscreteMeasure,
    nuT: DiscreteMeasure,
    lo: float,
    hi: float,
    cells: int,
    steps: int,
    levels: int = 3,
    min_rate: float = 0.9,
    floor: float = 1e-10,
) -> ConvergenceTable:
    """Refines cells and time steps together and tracks ``|action - C_T|`` along rasterized displacement paths.

    The grid ``[lo, hi]`` has to cover both measures.
    """
    exact = c_transport(spec, nu0, nuT).value
    rows = []
    for level in range(levels):
        n, K = cells * 2 ** level, steps * 2 ** level
        edges = np.linspace(lo, hi, n + 1)
        rho, w = displacement_path(nu0, nuT, K, edges, spec.horizon)
        value = action(rho, w, spec.lagrangian)
        rows.append((float(edges[1] - edges[0]), spec.horizon / K, value, abs(value - exact)))

    rates = []
    for a, b in zip(rows, rows[1:]):
        if a[3] > 0 and b[3] > 0:
            rates.append(float(np.log2(a[3] / b[3])))
        else:
            rates.append(float('inf'))
    _log.info('Displacement path errors %s', ', '.join('{0:.3g}'.format(r[3]) for r in rows))
    return ConvergenceTable(rows, rates, exact, min_rate, floor)
