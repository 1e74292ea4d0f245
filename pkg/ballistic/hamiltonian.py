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
from typing import Any, List, Optional, Tuple

import logging

import numpy as np

from .abc import Report
from .costs import CostSpec, fixed_end_gradients
from .enums import Convexity, Integrator, MapMethod, Variant
from .errors import MapUnavailable, NonConvexInput, OutOfDomain, StepUnderflow, VariantUnsupported
from .grid import GridFunction, coerce_axes, concave_conjugate
from .lagrangian import HamiltonianSpec, hamiltonian_of
from .transport import TransportPlan
from .utils import as_points, as_vector

__all__ = (
    'Trajectory',
    'TransportMapSample',
    'TrajectoryReport',
    'TwistReport',
    'flow',
    'map_from_concave_potential',
    'map_for_ballistic_max',
    'lp_support_map',
    'verify_support',
    'trajectory_optimality_check',
    'check_twist',
)

_log = logging.getLogger(__name__)


class Trajectory:
    """Represents a sampled solution of ``x' = dH/dq, q' = -dH/dx``.

    Attributes
    ----------
    times: :class:`numpy.ndarray`
        The ``steps + 1`` sample times, from ``0`` to ``T``.
    states: :class:`numpy.ndarray`
        The ``(steps + 1, d)`` positions.
    costates: :class:`numpy.ndarray`
        The ``(steps + 1, d)`` covectors.
    energies: :class:`numpy.ndarray`
        ``H`` along the samples.
    integrator: Optional[:class:`str`]
        The :class:`Integrator` used, or ``None`` for the exact quadratic flow.
    """
    __slots__ = ('times', 'states', 'costates', 'energies', 'integrator')

    def __init__(self, times: np.ndarray, states: np.ndarray, costates: np.ndarray, energies: np.ndarray, integrator: Optional[str] = None):
        self.times = times
        self.states = states
        self.costates = costates
        self.energies = energies
        self.integrator = integrator

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_costate(self) -> np.ndarray:
        return self.costates[-1]

    @property
    def energy_drift(self) -> float:
        """:class:`float`: Returns ``max_t |H(t) - H(0)|``."""
        return float(np.abs(self.energies - self.energies[0]).max())

    def __len__(self) -> int:
        return self.times.size

    def __repr__(self):
        return '<Trajectory steps={0} integrator={1} drift={2:.3g}>'.format(self.times.size - 1, self.integrator, self.energy_drift)


class TransportMapSample:
    """Represents a transport map sampled on finitely many inputs.

    Attributes
    ----------
    inputs: :class:`numpy.ndarray`
        The ``(n, d)`` sample points.
    outputs: :class:`numpy.ndarray`
        Their ``(n, d)`` images.
    method: :class:`str`
        The :class:`MapMethod` that produced the sample.
    starts: Optional[:class:`numpy.ndarray`]
        The initial states the flows were started from, if any.
    """
    __slots__ = ('inputs', 'outputs', 'method', 'starts')

    def __init__(self, inputs: np.ndarray, outputs: np.ndarray, method: str, starts: Optional[np.ndarray] = None):
        if inputs.shape[0] != outputs.shape[0]:
            raise ValueError('a map sample needs one output per input')
        if not np.all(np.isfinite(outputs)):
            raise MapUnavailable('the sampled map has non-finite outputs')
        self.inputs = inputs
        self.outputs = outputs
        self.method = method
        self.starts = starts

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def __iter__(self):
        return zip(self.inputs, self.outputs)

    def __repr__(self):
        return '<TransportMapSample method={0} size={1}>'.format(self.method, len(self))


def _check_finite(values: np.ndarray, what: str, t: float) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise StepUnderflow('non-finite {0} at t={1:.6g}'.format(what, t))
    return values

def flow(H: HamiltonianSpec, x0: Any, v0: Any, T: float, steps: int = 1000, integrator: str = Integrator.VERLET) -> Trajectory:
    """Integrates the Hamiltonian system from ``(x0, v0)`` over ``[0, T]``.

    The quadratic variant moves freely, ``x(t) = x0 + t v0 / m``, and is
    evaluated exactly at every sample. Separable Hamiltonians are stepped
    with Störmer-Verlet or symplectic Euler.

    Parameters
    ----------
    H: :class:`HamiltonianSpec`
        The Hamiltonian.
    x0:
        The initial state.
    v0:
        The initial covector.
    T: :class:`float`
        The final time, ``T >= 0``.
    steps: :class:`int`
        The number of time steps.
    integrator: :class:`str`
        One of the :class:`Integrator` constants.

    Raises
    ------
    StepUnderflow:
        A derivative sample was not finite.
    """
    if steps < 1:
        raise ValueError('a flow needs at least one step')
    if T < 0:
        raise ValueError('the final time must be non-negative')
    if integrator not in (Integrator.VERLET, Integrator.EULER):
        raise ValueError('unknown integrator {0!r}'.format(integrator))

    x = as_vector(x0)
    v = as_vector(v0)
    times = np.linspace(0.0, T, steps + 1)

    if H.is_quadratic:
        states = x[None, :] + times[:, None] * v[None, :] / H.mass
        costates = np.repeat(v[None, :], steps + 1, axis=0)
        return Trajectory(times, states, costates, H(states, costates), None)

    h = T / steps
    states = np.empty((steps + 1, x.size))
    costates = np.empty((steps + 1, v.size))
    states[0], costates[0] = x, v
    for k in range(steps):
        t = times[k]
        if integrator == Integrator.VERLET:
            half = v - 0.5 * h * _check_finite(H.dx(x)[0], 'dH/dx', t)
            x = x + h * _check_finite(H.dq(half[None, :])[0], 'dH/dq', t)
            v = half - 0.5 * h * _check_finite(H.dx(x)[0], 'dH/dx', t + h)
        else:
            v = v - h * _check_finite(H.dx(x)[0], 'dH/dx', t)
            x = x + h * _check_finite(H.dq(v[None, :])[0], 'dH/dq', t)
        states[k + 1], costates[k + 1] = x, v

    trajectory = Trajectory(times, states, costates, H(states, costates), integrator)
    _log.debug('Integrated %d %s steps, energy drift %.3g', steps, integrator, trajectory.energy_drift)
    return trajectory

def _endpoint(H: HamiltonianSpec, y: np.ndarray, v: np.ndarray, T: float, steps: int) -> np.ndarray:
    if T == 0:
        return y.copy()
    if H.is_quadratic:
        return y + T * v / H.mass
    return flow(H, y, v, T, steps).final_state

def _stable_gradient(f: GridFunction, point: np.ndarray, tol: float) -> Optional[np.ndarray]:
    # central differences at one, two and four grid steps must agree
    step = f.resolution
    estimates = []
    for scale in (1.0, 2.0, 4.0):
        h = scale * step
        grad = np.empty(point.size)
        for k in range(point.size):
            e = np.zeros(point.size)
            e[k] = h
            ends = np.vstack([point + e, point - e])
            if not f.contains(ends).all():
                raise OutOfDomain(point, 'the gradient stencil at {0} leaves the grid'.format(point.tolist()))
            hi, lo = f(ends)
            grad[k] = (hi - lo) / (2 * h)
        estimates.append(grad)

    estimates = np.array(estimates)
    spread = float(np.abs(estimates.max(axis=0) - estimates.min(axis=0)).max())
    if spread > tol * (1.0 + np.abs(estimates).max()):
        return None
    return estimates[0]

def _potential_map(spec: CostSpec, potential: GridFunction, samples: Any, horizon: Optional[float], steps: int, tol: float, sign: float) -> TransportMapSample:
    T = spec.horizon if horizon is None else float(horizon)
    samples = as_points(samples, spec.dim)
    H = hamiltonian_of(spec.lagrangian, spec.inner_axes if spec.lagrangian.kinetic.kind == 'grid' else None)

    starts = np.empty_like(samples)
    outputs = np.empty_like(samples)
    for i, v in enumerate(samples):
        grad = _stable_gradient(potential, v, tol)
        if grad is None:
            raise MapUnavailable('the potential is not differentiable at {0}'.format(v.tolist()))
        starts[i] = sign * grad
        outputs[i] = _endpoint(H, starts[i], v, T, steps)
    return TransportMapSample(samples, outputs, MapMethod.FLOW_FROM_POTENTIAL, starts)

def map_from_concave_potential(
    spec: CostSpec,
    k: GridFunction,
    samples: Any,
    dual_axes: Any = None,
    horizon: Optional[float] = None,
    steps: int = 1000,
    tol: float = 1e-6,
) -> TransportMapSample:
    """Builds the map ``v -> x(T)`` of the flow started at ``(grad k~(v), v)``.

    ``k~`` is the concave conjugate of the concave initial function ``k``,
    sampled on ``dual_axes``. Optimal ``B_under`` plans are carried by the
    graph of this map.

    Parameters
    ----------
    k: :class:`GridFunction`
        A concave-flagged function of the state, such as :func:`initial_potential`.
    samples:
        The covectors to map.
    dual_axes:
        Where ``k~`` is sampled; defaults to the inner window.
    tol: :class:`float`
        The admissible relative spread of the gradient across stencil sizes.

    Raises
    ------
    NonConvexInput:
        ``k`` is not flagged concave.
    OutOfDomain:
        The gradient stencil leaves the covector grid.
    MapUnavailable:
        ``k~`` is not differentiable at a sample.
    """
    if k.convexity != Convexity.CONCAVE:
        raise NonConvexInput('the initial function must be flagged concave')

    dual_axes = spec.inner_axes if dual_axes is None else coerce_axes(dual_axes)
    k_tilde = concave_conjugate(k, dual_axes)
    sample = _potential_map(spec, k_tilde, samples, horizon, steps, tol, 1.0)

    inside = k.contains(sample.starts)
    if not inside.all():
        raise OutOfDomain(sample.starts[~inside][0], 'the gradient of k~ leaves the state grid')
    return sample

def _is_even(profile: Any) -> bool:
    if profile.kind != 'grid':
        return True
    grid = profile.grid
    axes_even = all(np.allclose(a, -a[::-1]) for a in grid.axes)
    if not axes_even:
        return False
    flip = (slice(None, None, -1),) * grid.dim
    return bool(np.allclose(grid.values, grid.values[flip]))

def map_for_ballistic_max(
    spec: CostSpec,
    h: GridFunction,
    samples: Any,
    horizon: Optional[float] = None,
    steps: int = 1000,
    tol: float = 1e-6,
) -> TransportMapSample:
    """Builds the map of an optimal ``B_over`` plan from its covector side potential.

    For every covector ``v`` the flow starts at ``grad h(v)`` with costate
    ``v``; the quadratic variant gives ``x = grad h(v) + T v / m``.

    Parameters
    ----------
    h: :class:`GridFunction`
        The potential of the covector side of a max problem, sampled on covectors.

    Raises
    ------
    VariantUnsupported:
        The potential of a separable Lagrangian is not even.
    MapUnavailable:
        ``h`` is not differentiable at a sample.
    """
    L = spec.lagrangian
    if L.variant == Variant.SEPARABLE_CONVEX and not _is_even(L.potential):
        raise VariantUnsupported('max maps need an even potential')
    return _potential_map(spec, h, samples, horizon, steps, tol, 1.0)

def lp_support_map(plan: TransportPlan, sources: Any, targets: Any) -> TransportMapSample:
    """Reads a map off an optimal plan by sending each source atom to its barycentric target."""
    sources = as_points(sources)
    targets = as_points(targets, sources.shape[1])
    rows = plan.matrix.sum(axis=1)
    outputs = (plan.matrix @ targets) / rows[:, None]
    return TransportMapSample(sources, outputs, MapMethod.LP_SUPPORT)

def verify_support(plan: TransportPlan, sample: TransportMapSample, targets: Any, radius: float) -> float:
    """Returns the plan mass sent farther than ``radius`` from the sampled map.

    ``sample`` must be taken at the source atoms of ``plan``, in row order.
    """
    targets = as_points(targets, sample.outputs.shape[1])
    if len(sample) != plan.matrix.shape[0] or targets.shape[0] != plan.matrix.shape[1]:
        raise ValueError('the map sample and targets must match the plan')

    off = 0.0
    for i, j in plan.support:
        if np.linalg.norm(targets[j] - sample.outputs[i]) > radius:
            off += float(plan.matrix[i, j])
    return off


class TrajectoryReport(Report):
    """Represents the outcome of :func:`trajectory_optimality_check`.

    Attributes
    ----------
    start_covector: :class:`numpy.ndarray`
        ``v = -d_y c_T(y, x)``.
    end_covector: :class:`numpy.ndarray`
        ``w = d_x c_T(y, x)``.
    arrival: :class:`numpy.ndarray`
        Where the flow from ``(y, v)`` is at time ``T``.
    position_error: :class:`float`
        ``|x(T) - x|``.
    covector_error: :class:`float`
        ``|v(T) - w|``.
    tolerance: :class:`float`
        The admissible error.
    """
    __slots__ = ('start_covector', 'end_covector', 'arrival', 'position_error', 'covector_error', 'tolerance')
    _fields = ('start_covector', 'end_covector', 'arrival', 'position_error', 'covector_error', 'tolerance')

    def __init__(self, start_covector, end_covector, arrival, position_error, covector_error, tolerance):
        self.start_covector = start_covector
        self.end_covector = end_covector
        self.arrival = arrival
        self.position_error = position_error
        self.covector_error = covector_error
        self.tolerance = tolerance

    @property
    def passed(self) -> bool:
        return max(self.position_error, self.covector_error) <= self.tolerance


def trajectory_optimality_check(
    spec: CostSpec,
    y: Any,
    x: Any,
    horizon: Optional[float] = None,
    steps: int = 1000,
    tol: float = 1e-3,
    step: float = 1e-3,
) -> TrajectoryReport:
    """Checks that the cost gradients at ``(y, x)`` are the ends of a Hamiltonian trajectory.

    ``(-v, w) = grad c_T(y, x)`` is computed (by central differences of
    ``step`` unless the Lagrangian is quadratic) and the flow from ``(y, v)``
    has to arrive at ``(x, w)`` at time ``T``.
    """
    T = spec.horizon if horizon is None else float(horizon)
    y, x = as_vector(y), as_vector(x)
    dy, dx = fixed_end_gradients(spec, y, x, T, step)
    v, w = -dy, dx

    H = hamiltonian_of(spec.lagrangian, spec.inner_axes if spec.lagrangian.kinetic.kind == 'grid' else None)
    trajectory = flow(H, y, v, T, steps)
    position_error = float(np.linalg.norm(trajectory.final_state - x))
    covector_error = float(np.linalg.norm(trajectory.final_costate - w))
    return TrajectoryReport(v, w, trajectory.final_state, position_error, covector_error, tol)


class TwistReport(Report):
    """Represents the outcome of :func:`check_twist`.

    Attributes
    ----------
    collisions: List[Tuple[:class:`int`, :class:`int`]]
        Index pairs of distinct targets with the same source gradient.
    unstable: List[:class:`int`]
        Targets skipped because the gradient was not classical there.
    """
    __slots__ = ('collisions', 'unstable', 'tolerance')
    _fields = ('collisions', 'unstable', 'tolerance')

    def __init__(self, collisions: List[Tuple[int, int]], unstable: List[int], tolerance: float):
        self.collisions = collisions
        self.unstable = unstable
        self.tolerance = tolerance

    @property
    def passed(self) -> bool:
        return not self.collisions


def check_twist(spec: CostSpec, y: Any, xs: Any, tol: float = 1e-6, step: float = 1e-4) -> TwistReport:
    """Searches for distinct targets ``x != x'`` with ``d_y c_T(y, x) = d_y c_T(y, x')``.

    Gradients are taken with steps ``step``, ``2 step`` and ``4 step``; a
    target where they disagree by more than ``tol`` is skipped.
    """
    y = as_vector(y)
    xs = as_points(xs, y.size)

    grads = []
    unstable = []
    for index, x in enumerate(xs):
        estimates = np.array([fixed_end_gradients(spec, y, x, step=s)[0] for s in (step, 2 * step, 4 * step)])
        if np.abs(estimates.max(axis=0) - estimates.min(axis=0)).max() > tol:
            unstable.append(index)
            grads.append(None)
        else:
            grads.append(estimates[0])

    collisions = []
    for a in range(xs.shape[0]):
        for b in range(a + 1, xs.shape[0]):
            if grads[a] is None or grads[b] is None or np.array_equal(xs[a], xs[b]):
                continue
            if np.linalg.norm(grads[a] - grads[b]) <= tol:
                collisions.append((a, b))

    if collisions:
        _log.info('Twist fails for %d target pairs at y=%s', len(collisions), y.tolist())
    return TwistReport(collisions, unstable, tol)
