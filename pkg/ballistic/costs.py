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
from typing import Any, Callable, Optional, Sequence, Tuple

import logging

import numpy as np
from scipy import optimize

from .abc import Report
from .enums import Convexity
from .errors import EmptyDomain, NoConvergence, VariantUnsupported
from .grid import GridFunction, coerce_axes
from .lagrangian import ConvexProfile, DualLagrangian, LagrangianSpec, dual_lagrangian, hamiltonian_of
from .utils import SENTINEL, as_points, as_vector, chunks, make_axis, product_points

__all__ = (
    'CostSpec',
    'CostDualityReport',
    'fixed_end_cost',
    'optimal_path',
    'ballistic_cost',
    'ballistic_argmin',
    'generalized_ballistic_cost',
    'dual_fixed_end_cost',
    'fixed_end_cost_matrix',
    'fixed_end_gradients',
    'ballistic_cost_matrix',
    'dual_fixed_end_cost_matrix',
    'verify_cost_dualities',
    'hopf_lax_propagate',
    'hopf_lax_dual',
    'hj_residual',
)

_log = logging.getLogger(__name__)

#: Iteration cap of the variational path solver.
MAX_ITERATIONS = 100_000

_BLOCK = 1 << 22


class CostSpec:
    """Bundles a Lagrangian with a horizon and the discretisation used to evaluate its costs.

    Parameters
    ----------
    lagrangian: :class:`LagrangianSpec`
        The Lagrangian ``L``.
    horizon: :class:`float`
        The horizon ``T``. ``T = 0`` is the bilinear case.
    path_segments: :class:`int`
        The number ``N`` of equal time steps of piecewise linear paths.
    inner_axes:
        The window infima over an intermediate point are scanned on.
        Defaults to ``[-8, 8]`` with spacing ``0.01`` in every dimension.
    tolerance: :class:`float`
        The gradient tolerance of the variational solver.

    Attributes
    ----------
    inner_axes: Tuple[:class:`numpy.ndarray`, ...]
        The scan window, one axis per dimension.
    """
    __slots__ = ('lagrangian', 'horizon', 'path_segments', 'inner_axes', 'tolerance')

    def __init__(self, lagrangian: LagrangianSpec, horizon: float, path_segments: int = 32, inner_axes: Any = None, tolerance: float = 1e-8):
        if horizon < 0:
            raise ValueError('horizon must be nonnegative')
        if path_segments < 1:
            raise ValueError('path_segments must be at least 1')

        if inner_axes is None:
            inner_axes = tuple(make_axis(-8.0, 8.0, 0.01) for _ in range(lagrangian.dim))
        inner_axes = coerce_axes(inner_axes)
        if len(inner_axes) != lagrangian.dim:
            raise ValueError('inner axes must match the dimension of the Lagrangian')

        self.lagrangian = lagrangian
        self.horizon = float(horizon)
        self.path_segments = int(path_segments)
        self.inner_axes = inner_axes
        self.tolerance = float(tolerance)

    @property
    def dim(self) -> int:
        return self.lagrangian.dim

    @property
    def inner_points(self) -> np.ndarray:
        """:class:`numpy.ndarray`: Returns the ``(n, d)`` nodes of the scan window."""
        return product_points(self.inner_axes)

    @property
    def inner_spacing(self) -> float:
        return float(max(np.diff(a).max() for a in self.inner_axes))

    @property
    def window(self) -> Tuple[Tuple[float, float], ...]:
        """Tuple[Tuple[:class:`float`, :class:`float`], ...]: Returns the bounds of the scan window."""
        return tuple((float(a[0]), float(a[-1])) for a in self.inner_axes)

    def with_horizon(self, horizon: float) -> CostSpec:
        return CostSpec(self.lagrangian, horizon, self.path_segments, self.inner_axes, self.tolerance)

    def __repr__(self):
        return '<CostSpec horizon={0} path_segments={1} lagrangian={2!r}>'.format(self.horizon, self.path_segments, self.lagrangian)


class CostDualityReport(Report):
    """Represents the outcome of :func:`verify_cost_dualities`.

    Attributes
    ----------
    violations: Tuple[:class:`float`, :class:`float`, :class:`float`]
        The worst absolute violation of each of the three identities
        ``b = inf_y <v, y> + c``, ``c = sup_v b - <v, y>`` and
        ``b = sup_w <w, x> - c~``.
    tolerance: :class:`float`
        The admissible violation.
    samples: :class:`int`
        How many pairs were checked.
    skipped: :class:`int`
        Identity evaluations skipped because one side was infinite.
    window: Tuple[Tuple[:class:`float`, :class:`float`], ...]
        The scan window the infima and suprema were taken over.
    """
    __slots__ = ('violations', 'tolerance', 'samples', 'skipped', 'window')
    _fields = ('violations', 'tolerance', 'samples', 'skipped', 'window')

    def __init__(self, violations: Tuple[float, float, float], tolerance: float, samples: int, skipped: int, window: tuple):
        self.violations = violations
        self.tolerance = tolerance
        self.samples = samples
        self.skipped = skipped
        self.window = window

    @property
    def passed(self) -> bool:
        return max(self.violations) <= self.tolerance


def _horizon(spec: CostSpec, horizon: Optional[float]) -> float:
    return spec.horizon if horizon is None else float(horizon)

def _minimize_action(
    velocity: ConvexProfile,
    state: Optional[ConvexProfile],
    start: np.ndarray,
    end: Optional[np.ndarray],
    horizon: float,
    segments: int,
    tolerance: float,
    start_covector: Optional[np.ndarray] = None,
) -> Tuple[float, np.ndarray]:
    """Minimises ``sum_i dt [velocity(P_i) + (state(xi_i) + state(xi_i+1)) / 2]``.

    ``P_i = (xi_i+1 - xi_i) / dt``. The end node is pinned to ``end``; the
    start node is pinned to ``start`` unless ``start_covector`` is given, in
    which case it is free and ``<start_covector, xi_0>`` is added.
    """
    d = start.size
    dt = horizon / segments
    free_start = start_covector is not None

    def unpack(z: np.ndarray) -> np.ndarray:
        nodes = z.reshape(-1, d)
        if free_start:
            return np.vstack([nodes, end])
        return np.vstack([start, nodes, end])

    def objective(z: np.ndarray) -> Tuple[float, np.ndarray]:
        nodes = unpack(z)
        slopes = np.diff(nodes, axis=0) / dt
        value = dt * float(velocity(slopes).sum())
        grad = np.zeros_like(nodes)
        dv = velocity.gradient(slopes)
        grad[:-1] -= dv
        grad[1:] += dv

        if state is not None:
            s = state(nodes)
            weights = np.full(nodes.shape[0], dt)
            weights[0] = weights[-1] = dt / 2
            value += float(weights @ s)
            grad += weights[:, None] * state.gradient(nodes)

        if free_start:
            value += float(start_covector @ nodes[0])
            grad[0] += start_covector
            return value, grad[:-1].ravel()
        return value, grad[1:-1].ravel()

    ramp = np.linspace(0.0, 1.0, segments + 1)[:, None]
    guess = (1.0 - ramp) * start + ramp * end
    guess = guess[:-1] if free_start else guess[1:-1]

    if guess.size == 0:
        value, _ = objective(guess.ravel())
        return min(value, SENTINEL), unpack(guess.ravel())

    result = optimize.minimize(
        objective,
        guess.ravel(),
        jac=True,
        method='L-BFGS-B',
        options={'maxiter': MAX_ITERATIONS, 'gtol': tolerance, 'ftol': 1e-15},
    )

    if not np.isfinite(result.fun):
        raise NoConvergence('the action is not finite along any tried path', result.nit)
    if not result.success and np.abs(result.jac).max() > np.sqrt(tolerance):
        raise NoConvergence('path solver stopped: {0}'.format(result.message), result.nit)

    _log.debug('Path solver converged in %d iterations to %.12g', result.nit, result.fun)
    return min(float(result.fun), SENTINEL), unpack(result.x)

def optimal_path(spec: CostSpec, y: Any, x: Any, horizon: Optional[float] = None) -> Tuple[float, np.ndarray]:
    """Returns the fixed-end cost together with the nodes of a minimising path.

    Returns
    -------
    Tuple[:class:`float`, :class:`numpy.ndarray`]
        The cost and the ``(N + 1, d)`` path nodes from ``y`` to ``x``.

    Raises
    ------
    NoConvergence:
        The variational solver did not reach its tolerance.
    """
    T = _horizon(spec, horizon)
    y, x = as_vector(y), as_vector(x)
    L = spec.lagrangian
    N = spec.path_segments
    if T == 0:
        return fixed_end_cost(spec, y, x, 0.0), np.vstack([y, x])

    if L.potential is None:
        ramp = np.linspace(0.0, 1.0, N + 1)[:, None]
        return fixed_end_cost(spec, y, x, T), (1.0 - ramp) * y + ramp * x

    return _minimize_action(L.kinetic, L.potential, y, x, T, N, spec.tolerance)

def fixed_end_cost(spec: CostSpec, y: Any, x: Any, horizon: Optional[float] = None, *, variational: bool = False) -> float:
    """Evaluates ``c_T(y, x) = inf { int_0^T L(g, g') ; g(0) = y, g(T) = x }``.

    State independent Lagrangians use ``T L0((x - y) / T)``; the separable
    variant minimises the discretised action over the interior path nodes.
    With ``variational=True`` the path solver runs for every Lagrangian.

    Raises
    ------
    NoConvergence:
        The variational solver did not reach its tolerance.
    """
    T = _horizon(spec, horizon)
    y, x = as_vector(y), as_vector(x)
    if T == 0:
        return 0.0 if np.array_equal(y, x) else SENTINEL

    L = spec.lagrangian
    if L.potential is None and not variational:
        return float(min(T * L.kinetic(((x - y) / T)[None, :])[0], SENTINEL))

    value, _ = _minimize_action(L.kinetic, L.potential, y, x, T, spec.path_segments, spec.tolerance)
    return value

def fixed_end_cost_matrix(spec: CostSpec, ys: Any, xs: Any, horizon: Optional[float] = None) -> np.ndarray:
    """Evaluates :func:`fixed_end_cost` for every pair of rows of ``ys`` and ``xs``."""
    T = _horizon(spec, horizon)
    ys, xs = as_points(ys, spec.dim), as_points(xs, spec.dim)
    L = spec.lagrangian

    if T == 0:
        same = np.all(ys[:, None, :] == xs[None, :, :], axis=2)
        return np.where(same, 0.0, SENTINEL)

    if L.potential is None:
        out = np.empty((ys.shape[0], xs.shape[0]))
        block = max(1, _BLOCK // max(1, xs.shape[0]))
        for sl in chunks(ys.shape[0], block):
            slopes = (xs[None, :, :] - ys[sl, None, :]) / T
            out[sl] = T * L.kinetic(slopes.reshape(-1, spec.dim)).reshape(-1, xs.shape[0])
        return np.minimum(out, SENTINEL)

    out = np.empty((ys.shape[0], xs.shape[0]))
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            out[i, j] = fixed_end_cost(spec, y, x, T)
    return out

def fixed_end_gradients(spec: CostSpec, y: Any, x: Any, horizon: Optional[float] = None, step: float = 1e-5) -> Tuple[np.ndarray, np.ndarray]:
    """Returns ``(d_y c_T(y, x), d_x c_T(y, x))``.

    The quadratic variant is differentiated exactly; every other variant
    takes central differences of :func:`fixed_end_cost` with the given step.
    """
    T = _horizon(spec, horizon)
    if T <= 0:
        raise ValueError('cost gradients need a positive horizon')

    y, x = as_vector(y), as_vector(x)
    L = spec.lagrangian
    if L.is_quadratic:
        w = L.mass * (x - y) / T
        return -w, w

    dy = np.empty_like(y)
    dx = np.empty_like(x)
    for k in range(y.size):
        e = np.zeros_like(y)
        e[k] = step
        dy[k] = (fixed_end_cost(spec, y + e, x, T) - fixed_end_cost(spec, y - e, x, T)) / (2 * step)
        dx[k] = (fixed_end_cost(spec, y, x + e, T) - fixed_end_cost(spec, y, x - e, T)) / (2 * step)
    return dy, dx

def ballistic_argmin(spec: CostSpec, v: Any, x: Any, horizon: Optional[float] = None) -> Tuple[float, np.ndarray]:
    """Scans ``min_y <v, y> + c_T(y, x)`` over the inner window.

    Returns
    -------
    Tuple[:class:`float`, :class:`numpy.ndarray`]
        The restricted infimum and the minimising grid node ``y*``.
    """
    T = _horizon(spec, horizon)
    v, x = as_vector(v), as_vector(x)
    ys = np.vstack([spec.inner_points, x])
    values = ys @ v + fixed_end_cost_matrix(spec, ys, x[None, :], T)[:, 0]
    values = np.minimum(values, SENTINEL)
    k = int(np.argmin(values))
    return float(values[k]), ys[k]

def ballistic_cost(spec: CostSpec, v: Any, x: Any, horizon: Optional[float] = None, *, scan: bool = False) -> float:
    """Evaluates the ballistic cost ``b_T(v, x) = inf_y <v, y> + c_T(y, x)``.

    ``T = 0`` gives ``<v, x>``. State independent Lagrangians use the closed
    form ``<v, x> - T H0(v)``. The separable variant solves the free start
    path problem, which is jointly convex in the start point and the path.
    With ``scan=True`` the infimum is instead scanned over the inner window
    and the best node is polished within one cell.

    Raises
    ------
    NoConvergence:
        The variational solver did not reach its tolerance.
    """
    T = _horizon(spec, horizon)
    v, x = as_vector(v), as_vector(x)
    if T == 0:
        return float(v @ x)
    if scan:
        candidates = np.vstack([spec.inner_points, x])

        def objective(ys: np.ndarray) -> np.ndarray:
            return ys @ v + fixed_end_cost_matrix(spec, ys, x[None, :], T)[:, 0]

        return _scan(objective, candidates, spec.inner_spacing, spec.window, polish=True)[0]

    L = spec.lagrangian
    if L.potential is None:
        h0 = L.kinetic.conjugate(spec.inner_axes if L.kinetic.kind == 'grid' else None)
        energy = float(h0(v[None, :])[0])
        if energy >= SENTINEL:
            return -SENTINEL
        return float(v @ x - T * energy)

    value, _ = _minimize_action(L.kinetic, L.potential, x, x, T, spec.path_segments, spec.tolerance, start_covector=v)
    return value

def ballistic_cost_matrix(spec: CostSpec, vs: Any, xs: Any, horizon: Optional[float] = None) -> np.ndarray:
    """Evaluates :func:`ballistic_cost` for every pair of rows of ``vs`` and ``xs``."""
    T = _horizon(spec, horizon)
    vs, xs = as_points(vs, spec.dim), as_points(xs, spec.dim)
    bilinear = vs @ xs.T
    if T == 0:
        return bilinear

    L = spec.lagrangian
    if L.potential is None:
        h0 = L.kinetic.conjugate(spec.inner_axes if L.kinetic.kind == 'grid' else None)
        energy = h0(vs)
        return np.where(energy[:, None] >= SENTINEL, -SENTINEL, bilinear - T * energy[:, None])

    out = np.empty(bilinear.shape)
    for i, v in enumerate(vs):
        for j, x in enumerate(xs):
            out[i, j] = ballistic_cost(spec, v, x, T)
    return out

def generalized_ballistic_cost(
    spec: CostSpec,
    coupling: Callable[[np.ndarray, np.ndarray], Any],
    v: Any,
    x: Any,
    horizon: Optional[float] = None,
) -> Tuple[float, np.ndarray]:
    """Scans ``min_y g(v, y) + c_T(y, x)`` over the inner window for a coupling ``g``.

    ``coupling`` receives the covector ``v`` and the ``(n, d)`` window nodes
    and returns ``n`` values. ``g(v, y) = <v, y>`` gives back :func:`ballistic_argmin`.
    """
    T = _horizon(spec, horizon)
    v, x = as_vector(v), as_vector(x)
    ys = np.vstack([spec.inner_points, x])
    values = np.asarray(coupling(v, ys), dtype=float).ravel() + fixed_end_cost_matrix(spec, ys, x[None, :], T)[:, 0]
    values = np.minimum(values, SENTINEL)
    k = int(np.argmin(values))
    return float(values[k]), ys[k]

def _pinned(spec: CostSpec, u: np.ndarray, w: np.ndarray, tol: Optional[float]) -> bool:
    if tol is None:
        tol = 0.5 * spec.inner_spacing
    return bool(np.linalg.norm(u - w) <= tol)

def dual_fixed_end_cost(spec: CostSpec, u: Any, w: Any, horizon: Optional[float] = None, tol: Optional[float] = None) -> float:
    """Evaluates ``c~_T(u, w) = inf { int_0^T L~(e, e') ; e(0) = u, e(T) = w }``.

    Without a potential ``L~`` forces ``e' = 0``, so the cost is ``T H0(u)``
    when ``|u - w| <= tol`` (half the inner spacing by default) and ``+inf``
    otherwise. The separable variant minimises the discretised dual action.

    Raises
    ------
    NoConvergence:
        The variational solver did not reach its tolerance.
    """
    T = _horizon(spec, horizon)
    u, w = as_vector(u), as_vector(w)
    if T == 0:
        return 0.0 if np.array_equal(u, w) else SENTINEL

    dual = dual_lagrangian(spec.lagrangian, spec.inner_axes if spec.lagrangian.kinetic.kind == 'grid' else None)
    assert isinstance(dual, DualLagrangian)
    if dual.constrained:
        if not _pinned(spec, u, w, tol):
            return SENTINEL
        return float(min(T * dual.position(u[None, :])[0], SENTINEL))

    value, _ = _minimize_action(dual.velocity, dual.position, u, w, T, spec.path_segments, spec.tolerance)
    return value

def dual_fixed_end_cost_matrix(spec: CostSpec, us: Any, ws: Any, horizon: Optional[float] = None, tol: Optional[float] = None) -> np.ndarray:
    """Evaluates :func:`dual_fixed_end_cost` for every pair of rows of ``us`` and ``ws``."""
    T = _horizon(spec, horizon)
    us, ws = as_points(us, spec.dim), as_points(ws, spec.dim)
    L = spec.lagrangian
    if T > 0 and L.potential is None:
        if tol is None:
            tol = 0.5 * spec.inner_spacing
        h0 = L.kinetic.conjugate(spec.inner_axes if L.kinetic.kind == 'grid' else None)
        gap = np.linalg.norm(us[:, None, :] - ws[None, :, :], axis=2)
        energy = np.minimum(T * h0(us), SENTINEL)
        return np.where(gap <= tol, energy[:, None], SENTINEL)

    out = np.empty((us.shape[0], ws.shape[0]))
    for i, u in enumerate(us):
        for j, w in enumerate(ws):
            out[i, j] = dual_fixed_end_cost(spec, u, w, T, tol)
    return out

def _polish(objective: Callable[[np.ndarray], float], best: np.ndarray, spacing: float, window: tuple) -> Tuple[float, np.ndarray]:
    # refine a grid minimiser within one cell of the window
    lo = np.array([w[0] for w in window])
    hi = np.array([w[1] for w in window])
    if best.size == 1:
        bounds = (max(lo[0], best[0] - spacing), min(hi[0], best[0] + spacing))
        if bounds[1] <= bounds[0]:
            return objective(best), best
        result = optimize.minimize_scalar(lambda s: objective(np.array([s])), bounds=bounds, method='bounded', options={'xatol': 1e-12})
        return float(result.fun), np.array([result.x])

    bounds = list(zip(np.maximum(lo, best - spacing), np.minimum(hi, best + spacing)))
    result = optimize.minimize(objective, best, method='Nelder-Mead', bounds=bounds, options={'xatol': 1e-10, 'fatol': 1e-14, 'maxiter': 4000})
    return float(result.fun), result.x

def _scan(objective: Callable[[np.ndarray], np.ndarray], candidates: np.ndarray, spacing: float, window: tuple, polish: bool) -> Tuple[float, np.ndarray]:
    values = np.minimum(objective(candidates), SENTINEL)
    k = int(np.argmin(values))
    best, where = float(values[k]), candidates[k]
    if polish and best < SENTINEL:
        refined, at = _polish(lambda z: float(objective(z[None, :])[0]), where, spacing, window)
        if refined < best:
            best, where = refined, at
    return best, where

def verify_cost_dualities(spec: CostSpec, vs: Any, xs: Any, tol: float = 1e-6) -> CostDualityReport:
    """Checks that ``b``, ``c`` and ``c~`` are dual to each other at sampled pairs.

    For every pair ``(v, x)`` three identities are checked against scans over
    the inner window, each grid optimum being polished inside its cell:

    - ``b(v, x) = inf_y <v, y> + c(y, x)``, which also yields a minimiser ``y*``;
    - ``c(y*, x) = sup_v' b(v', x) - <v', y*>``;
    - ``b(v, x) = sup_w <w, x> - c~(v, w)``.

    The anchors ``x`` and ``v`` are added to the candidate sets, which makes
    the bilinear case ``T = 0`` exact.

    Returns
    -------
    :class:`CostDualityReport`
    """
    vs, xs = as_points(vs, spec.dim), as_points(xs, spec.dim)
    if vs.shape != xs.shape:
        raise ValueError('vs and xs must hold the same number of points')

    T = spec.horizon
    grid = spec.inner_points
    spacing = spec.inner_spacing
    window = spec.window
    polish = T > 0
    worst = [0.0, 0.0, 0.0]
    skipped = 0

    for v, x in zip(vs, xs):
        b = ballistic_cost(spec, v, x)

        candidates = np.vstack([grid, x])
        rhs, y_star = _scan(lambda ys: ys @ v + fixed_end_cost_matrix(spec, ys, x[None, :])[:, 0], candidates, spacing, window, polish)
        if abs(b) < SENTINEL and rhs < SENTINEL:
            worst[0] = max(worst[0], abs(b - rhs))
        else:
            skipped += 1

        c = fixed_end_cost(spec, y_star, x)
        candidates = np.vstack([grid, v])
        neg, _ = _scan(lambda ws: -(ballistic_cost_matrix(spec, ws, x[None, :])[:, 0] - ws @ y_star), candidates, spacing, window, polish)
        if c < SENTINEL and abs(neg) < SENTINEL:
            worst[1] = max(worst[1], abs(c + neg))
        else:
            skipped += 1

        neg, _ = _scan(lambda ws: -(ws @ x - dual_fixed_end_cost_matrix(spec, v[None, :], ws, tol=0.0)[0]), candidates, spacing, window, polish and not _constrained(spec))
        if abs(b) < SENTINEL and abs(neg) < SENTINEL:
            worst[2] = max(worst[2], abs(b + neg))
        else:
            skipped += 1

    _log.info('Cost duality violations over %d samples: %s', vs.shape[0], worst)
    return CostDualityReport(tuple(worst), tol, vs.shape[0], skipped, window)

def _constrained(spec: CostSpec) -> bool:
    return spec.lagrangian.potential is None

def _check_time(spec: CostSpec, t: float) -> None:
    if not 0 < t <= spec.horizon * (1 + 1e-12):
        raise ValueError('t must lie in (0, {0}], got {1}'.format(spec.horizon, t))

def hopf_lax_propagate(spec: CostSpec, g: GridFunction, t: float) -> GridFunction:
    """Evaluates ``V_g(t, x) = inf_y g(y) + c_t(y, x)`` on the axes of ``g``.

    The infimum runs over the nodes of ``g`` where it is finite. Convex data
    give a convex-flagged result.

    Raises
    ------
    EmptyDomain:
        ``g`` is the sentinel everywhere.
    """
    _check_time(spec, t)
    values = g.values.ravel()
    finite = np.abs(values) < SENTINEL
    if not finite.any():
        raise EmptyDomain('initial data is the sentinel everywhere')

    ys = g.points[finite]
    data = values[finite]
    xs = g.points
    out = np.empty(xs.shape[0])
    block = max(1, _BLOCK // ys.shape[0])
    for sl in chunks(xs.shape[0], block):
        costs = fixed_end_cost_matrix(spec, ys, xs[sl], t)
        out[sl] = np.min(np.minimum(data[:, None] + costs, SENTINEL), axis=0)

    flag = Convexity.CONVEX if g.convexity == Convexity.CONVEX else Convexity.UNKNOWN
    return GridFunction(g.axes, out, flag)

def hopf_lax_dual(spec: CostSpec, g_star: GridFunction, t: float, axes: Any) -> GridFunction:
    """Evaluates ``V_g(t, x) = sup_v b_t(v, x) - g*(v)`` on ``axes``.

    This is the dual route to :func:`hopf_lax_propagate` for convex ``g``
    with ``g_star = legendre_conjugate(g)``.

    Raises
    ------
    EmptyDomain:
        ``g_star`` is the sentinel everywhere.
    VariantUnsupported:
        The Lagrangian depends on the state.
    """
    _check_time(spec, t)
    if spec.lagrangian.potential is not None:
        raise VariantUnsupported('the dual Hopf-Lax route needs a state independent Lagrangian')

    values = g_star.values.ravel()
    finite = np.abs(values) < SENTINEL
    if not finite.any():
        raise EmptyDomain('conjugate data is the sentinel everywhere')

    vs = g_star.points[finite]
    data = values[finite]
    axes = coerce_axes(axes)
    xs = product_points(axes)
    out = np.empty(xs.shape[0])
    block = max(1, _BLOCK // vs.shape[0])
    for sl in chunks(xs.shape[0], block):
        b = ballistic_cost_matrix(spec, vs, xs[sl], t)
        scores = np.where(b <= -SENTINEL, -np.inf, b - data[:, None])
        out[sl] = scores.max(axis=0)

    return GridFunction(axes, np.clip(out, -SENTINEL, SENTINEL), Convexity.CONVEX)

def hj_residual(
    spec: CostSpec,
    times: Sequence[float],
    path: Sequence[GridFunction],
    exclude: Optional[Callable[[float, np.ndarray], np.ndarray]] = None,
) -> float:
    """Returns ``max |d_t V + H(x, grad V)|`` over interior space-time nodes.

    Both derivatives are central differences. Nodes next to a sentinel, and
    nodes for which ``exclude(t, points)`` is ``True``, are left out.

    Parameters
    ----------
    times: Sequence[:class:`float`]
        At least three increasing times.
    path: Sequence[:class:`GridFunction`]
        ``V(t, .)`` for every time, all on the same axes.
    exclude: Optional[Callable]
        Receives a time and the ``(n, d)`` grid nodes and returns a mask of nodes to skip.
    """
    times = np.asarray(times, dtype=float)
    if times.size < 3 or times.size != len(path):
        raise ValueError('need at least 3 time slices, one per grid function')

    H = hamiltonian_of(spec.lagrangian, spec.inner_axes if spec.lagrangian.kinetic.kind == 'grid' else None)
    axes = path[0].axes
    points = path[0].points
    stack = np.stack([f.values for f in path])
    interior = tuple(slice(1, -1) for _ in axes)
    worst = 0.0

    for k in range(1, times.size - 1):
        dt = (stack[k + 1] - stack[k - 1]) / (times[k + 1] - times[k - 1])
        grads = np.gradient(stack[k], *axes)
        if len(axes) == 1:
            grads = [grads]
        grad = np.stack([g[interior].ravel() for g in grads], axis=-1)
        nodes = points.reshape(*stack[k].shape, len(axes))[interior].reshape(-1, len(axes))
        residual = dt[interior].ravel() + H(nodes, grad)

        finite = np.all(np.abs(stack[k - 1:k + 2]) < SENTINEL * 1e-3, axis=0)
        for axis in range(len(axes)):
            finite &= np.roll(finite, 1, axis) & np.roll(finite, -1, axis)
        keep = finite[interior].ravel() & np.isfinite(residual)
        if exclude is not None:
            keep &= ~np.asarray(exclude(float(times[k]), nodes), dtype=bool)
        if keep.any():
            worst = max(worst, float(np.abs(residual[keep]).max()))

    return worst
