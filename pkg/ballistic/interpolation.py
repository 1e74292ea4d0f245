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
from typing import Any, List, Optional, Sequence, Tuple, Union

import logging

import numpy as np

from .abc import Certificate, Report
from .costs import (
    CostSpec,
    ballistic_cost_matrix,
    dual_fixed_end_cost_matrix,
    fixed_end_cost_matrix,
    fixed_end_gradients,
    hopf_lax_propagate,
)
from .enums import Convexity, Direction, Provenance, Sense
from .errors import DimensionUnsupported, Infeasible, MapUnavailable, OutOfDomain
from .grid import ConvexityReport, GridFunction, coerce_axes, concave_conjugate, grid_gradients, is_convex, legendre_conjugate
from .lagrangian import ConvexProfile, LagrangianSpec
from .measure import DiscreteMeasure
from .transport import (
    CostMatrix,
    OTResult,
    ballistic_over,
    ballistic_under,
    brenier_map_1d,
    c_tilde_transport,
    c_transport,
    center_potentials,
    conjugate_potentials,
    solve_max,
    solve_min,
    w_over,
    w_under,
)
from .utils import SENTINEL, as_points, default_rng, nested_axes, product_points

__all__ = (
    'InterpolationResult',
    'DualityReport',
    'ReverseReport',
    'FactorizationReport',
    'RefinementTable',
    'composed_cost',
    'interpolate_min',
    'interpolate_max',
    'duality_check',
    'reverse_interpolate',
    'factorization_check',
    'initial_potential',
    'value_functional',
    'refinement_table',
)

_log = logging.getLogger(__name__)

def _relative(value: float, tol: float) -> float:
    return tol * (1.0 + abs(value))

def _intermediate_points(Y: Any, dim: int) -> np.ndarray:
    if isinstance(Y, np.ndarray) and Y.ndim == 2:
        return as_points(Y, dim)
    return product_points(coerce_axes(Y))

def _dirichlet(rng: np.random.Generator, size: int) -> np.ndarray:
    weights = rng.dirichlet(np.ones(size))
    weights[-1] = 1.0 - weights[:-1].sum()
    return weights

def _random_measure(rng: np.random.Generator, lo: np.ndarray, hi: np.ndarray, size: int) -> DiscreteMeasure:
    return DiscreteMeasure(rng.uniform(lo, hi, size=(size, lo.size)), _dirichlet(rng, size))

def _glue(plan: OTResult, argmins: np.ndarray) -> Tuple[DiscreteMeasure, List[Tuple[int, int, np.ndarray]]]:
    cells = [(i, j, argmins[i, j]) for i, j in plan.plan.support]
    points = np.array([c[2] for c in cells])
    masses = np.array([plan.plan.matrix[i, j] for i, j, _ in cells])
    return DiscreteMeasure.from_unnormalized(points, masses, 1e-9), cells


class InterpolationResult(Report):
    """Represents a Hopf-Lax interpolation through an intermediate measure.

    Attributes
    ----------
    value: :class:`float`
        The optimal value under the composed cost.
    intermediate: :class:`DiscreteMeasure`
        The intermediate measure rebuilt from the argmins.
    cells: List[Tuple[:class:`int`, :class:`int`, :class:`numpy.ndarray`]]
        ``(source, target, argmin)`` for every charged cell of the plan.
    certificate: :class:`Certificate`
        The composed value against the two transport values through the intermediate measure.
    bound: :class:`Certificate`
        The one sided comparison with the direct ballistic value.
    potential: :class:`ConvexityReport`
        The shape test of the Kantorovich potential on the intermediate measure's side.
    probes: :class:`float`
        The worst violation of the inequality over random intermediate measures; ``0`` if none were drawn.
    """
    __slots__ = ('value', 'intermediate', 'cells', 'certificate', 'bound', 'potential', 'probes', 'tolerance', 'result')
    _fields = ('value', 'certificate', 'bound', 'potential', 'probes')

    def __init__(self, value, intermediate, cells, certificate, bound, potential, probes, tolerance, result):
        self.value = value
        self.intermediate = intermediate
        self.cells = cells
        self.certificate = certificate
        self.bound = bound
        self.potential = potential
        self.probes = probes
        self.tolerance = tolerance
        self.result = result

    @property
    def passed(self) -> bool:
        return self.certificate.passed and self.bound.passed and self.probes <= self.tolerance

    def to_lines(self) -> List[str]:
        lines = super().to_lines()
        lines.append('intermediate: ' + '; '.join(self.intermediate.to_lines()))
        return lines


def composed_cost(spec: CostSpec, sources: Any, Y: Any, targets: Any) -> Tuple[CostMatrix, np.ndarray]:
    """Assembles ``min_{y in Y} <v, y> + c_T(y, x)`` for every source ``v`` and target ``x``.

    Parameters
    ----------
    Y:
        Axes of an intermediate grid, or an ``(n, d)`` array of points.

    Returns
    -------
    Tuple[:class:`CostMatrix`, :class:`numpy.ndarray`]
        The cost and the ``(rows, cols, d)`` table of minimising points.
    """
    sources = as_points(sources, spec.dim)
    targets = as_points(targets, spec.dim)
    ys = _intermediate_points(Y, spec.dim)

    legs = fixed_end_cost_matrix(spec, ys, targets)
    entries = np.empty((sources.shape[0], targets.shape[0]))
    argmins = np.empty((sources.shape[0], targets.shape[0], spec.dim))
    for i, v in enumerate(sources):
        scores = np.minimum((ys @ v)[:, None] + legs, SENTINEL)
        best = np.argmin(scores, axis=0)
        entries[i] = scores[best, np.arange(targets.shape[0])]
        argmins[i] = ys[best]
    return CostMatrix(entries, Provenance.COMPOSED), argmins

def _potential_shape(g: np.ndarray, points: np.ndarray, concave: bool) -> ConvexityReport:
    if points.shape[1] != 1 or points.shape[0] < 3:
        return ConvexityReport(True, 0.0, None, 0.0, 0)
    order = np.argsort(points[:, 0])
    f = GridFunction(points[order, 0], g[order])
    return is_convex(-f if concave else f, 1e-9 * f.scale)

def interpolate_min(spec: CostSpec, mu0: DiscreteMeasure, nuT: DiscreteMeasure, Y: Any = None, *, probes: int = 0, seed: Optional[int] = None, tol: float = 1e-9) -> InterpolationResult:
    """Evaluates ``inf_nu W_under(mu0, nu) + C_T(nu, nuT)`` with ``nu`` supported on ``Y``.

    The infimum over intermediate measures reduces to one transport problem
    under :func:`composed_cost`; the intermediate measure is rebuilt by
    pushing plan mass to the argmins. The certificate then compares the
    value with ``W_under(mu0, nu0) + C_T(nu0, nuT)`` solved independently.

    Parameters
    ----------
    Y:
        The intermediate grid; defaults to the inner window of ``spec``.
    probes: :class:`int`
        How many random intermediate measures to test the inequality
        ``B_under <= W_under(mu0, nu) + C_T(nu, nuT)`` on.
    seed: Optional[:class:`int`]
        Required when ``probes > 0``.
    """
    Y = spec.inner_axes if Y is None else Y
    cost, argmins = composed_cost(spec, mu0.points, Y, nuT.points)
    result = solve_min(cost, mu0, nuT)
    nu0, cells = _glue(result, argmins)

    first = w_under(mu0, nu0)
    second = c_transport(spec, nu0, nuT)
    tolerance = _relative(result.value, tol)
    certificate = Certificate('composed = W_under + C_T', result.value, first.value + second.value, tolerance)

    direct = ballistic_under(spec, mu0, nuT).value
    bound = Certificate('B_under <= composed', direct, result.value, tolerance, inequality=True)
    shape = _potential_shape(second.g, nu0.points, concave=True)

    worst = 0.0
    if probes:
        rng = default_rng(seed)
        ys = _intermediate_points(Y, spec.dim)
        lo, hi = ys.min(axis=0), ys.max(axis=0)
        for _ in range(probes):
            nu = _random_measure(rng, lo, hi, int(rng.integers(1, 6)))
            upper = w_under(mu0, nu).value + c_transport(spec, nu, nuT).value
            worst = max(worst, direct - upper)

    _log.info('Hopf-Lax min interpolation: value %.12g, certificate difference %.3g', result.value, certificate.difference)
    return InterpolationResult(result.value, nu0, cells, certificate, bound, shape, worst, tolerance, result)

def interpolate_max(spec: CostSpec, mu0: DiscreteMeasure, nuT: DiscreteMeasure, Y: Any = None, *, probes: int = 0, seed: Optional[int] = None, tol: float = 1e-9) -> InterpolationResult:
    """Evaluates ``sup_mu W_over(nuT, mu) - C~_T(mu0, mu)`` with ``mu`` supported on ``Y``.

    The mirror of :func:`interpolate_min`. ``Y`` is a covector grid, extended
    by the atoms of ``mu0``; dual fixed-end costs are pinned exactly, so a
    Lagrangian without potential keeps every covector in place.
    """
    Y = spec.inner_axes if Y is None else Y
    ws = np.vstack([_intermediate_points(Y, spec.dim), mu0.points])
    targets = nuT.points

    legs = dual_fixed_end_cost_matrix(spec, mu0.points, ws, tol=0.0)
    entries = np.empty((mu0.size, nuT.size))
    argmaxes = np.empty((mu0.size, nuT.size, spec.dim))
    bilinear = ws @ targets.T
    for i in range(mu0.size):
        scores = np.where(legs[i][:, None] >= SENTINEL, -np.inf, bilinear - legs[i][:, None])
        best = np.argmax(scores, axis=0)
        entries[i] = scores[best, np.arange(nuT.size)]
        argmaxes[i] = ws[best]

    cost = CostMatrix(np.clip(entries, -SENTINEL, SENTINEL), Provenance.COMPOSED)
    result = solve_max(cost, mu0, nuT)
    muT, cells = _glue(result, argmaxes)

    first = w_over(nuT, muT)
    second = c_tilde_transport(spec, mu0, muT, tol=0.0)
    tolerance = _relative(result.value, tol)
    certificate = Certificate('composed = W_over - C~_T', result.value, first.value - second.value, tolerance)

    direct = ballistic_over(spec, mu0, nuT).value
    bound = Certificate('composed <= B_over', result.value, direct, tolerance, inequality=True)
    shape = _potential_shape(second.h, muT.points, concave=False)

    worst = 0.0
    if probes:
        rng = default_rng(seed)
        for _ in range(probes):
            take = rng.choice(ws.shape[0], size=int(rng.integers(1, 6)), replace=False)
            mu = DiscreteMeasure(ws[take], _dirichlet(rng, take.size))
            try:
                lower = w_over(nuT, mu).value - c_tilde_transport(spec, mu0, mu, tol=0.0).value
            except Infeasible:
                continue
            worst = max(worst, lower - direct)

    _log.info('Hopf-Lax max interpolation: value %.12g, certificate difference %.3g', result.value, certificate.difference)
    return InterpolationResult(result.value, muT, cells, certificate, bound, shape, worst, tolerance, result)

class DualityReport(Report):
    """Represents the outcome of :func:`duality_check`.

    Attributes
    ----------
    certificate: :class:`Certificate`
        ``int V_T d nuT + int V~_0 d mu0`` against ``B_under``.
    perturbed: Tuple[:class:`float`, ...]
        The objectives of the perturbed initial functions.
    strict: :class:`bool`
        Whether the objective at ``epsilon = 0.1`` fell strictly below the unperturbed one.
    mirror: :class:`Certificate`
        ``int W_T* d nuT + int W(0, .) d mu0`` against ``B_over``.
    """
    __slots__ = ('certificate', 'perturbed', 'strict', 'mirror', 'tolerance')
    _fields = ('certificate', 'perturbed', 'strict', 'mirror')

    def __init__(self, certificate: Certificate, perturbed: Tuple[float, ...], strict: bool, mirror: Certificate, tolerance: float):
        self.certificate = certificate
        self.perturbed = perturbed
        self.strict = strict
        self.mirror = mirror
        self.tolerance = tolerance

    @property
    def passed(self) -> bool:
        bound = self.certificate.rhs + self.tolerance
        return self.certificate.passed and self.mirror.passed and self.strict and all(p <= bound for p in self.perturbed)


#: Perturbation sizes tried by :func:`duality_check`; 0.1 is the one that must strictly lose.
EPSILONS = tuple(0.01 * k for k in range(1, 21))

def _objective(spec: CostSpec, V0: GridFunction, dual_axes: tuple, mu0: DiscreteMeasure, nuT: DiscreteMeasure) -> float:
    VT = hopf_lax_propagate(spec, V0, spec.horizon)
    V0_tilde = concave_conjugate(V0, dual_axes)
    return nuT.integrate(VT(nuT.points)) + mu0.integrate(V0_tilde(mu0.points))

def initial_potential(spec: CostSpec, mu0: DiscreteMeasure, nuT: DiscreteMeasure, axes: Any = None, dual_axes: Any = None, result: Optional[OTResult] = None) -> GridFunction:
    """Builds the concave initial function ``V_0`` that realises ``B_under(mu0, nuT)``.

    The optimal potentials ``(g, h)`` are centered, ``g`` is extended to the
    covector grid as ``g(v) = max_x h(x) - b(v, x)`` and
    ``V_0(y) = min_v <v, y> + g(v)`` is sampled on the state grid. The
    concave conjugate of ``V_0`` then agrees with ``-g`` on the atoms of ``mu0``.

    Parameters
    ----------
    result: Optional[:class:`OTResult`]
        A solved ``B_under`` problem for the same measures, if already at hand.
    """
    axes = spec.inner_axes if axes is None else coerce_axes(axes)
    dual_axes = spec.inner_axes if dual_axes is None else coerce_axes(dual_axes)
    if result is None:
        result = ballistic_under(spec, mu0, nuT)

    cost = CostMatrix(ballistic_cost_matrix(spec, mu0.points, nuT.points), Provenance.BALLISTIC)
    g, _ = center_potentials(cost, result)
    _, h = conjugate_potentials(cost, g, Direction.MIN)

    b = ballistic_cost_matrix(spec, product_points(dual_axes), nuT.points)
    extended = GridFunction(dual_axes, np.clip((h[None, :] - b).max(axis=1), -SENTINEL, SENTINEL), Convexity.CONVEX)
    return concave_conjugate(-extended, axes)

def duality_check(spec: CostSpec, mu0: DiscreteMeasure, nuT: DiscreteMeasure, axes: Any = None, dual_axes: Any = None, tol: float = 1e-4) -> DualityReport:
    """Realises the ballistic value as a supremum over variational solutions and checks it.

    From the optimal potentials ``(g, h)`` of ``B_under`` the source potential is
    made c-concave and extended to the covector grid as
    ``g(v) = max_x h(x) - b(v, x)``. Then ``V_0(y) = -g*(-y)`` is concave,
    ``V_T`` is its Hopf-Lax propagation and ``V~_0`` its concave conjugate;
    ``int V_T d nuT + int V~_0 d mu0`` must equal ``B_under``. Every
    perturbation ``V_0 - eps sqrt(1 + |y|^2)`` must do no better.

    The mirror check builds ``W_T = h*`` from the potentials of ``B_over`` and
    compares ``int W_T* d nuT + int W(0, .) d mu0`` with ``B_over``, where
    ``W(0, v) = sup_w W_T(w) - c~_T(v, w)``.

    Parameters
    ----------
    axes:
        The state grid ``V`` lives on; defaults to the inner window.
    dual_axes:
        The covector grid; defaults to the inner window.
    tol: :class:`float`
        The absolute tolerance of both certificates.
    """
    axes = spec.inner_axes if axes is None else coerce_axes(axes)
    dual_axes = spec.inner_axes if dual_axes is None else coerce_axes(dual_axes)
    vgrid = product_points(dual_axes)

    lower = ballistic_under(spec, mu0, nuT)
    V0 = initial_potential(spec, mu0, nuT, axes, dual_axes, lower)

    objective = _objective(spec, V0, dual_axes, mu0, nuT)
    certificate = Certificate('variational objective = B_under', objective, lower.value, tol)

    bump = np.sqrt(1.0 + np.sum(V0.points ** 2, axis=1)).reshape(V0.shape)
    perturbed = []
    strict = True
    for eps in EPSILONS:
        candidate = GridFunction(V0.axes, V0.values - eps * bump, Convexity.CONCAVE)
        value = _objective(spec, candidate, dual_axes, mu0, nuT)
        perturbed.append(value)
        if abs(eps - 0.1) < 1e-12:
            strict = value < objective

    upper = ballistic_over(spec, mu0, nuT)

    # h(x) = max_v b(v, x) + g(v) on the state grid, W_T = h*
    xs = product_points(axes)
    h_grid = GridFunction(axes, (ballistic_cost_matrix(spec, mu0.points, xs) + upper.g[:, None]).max(axis=0), Convexity.CONVEX)
    W_T = legendre_conjugate(h_grid, dual_axes)
    W_T_star = legendre_conjugate(W_T, axes)

    starts = []
    for v in mu0.points:
        ws = np.vstack([vgrid, v])
        legs = dual_fixed_end_cost_matrix(spec, v[None, :], ws, tol=0.0)[0]
        finite = legs < SENTINEL
        inside = W_T.contains(ws) & finite
        if not inside.any():
            raise OutOfDomain(v, 'no reachable covector of the dual grid')
        starts.append(float(np.max(W_T(ws[inside]) - legs[inside])))
    mirror_value = nuT.integrate(W_T_star(nuT.points)) + mu0.integrate(np.array(starts))
    mirror = Certificate('mirror objective = B_over', mirror_value, upper.value, tol)

    _log.info('Duality check: objective %.12g against %.12g, mirror %.12g against %.12g',
              objective, lower.value, mirror_value, upper.value)
    return DualityReport(certificate, tuple(perturbed), strict, mirror, tol)


class ReverseReport(Report):
    """Represents the outcome of :func:`reverse_interpolate`.

    Attributes
    ----------
    value: :class:`float`
        ``C_T(nu0, nuT)``.
    extracted: :class:`bool`
        Whether an initial potential was rebuilt. Only measures on the line are extracted.
    concave: Optional[:class:`ConvexityReport`]
        The concavity test of the initial potential on the support of ``nu0``.
    momenta: Optional[:class:`DiscreteMeasure`]
        ``mu0``, the image of ``nu0`` under the gradient of the initial potential.
    certificate: Optional[:class:`Certificate`]
        ``C_T`` against ``B_under(mu0, nuT) - W_under(nu0, mu0)``; ``None`` when the potential is not concave.
    probes: :class:`float`
        The worst ``B_under(mu, nuT) - W_under(nu0, mu) - C_T`` over random ``mu``.
    probe_count: :class:`int`
        How many random measures were tried.
    slope_range: Optional[Tuple[:class:`float`, :class:`float`]]
        The smallest and largest slope of the barycentric map between neighbouring atoms.
    gradient_mismatch: :class:`float`
        How far the gradient of the initial potential is from ``-d_y c_T(y, x)`` at the barycentric targets.
    """
    __slots__ = ('value', 'extracted', 'concave', 'momenta', 'certificate', 'probes', 'probe_count', 'slope_range', 'gradient_mismatch', 'tolerance')
    _fields = ('value', 'extracted', 'concave', 'certificate', 'probes', 'probe_count', 'slope_range', 'gradient_mismatch')

    def __init__(self, value, extracted, concave, momenta, certificate, probes, probe_count, slope_range, gradient_mismatch, tolerance):
        self.value = value
        self.extracted = extracted
        self.concave = concave
        self.momenta = momenta
        self.certificate = certificate
        self.probes = probes
        self.probe_count = probe_count
        self.slope_range = slope_range
        self.gradient_mismatch = gradient_mismatch
        self.tolerance = tolerance

    @property
    def passed(self) -> bool:
        if self.probes > self.tolerance:
            return False
        return self.certificate is None or self.certificate.passed


def _stencil_step(ys: np.ndarray) -> float:
    step = 1e-3 * max(1.0, float(ys[-1] - ys[0]), float(np.abs(ys).max()) if ys.size == 1 else 0.0)
    if ys.size >= 2:
        step = min(step, 0.25 * float(np.diff(ys).min()))
    return step

def _extension_shape(spec: CostSpec, ys: np.ndarray, at: np.ndarray, momenta: np.ndarray) -> ConvexityReport:
    # at[:, 1] holds the potential on the atoms, at[:, 0] and at[:, 2] one stencil step aside
    tol = 1e-9 * max(1.0, float(np.abs(at).max()))
    if spec.lagrangian.potential is not None:
        tol += 10.0 * spec.tolerance

    chords = _potential_shape(at[:, 1], ys[:, None], concave=True)
    kinks = 0.5 * (at[:, 0] + at[:, 2]) - at[:, 1]
    candidates = [(chords.worst_violation, chords.witness), (float(kinks.max()), (float(ys[np.argmax(kinks)]),))]
    if ys.size >= 2:
        rises = np.diff(momenta) * np.diff(ys)
        candidates.append((float(rises.max()), (float(ys[np.argmax(rises) + 1]),)))

    worst, witness = max(candidates, key=lambda pair: pair[0])
    passed = chords.passed and all(excess <= tol for excess, _ in candidates)
    if worst <= 0:
        worst, witness = 0.0, None
    return ConvexityReport(passed, worst, witness, tol, chords.triples + ys.size + max(0, ys.size - 1))

def reverse_interpolate(
    spec: CostSpec,
    nu0: DiscreteMeasure,
    nuT: DiscreteMeasure,
    probe_count: int = 0,
    seed: Optional[int] = None,
    tol: float = 1e-6,
    probe_tol: float = 1e-9,
) -> ReverseReport:
    """Recovers an initial covector measure ``mu0`` from a fixed-end problem.

    ``C_T(nu0, nuT)`` is solved and its potentials are replaced by their
    double c-transform, whose extension
    ``g(y) = max_x h(x) - c_T(y, x)`` is the initial potential. On the line
    ``g`` is sampled on a small stencil around each charged atom of ``nu0``
    and tested for concavity on the support; when it passes, ``mu0`` is the
    image of ``nu0`` under the finite difference gradient of ``g`` and
    ``C_T = B_under(mu0, nuT) - W_under(nu0, mu0)`` is certified.

    Atoms without mass are dropped first. In higher dimensions
    only ``C_T`` is computed and ``extracted`` is ``False``. Either way
    random measures ``mu`` must never do better than ``C_T``.
    """
    nu0, nuT = nu0.charged(), nuT.charged()
    cost = CostMatrix(fixed_end_cost_matrix(spec, nu0.points, nuT.points), Provenance.FIXED_END)
    fixed = solve_min(cost, nu0, nuT)
    value = fixed.value

    extracted = nu0.dim == 1 and nuT.dim == 1
    concave = mu0 = certificate = slope_range = None
    mismatch = 0.0
    if extracted:
        g, _ = center_potentials(cost, fixed)
        _, h = conjugate_potentials(cost, g)

        rows = np.argsort(nu0.points[:, 0], kind='stable')
        ys = nu0.points[rows, 0]

        step = _stencil_step(ys)
        stencil = np.column_stack([ys - step, ys, ys + step]).ravel()
        legs = fixed_end_cost_matrix(spec, stencil, nuT.points)
        values = np.where(legs >= SENTINEL, -SENTINEL, h[None, :] - legs).max(axis=1)
        potential = GridFunction(stencil, values)
        momenta = grid_gradients(potential, ys)[:, 0]
        # momenta that agree up to rounding collapse onto one atom
        scale = 1e-9 * max(1.0, float(np.abs(momenta).max()))
        for k in np.nonzero(np.abs(np.diff(momenta)) <= scale)[0]:
            momenta[k + 1] = momenta[k]

        plan = fixed.plan.matrix[rows]
        targets = (plan @ nuT.points[:, 0]) / nu0.weights[rows]
        if ys.size >= 2:
            slopes = np.diff(targets) / np.diff(ys)
            slope_range = (float(slopes.min()), float(slopes.max()))
        else:
            slope_range = (1.0, 1.0)
        read_off = np.array([-fixed_end_gradients(spec, y, x)[0][0] for y, x in zip(ys, targets)])
        mismatch = float(np.abs(momenta - read_off).max())

        concave = _extension_shape(spec, ys, values.reshape(-1, 3), momenta)
        if concave.passed:
            mu0 = DiscreteMeasure.from_unnormalized(momenta, nu0.weights[rows], 1e-9)
            rhs = ballistic_under(spec, mu0, nuT).value - w_under(nu0, mu0).value
            certificate = Certificate('C_T = B_under(mu0, nuT) - W_under(nu0, mu0)', value, rhs, _relative(value, tol))
        else:
            _log.info('Initial potential is not concave near %s; skipping the equality', concave.witness)
        spread = max(1.0, float(np.abs(momenta).max()))
    else:
        _log.info('Measures live in %d dimensions; only C_T and the random measures are evaluated', nu0.dim)
        reach = float(np.abs(nu0.points).max() + np.abs(nuT.points).max())
        spread = max(1.0, reach / spec.horizon if spec.horizon > 0 else reach)

    worst = -np.inf
    if probe_count:
        rng = default_rng(seed)
        lo, hi = np.full(nu0.dim, -2.0 * spread), np.full(nu0.dim, 2.0 * spread)
        for _ in range(probe_count):
            mu = _random_measure(rng, lo, hi, int(rng.integers(1, 6)))
            gap = ballistic_under(spec, mu, nuT).value - w_under(nu0, mu).value - value
            worst = max(worst, gap)
    probes = max(0.0, float(worst)) if np.isfinite(worst) else 0.0

    return ReverseReport(value, extracted, concave, mu0, certificate, probes, probe_count, slope_range, mismatch, _relative(value, probe_tol))


class FactorizationReport(Report):
    """Represents the outcome of :func:`factorization_check`.

    Attributes
    ----------
    value: :class:`float`
        ``C_1(nu0, nu1)``.
    k: :class:`float`
        ``K = int c0* d mu0``.
    certificate: :class:`Certificate`
        ``C_1 + K`` against ``W_under(mu0, nu1) - W_under(nu0, mu0)``.
    minus: :class:`float`
        ``C_1 - K``, reported next to the certified sum.
    map_available: :class:`bool`
        Whether ``mu0`` was spread enough to build the composite map.
    map_certificate: Optional[:class:`Certificate`]
        ``int c0(S(y) - y) d nu0`` for the composite of the two antitone maps, against ``C_1``.
    """
    __slots__ = ('value', 'k', 'certificate', 'minus', 'map_available', 'map_certificate', 'reverse')
    _fields = ('value', 'k', 'certificate', 'minus', 'map_available', 'map_certificate')

    def __init__(self, value, k, certificate, minus, map_available, map_certificate, reverse):
        self.value = value
        self.k = k
        self.certificate = certificate
        self.minus = minus
        self.map_available = map_available
        self.map_certificate = map_certificate
        self.reverse = reverse

    @property
    def passed(self) -> bool:
        if self.map_certificate is not None and not self.map_certificate.passed:
            return False
        return self.certificate.passed


def factorization_check(
    c0: Union[ConvexProfile, GridFunction],
    nu0: DiscreteMeasure,
    nu1: DiscreteMeasure,
    inner_axes: Any = None,
    tol: float = 1e-6,
    require_map: bool = False,
) -> FactorizationReport:
    """Checks the factorisation of a unit-time translation invariant cost through ``mu0``.

    With ``c(y, x) = c0(x - y)`` and ``mu0`` from :func:`reverse_interpolate`,
    ``C_1 + K = W_under(mu0, nu1) - W_under(nu0, mu0)`` with
    ``K = int c0* d mu0``. When ``mu0`` has at least two atoms the antitone
    maps ``nu0 -> mu0`` and ``mu0 -> nu1`` are composed and the cost of the
    composite is compared with ``C_1``.

    Raises
    ------
    DimensionUnsupported:
        The measures are not one dimensional.
    MapUnavailable:
        The initial potential is not concave, or ``require_map`` is set and
        ``mu0`` collapsed onto a single atom.
    """
    lagrangian = LagrangianSpec.state_independent(c0)
    spec = CostSpec(lagrangian, 1.0, inner_axes=inner_axes)
    if nu0.dim != 1 or nu1.dim != 1:
        raise DimensionUnsupported('the factorization check composes maps on the line only')
    reverse = reverse_interpolate(spec, nu0, nu1, tol=tol)
    if reverse.momenta is None:
        raise MapUnavailable('the initial potential is not concave near {0}'.format(reverse.concave.witness))

    mu0 = reverse.momenta
    conj = lagrangian.kinetic.conjugate(spec.inner_axes if lagrangian.kinetic.kind == 'grid' else None)
    k = mu0.integrate(conj(mu0.points))
    value = reverse.value
    rhs = w_under(mu0, nu1).value - w_under(nu0, mu0).value
    certificate = Certificate('C_1 + K = W_under(mu0, nu1) - W_under(nu0, mu0)', value + k, rhs, _relative(value + k, tol))

    available = mu0.size >= 2
    map_certificate = None
    if available:
        first = brenier_map_1d(nu0, mu0, Sense.ANTITONE)
        second = brenier_map_1d(mu0, nu1, Sense.ANTITONE)
        ys = nu0.points[:, 0]
        composite = second(first(ys))
        integral = nu0.integrate(lagrangian.kinetic((composite - ys)[:, None]))
        map_certificate = Certificate('int c0(S(y) - y) = C_1', integral, value, _relative(value, tol))
    elif require_map:
        raise MapUnavailable('mu0 collapsed onto a single atom')

    return FactorizationReport(value, k, certificate, value - k, available, map_certificate, reverse)

def value_functional(spec: CostSpec, mu0: DiscreteMeasure, nu: DiscreteMeasure, times: Sequence[float]) -> np.ndarray:
    """Evaluates ``t -> B_under_t(mu0, nu)``, with ``t = 0`` giving ``W_under(mu0, nu)``."""
    values = []
    for t in times:
        if t == 0:
            values.append(w_under(mu0, nu).value)
        else:
            values.append(ballistic_under(spec.with_horizon(t), mu0, nu).value)
    return np.array(values)


class RefinementTable(Report):
    """Represents :func:`interpolate_min` over nested intermediate grids.

    Attributes
    ----------
    rows: List[Tuple[:class:`float`, :class:`float`, :class:`float`]]
        ``(spacing, value, value - exact)`` per level, coarsest first.
    exact: :class:`float`
        The unrestricted value ``B_under``.
    monotone: :class:`bool`
        Whether values never increased under refinement.
    """
    __slots__ = ('rows', 'exact', 'monotone')
    _fields = ('rows', 'exact', 'monotone')

    def __init__(self, rows: List[Tuple[float, float, float]], exact: float, monotone: bool):
        self.rows = rows
        self.exact = exact
        self.monotone = monotone

    @property
    def passed(self) -> bool:
        return self.monotone

    def to_table(self) -> List[Tuple[float, ...]]:
        return [tuple(r) for r in self.rows]


def refinement_table(spec: CostSpec, mu0: DiscreteMeasure, nuT: DiscreteMeasure, lo: float, hi: float, intervals: int, levels: int = 3, tol: float = 1e-12) -> RefinementTable:
    """Runs :func:`interpolate_min` on ``levels`` nested grids over ``[lo, hi]`` (one dimension)."""
    if spec.dim != 1:
        raise DimensionUnsupported('refinement tables are built on the line only')

    exact = ballistic_under(spec, mu0, nuT).value
    rows = []
    for axis in nested_axes(lo, hi, intervals, levels):
        value = interpolate_min(spec, mu0, nuT, (axis,)).value
        rows.append((float(axis[1] - axis[0]), value, value - exact))

    monotone = all(b[1] <= a[1] + tol for a, b in zip(rows, rows[1:]))
    return RefinementTable(rows, exact, monotone)
