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
from collections import deque
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

import logging

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import logsumexp

from .abc import Report
from .costs import ballistic_cost_matrix, dual_fixed_end_cost_matrix, fixed_end_cost_matrix
from .enums import Convexity, Direction, Provenance, Sense
from .errors import DimensionUnsupported, Infeasible, InputError, NoConvergence, ProblemTooLarge, SizeMismatch
from .grid import GridFunction
from .measure import DiscreteMeasure
from .utils import SENTINEL

if TYPE_CHECKING:
    from .costs import CostSpec

__all__ = (
    'CostMatrix',
    'TransportPlan',
    'OTResult',
    'PotentialReport',
    'BrenierMap',
    'solve_min',
    'solve_max',
    'bilinear_cost',
    'w_under',
    'w_over',
    'ballistic_under',
    'ballistic_over',
    'c_transport',
    'c_tilde_transport',
    'check_potentials',
    'conjugate_potentials',
    'center_potentials',
    'brenier_map_1d',
    'sinkhorn',
)

_log = logging.getLogger(__name__)

#: Largest support size the dense solver accepts on either side.
MAX_SUPPORT = 512

#: Plan entries above this count as support.
MASS_EPSILON = 1e-12


class CostMatrix:
    """Represents a dense cost between the atoms of two measures.

    Entries equal to ``+SENTINEL`` are forbidden in a min problem and entries
    equal to ``-SENTINEL`` are forbidden in a max problem.

    Attributes
    ----------
    entries: :class:`numpy.ndarray`
        The ``(rows, cols)`` costs.
    provenance: :class:`str`
        One of the :class:`Provenance` constants.
    """
    __slots__ = ('entries', 'provenance')

    def __init__(self, entries: Any, provenance: str = Provenance.CUSTOM):
        entries = np.asarray(entries, dtype=float)
        if entries.ndim != 2 or 0 in entries.shape:
            raise InputError('a cost matrix must be a non-empty two dimensional array')
        if np.isnan(entries).any():
            raise InputError('cost entries must not be NaN')

        self.entries = np.clip(entries, -SENTINEL, SENTINEL)
        self.provenance = provenance

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    def forbidden(self, direction: str = Direction.MIN) -> np.ndarray:
        """Returns the mask of entries no plan may charge in the given direction."""
        if direction == Direction.MIN:
            return self.entries >= SENTINEL
        return self.entries <= -SENTINEL

    def __neg__(self) -> CostMatrix:
        return CostMatrix(-self.entries, self.provenance)

    def __repr__(self):
        return '<CostMatrix shape={0} provenance={1}>'.format(self.shape, self.provenance)


class TransportPlan:
    """Represents a coupling of two discrete measures.

    Raises
    ------
    InputError:
        A marginal is off by more than ``tolerance``.

    Attributes
    ----------
    matrix: :class:`numpy.ndarray`
        The nonnegative ``(rows, cols)`` masses.
    tolerance: :class:`float`
        The tolerance the marginals were checked with.
    """
    __slots__ = ('matrix', 'tolerance')

    def __init__(self, matrix: Any, source_weights: Any, target_weights: Any, tolerance: float = 1e-10):
        matrix = np.asarray(matrix, dtype=float)
        if np.any(matrix < -tolerance):
            raise InputError('plan entries must be nonnegative')
        matrix = np.maximum(matrix, 0.0)

        rows = np.abs(matrix.sum(axis=1) - np.asarray(source_weights)).max()
        cols = np.abs(matrix.sum(axis=0) - np.asarray(target_weights)).max()
        if max(rows, cols) > tolerance:
            raise InputError('plan marginals are off by {0:.3g}'.format(max(rows, cols)))

        self.matrix = matrix
        self.tolerance = tolerance

    @classmethod
    def product(cls, mu: DiscreteMeasure, nu: DiscreteMeasure) -> TransportPlan:
        """Returns the independent coupling ``mu x nu``."""
        return cls(np.outer(mu.weights, nu.weights), mu.weights, nu.weights)

    @property
    def support(self) -> List[Tuple[int, int]]:
        """List[Tuple[:class:`int`, :class:`int`]]: Returns the cells carrying mass, in row major order."""
        rows, cols = np.nonzero(self.matrix > MASS_EPSILON)
        return list(zip(rows.tolist(), cols.tolist()))

    def cost(self, cost: CostMatrix) -> float:
        """Returns ``sum pi * C`` over the support."""
        mask = self.matrix > 0
        return float(np.sum(self.matrix[mask] * cost.entries[mask]))

    def __repr__(self):
        return '<TransportPlan shape={0} nonzeros={1}>'.format(self.matrix.shape, len(self.support))


class OTResult:
    """Represents an optimal plan together with optimal dual potentials.

    Potentials follow ``h(x) - g(v) <= C(v, x)`` for min problems and
    ``h(x) - g(v) >= C(v, x)`` for max problems, with equality on the support
    of the plan and ``g`` of the first source atom fixed at ``0``.

    Attributes
    ----------
    plan: :class:`TransportPlan`
        The optimal plan.
    value: :class:`float`
        The optimal value.
    g: :class:`numpy.ndarray`
        The potential on the source atoms.
    h: :class:`numpy.ndarray`
        The potential on the target atoms.
    gap: :class:`float`
        ``|primal - dual|``.
    direction: :class:`str`
        One of the :class:`Direction` constants.
    iterations: :class:`int`
        How many pivots the solver made.
    """
    __slots__ = ('plan', 'value', 'g', 'h', 'gap', 'direction', 'iterations')

    def __init__(self, plan: TransportPlan, value: float, g: np.ndarray, h: np.ndarray, gap: float, direction: str, iterations: int = 0):
        self.plan = plan
        self.value = value
        self.g = g
        self.h = h
        self.gap = gap
        self.direction = direction
        self.iterations = iterations

    def to_dict(self) -> Dict[str, Any]:
        return {
            'direction': self.direction,
            'value': self.value,
            'gap': self.gap,
            'nonzeros': len(self.plan.support),
            'iterations': self.iterations,
        }

    def __repr__(self):
        return '<OTResult direction={0} value={1} gap={2}>'.format(self.direction, self.value, self.gap)


def _northwest_corner(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n, m = a.size, b.size
    flow = np.zeros((n, m))
    basic = np.zeros((n, m), dtype=bool)
    ra, rb = a.copy(), b.copy()
    i = j = 0
    while True:
        q = max(0.0, min(ra[i], rb[j]))
        flow[i, j] = q
        basic[i, j] = True
        ra[i] -= q
        rb[j] -= q
        if i == n - 1 and j == m - 1:
            break
        if i == n - 1:
            j += 1
        elif j == m - 1:
            i += 1
        elif ra[i] <= rb[j]:
            i += 1
        else:
            j += 1
    return flow, basic

def _potentials(cost: np.ndarray, basic: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # u_i + v_j = C_ij on the spanning tree of basic cells, u_0 = 0
    n, m = cost.shape
    u = np.full(n, np.nan)
    v = np.full(m, np.nan)
    u[0] = 0.0
    queue = deque([(0, True)])
    while queue:
        k, is_row = queue.popleft()
        if is_row:
            for j in np.flatnonzero(basic[k]):
                if np.isnan(v[j]):
                    v[j] = cost[k, j] - u[k]
                    queue.append((j, False))
        else:
            for i in np.flatnonzero(basic[:, k]):
                if np.isnan(u[i]):
                    u[i] = cost[i, k] - v[k]
                    queue.append((i, True))
    return u, v

def _cycle(basic: np.ndarray, row: int, col: int) -> List[Tuple[int, int]]:
    # path through the basis tree from column node `col` to row node `row`
    parent: Dict[Tuple[int, bool], Tuple[int, bool]] = {}
    start = (col, False)
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        k, is_row = node
        if node == (row, True):
            break
        neighbours = np.flatnonzero(basic[k]) if is_row else np.flatnonzero(basic[:, k])
        for nb in neighbours:
            nxt = (int(nb), not is_row)
            if nxt not in seen:
                seen.add(nxt)
                parent[nxt] = node
                queue.append(nxt)

    cells = []
    node = (row, True)
    while node != start:
        prev = parent[node]
        if node[1]:
            cells.append((node[0], prev[0]))
        else:
            cells.append((prev[0], node[0]))
        node = prev
    return cells

def _transportation_simplex(cost: np.ndarray, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    n, m = cost.shape
    flow, basic = _northwest_corner(a, b)
    scale = 1.0 + np.abs(cost).max()
    eps = 1e-12 * scale
    cap = 50 * n * m + 1000
    degenerate_streak = 0

    for iteration in range(cap):
        u, v = _potentials(cost, basic)
        reduced = cost - u[:, None] - v[None, :]
        reduced[basic] = 0.0

        if degenerate_streak > n + m:
            # Bland's rule: first improving cell in row major order
            candidates = np.flatnonzero(reduced.ravel() < -eps)
            if candidates.size == 0:
                return flow, u, v, iteration
            enter = int(candidates[0])
        else:
            enter = int(np.argmin(reduced))
            if reduced.flat[enter] >= -eps:
                return flow, u, v, iteration

        row, col = divmod(enter, m)
        path = _cycle(basic, row, col)
        minus = path[0::2]
        plus = path[1::2]

        theta = min(flow[c] for c in minus)
        leaving = min(c for c in minus if flow[c] <= theta + 1e-15)
        theta = flow[leaving]

        flow[row, col] += theta
        for c in plus:
            flow[c] += theta
        for c in minus:
            flow[c] = max(0.0, flow[c] - theta)
        flow[leaving] = 0.0
        basic[leaving] = False
        basic[row, col] = True

        degenerate_streak = degenerate_streak + 1 if theta <= 1e-15 else 0

    raise NoConvergence('transportation simplex did not terminate', cap)

def _check_sizes(cost: CostMatrix, mu: DiscreteMeasure, nu: DiscreteMeasure) -> None:
    if cost.shape != (mu.size, nu.size):
        raise SizeMismatch('cost of shape {0} does not match measures of sizes {1} and {2}'.format(cost.shape, mu.size, nu.size))
    if max(cost.shape) > MAX_SUPPORT:
        raise ProblemTooLarge('supports are limited to {0} atoms, got {1}'.format(MAX_SUPPORT, cost.shape))

def solve_min(cost: CostMatrix, mu: DiscreteMeasure, nu: DiscreteMeasure) -> OTResult:
    """Solves ``inf { sum pi C ; pi in K(mu, nu) }`` exactly.

    The transportation simplex starts from the north-west corner basis,
    enters the cell of most negative reduced cost (the first one in row
    major order on ties) and switches to Bland's rule after a streak of
    degenerate pivots. Forbidden cells are priced with a large finite
    penalty; a plan that still charges one of them means no feasible plan
    exists.

    Raises
    ------
    SizeMismatch:
        The cost does not match the measures.
    ProblemTooLarge:
        A support has more than :data:`MAX_SUPPORT` atoms.
    Infeasible:
        Every plan charges a forbidden cell.
    """
    _check_sizes(cost, mu, nu)
    if np.any(cost.entries <= -SENTINEL):
        raise InputError('a min problem cost must be bounded below')

    forbidden = cost.forbidden(Direction.MIN)
    if (forbidden.all(axis=1) & (mu.weights > 0)).any() or (forbidden.all(axis=0) & (nu.weights > 0)).any():
        raise Infeasible('a charged row or column of the cost has no finite entry')

    entries = cost.entries
    if forbidden.any():
        finite = entries[~forbidden]
        spread = 1.0 + finite.max() - finite.min()
        lightest = min(mu.weights[mu.weights > 0].min(), nu.weights[nu.weights > 0].min())
        penalty = finite.max() + spread * 1e4 * max(cost.shape) / lightest
        entries = np.where(forbidden, penalty, entries)

    flow, u, v, iterations = _transportation_simplex(entries, mu.weights, nu.weights)
    if np.any(flow[forbidden] > MASS_EPSILON):
        raise Infeasible('the sentinel pattern blocks every plan')
    flow[forbidden] = 0.0

    plan = TransportPlan(flow, mu.weights, nu.weights)
    g = -u
    h = v
    shift = g[0]
    g = g - shift
    h = h - shift

    value = plan.cost(cost)
    dual = float(nu.weights @ h - mu.weights @ g)
    gap = abs(value - dual)
    _log.debug('Transportation simplex: %d pivots, value %.12g, gap %.3g', iterations, value, gap)
    return OTResult(plan, value, g, h, gap, Direction.MIN, iterations)

def solve_max(cost: CostMatrix, mu: DiscreteMeasure, nu: DiscreteMeasure) -> OTResult:
    """Solves ``sup { sum pi C ; pi in K(mu, nu) }`` as the min problem of ``-C``."""
    _check_sizes(cost, mu, nu)
    if np.any(cost.entries >= SENTINEL):
        raise InputError('a max problem cost must be bounded above')

    result = solve_min(-cost, mu, nu)
    return OTResult(result.plan, -result.value, -result.g, -result.h, result.gap, Direction.MAX, result.iterations)

def _solve(cost: CostMatrix, mu: DiscreteMeasure, nu: DiscreteMeasure, direction: str) -> OTResult:
    return solve_min(cost, mu, nu) if direction == Direction.MIN else solve_max(cost, mu, nu)

def bilinear_cost(mu: DiscreteMeasure, nu: DiscreteMeasure) -> CostMatrix:
    """Returns the cost ``<v, x>`` between the atoms of ``mu`` and ``nu``."""
    if mu.dim != nu.dim:
        raise SizeMismatch('measures of dimensions {0} and {1} cannot be paired'.format(mu.dim, nu.dim))
    return CostMatrix(mu.points @ nu.points.T, Provenance.BILINEAR)

def w_under(mu: DiscreteMeasure, nu: DiscreteMeasure) -> OTResult:
    """Solves ``inf { int <v, x> d pi ; pi in K(mu, nu) }``."""
    return solve_min(bilinear_cost(mu, nu), mu, nu)

def w_over(mu: DiscreteMeasure, nu: DiscreteMeasure) -> OTResult:
    """Solves ``sup { int <v, x> d pi ; pi in K(mu, nu) }``."""
    return solve_max(bilinear_cost(mu, nu), mu, nu)

def _same_dim(spec: CostSpec, *measures: DiscreteMeasure) -> None:
    for m in measures:
        if m.dim != spec.dim:
            raise SizeMismatch('measure of dimension {0} does not match the Lagrangian of dimension {1}'.format(m.dim, spec.dim))

def ballistic_under(spec: CostSpec, mu0: DiscreteMeasure, nuT: DiscreteMeasure) -> OTResult:
    """Solves ``inf { int b_T(v, x) d pi ; pi in K(mu0, nuT) }``."""
    _same_dim(spec, mu0, nuT)
    cost = CostMatrix(ballistic_cost_matrix(spec, mu0.points, nuT.points), Provenance.BALLISTIC)
    return solve_min(cost, mu0, nuT)

def ballistic_over(spec: CostSpec, mu0: DiscreteMeasure, nuT: DiscreteMeasure) -> OTResult:
    """Solves ``sup { int b_T(v, x) d pi ; pi in K(mu0, nuT) }``."""
    _same_dim(spec, mu0, nuT)
    cost = CostMatrix(ballistic_cost_matrix(spec, mu0.points, nuT.points), Provenance.BALLISTIC)
    return solve_max(cost, mu0, nuT)

def c_transport(spec: CostSpec, nu0: DiscreteMeasure, nuT: DiscreteMeasure) -> OTResult:
    """Solves ``C_T(nu0, nuT) = inf { int c_T(y, x) d pi ; pi in K(nu0, nuT) }``."""
    _same_dim(spec, nu0, nuT)
    cost = CostMatrix(fixed_end_cost_matrix(spec, nu0.points, nuT.points), Provenance.FIXED_END)
    return solve_min(cost, nu0, nuT)

def c_tilde_transport(spec: CostSpec, mu0: DiscreteMeasure, muT: DiscreteMeasure, tol: Optional[float] = None) -> OTResult:
    """Solves ``C~_T(mu0, muT) = inf { int c~_T(u, w) d pi ; pi in K(mu0, muT) }``."""
    _same_dim(spec, mu0, muT)
    cost = CostMatrix(dual_fixed_end_cost_matrix(spec, mu0.points, muT.points, tol=tol), Provenance.DUAL_FIXED_END)
    return solve_min(cost, mu0, muT)


class PotentialReport(Report):
    """Represents the outcome of :func:`check_potentials`.

    Attributes
    ----------
    admissibility: :class:`float`
        The worst violation of the dual inequality over all finite cells.
    slackness: :class:`float`
        The worst ``|h - g - C|`` over the cells carrying mass.
    tolerance: :class:`float`
        The admissible violation.
    direction: :class:`str`
        The direction the inequality was read in.
    """
    __slots__ = ('admissibility', 'slackness', 'tolerance', 'direction')
    _fields = ('direction', 'admissibility', 'slackness', 'tolerance')

    def __init__(self, admissibility: float, slackness: float, tolerance: float, direction: str):
        self.admissibility = admissibility
        self.slackness = slackness
        self.tolerance = tolerance
        self.direction = direction

    @property
    def passed(self) -> bool:
        return self.admissibility <= self.tolerance and self.slackness <= self.tolerance


def check_potentials(result: OTResult, cost: CostMatrix, direction: Optional[str] = None, tol: float = 1e-9) -> PotentialReport:
    """Checks admissibility everywhere and complementary slackness on the plan support.

    Parameters
    ----------
    direction: Optional[:class:`str`]
        Defaults to the direction the result was solved in.
    tol: :class:`float`
        Relative to ``1 + max |C|`` over finite cells.
    """
    direction = direction or result.direction
    forbidden = cost.forbidden(direction)
    finite = cost.entries[~forbidden]
    tolerance = tol * (1.0 + (np.abs(finite).max() if finite.size else 0.0))

    slack = result.h[None, :] - result.g[:, None] - cost.entries
    if direction == Direction.MAX:
        slack = -slack

    admissibility = float(max(0.0, slack[~forbidden].max()))
    support = result.plan.matrix > MASS_EPSILON
    slackness = float(np.abs(slack[support]).max()) if support.any() else 0.0
    return PotentialReport(admissibility, slackness, tolerance, direction)

def conjugate_potentials(cost: CostMatrix, g: Any, direction: str = Direction.MIN) -> Tuple[np.ndarray, np.ndarray]:
    """Replaces ``g`` by its double c-transform.

    For min problems ``h(x) = min_v C(v, x) + g(v)`` and
    ``g_cc(v) = max_x h(x) - C(v, x)``, so ``(g_cc, h)`` is admissible and
    ``g_cc <= g``. Max problems swap min and max.

    Returns
    -------
    Tuple[:class:`numpy.ndarray`, :class:`numpy.ndarray`]
        ``g_cc`` and ``h``.
    """
    g = np.asarray(g, dtype=float).ravel()
    if g.size != cost.shape[0]:
        raise SizeMismatch('expected {0} potential values, got {1}'.format(cost.shape[0], g.size))

    forbidden = cost.forbidden(direction)
    entries = cost.entries
    if direction == Direction.MIN:
        h = np.where(forbidden, np.inf, entries + g[:, None]).min(axis=0)
        g_cc = np.where(forbidden, -np.inf, h[None, :] - entries).max(axis=1)
    else:
        h = np.where(forbidden, -np.inf, entries + g[:, None]).max(axis=0)
        g_cc = np.where(forbidden, np.inf, h[None, :] - entries).min(axis=1)
    return g_cc, h


def center_potentials(cost: CostMatrix, result: OTResult) -> Tuple[np.ndarray, np.ndarray]:
    """Moves optimal potentials towards the middle of the optimal dual face.

    Potentials are only pinned down inside each connected component of the
    support graph; the offsets between components are free within the
    slack of the uncharged cells. Both extreme offsets are found by shortest
    paths over the components and averaged, so uncharged cells stay strictly
    slack whenever the face allows it.

    Returns
    -------
    Tuple[:class:`numpy.ndarray`, :class:`numpy.ndarray`]
        The centered ``g`` and ``h``, normalised so that ``g[0] = 0``.
    """
    rows, cols = cost.shape
    sign = 1.0 if result.direction == Direction.MIN else -1.0
    entries = sign * cost.entries
    g = sign * result.g
    h = sign * result.h
    allowed = ~cost.forbidden(result.direction)

    parent = list(range(rows + cols))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in result.plan.support:
        parent[find(i)] = find(rows + j)

    roots = sorted({find(a) for a in range(rows + cols)})
    label = {root: k for k, root in enumerate(roots)}
    comp = np.array([label[find(a)] for a in range(rows + cols)])
    k = len(roots)
    if k == 1:
        return result.g, result.h

    # delta[b] - delta[a] <= slack of every cell from component a to component b
    slack = np.where(allowed, entries - h[None, :] + g[:, None], np.inf)
    dist = np.full((k, k), np.inf)
    np.fill_diagonal(dist, 0.0)
    for a in range(k):
        for b in range(k):
            if a != b:
                mask = (comp[:rows, None] == a) & (comp[None, rows:] == b)
                if mask.any():
                    dist[a, b] = min(dist[a, b], float(slack[mask].min()))
    for m in range(k):
        dist = np.minimum(dist, dist[:, m:m + 1] + dist[m:m + 1, :])

    if not np.isfinite(dist[0]).all() or not np.isfinite(dist[:, 0]).all():
        _log.debug('Support components are not mutually constrained; keeping the solver potentials')
        return result.g, result.h

    delta = 0.5 * (dist[0, :] - dist[:, 0])
    g = g + delta[comp[:rows]]
    h = h + delta[comp[rows:]]
    shift = g[0]
    return sign * (g - shift), sign * (h - shift)

class BrenierMap:
    """Represents a monotone or antitone coupling of two measures on the line.

    Attributes
    ----------
    plan: :class:`TransportPlan`
        The quantile coupling, rows indexed like ``nu0`` and columns like ``mu0``.
    value: :class:`float`
        ``int y v d pi``.
    sense: :class:`str`
        One of the :class:`Sense` constants.
    sources: :class:`numpy.ndarray`
        The sorted atoms of ``nu0`` that carry mass.
    images: :class:`numpy.ndarray`
        The barycentric image of each sorted atom.
    potential: :class:`GridFunction`
        A primitive of the interpolated map on the support of ``nu0``,
        flagged convex for monotone and concave for antitone maps.
    """
    __slots__ = ('plan', 'value', 'sense', 'sources', 'images', 'potential', '_rows', '_cols')

    def __init__(self, plan: TransportPlan, value: float, sense: str, sources: np.ndarray, images: np.ndarray, potential: GridFunction, rows: np.ndarray, cols: np.ndarray):
        self.plan = plan
        self.value = value
        self.sense = sense
        self.sources = sources
        self.images = images
        self.potential = potential
        self._rows = rows
        self._cols = cols

    def __call__(self, y: Any) -> np.ndarray:
        """Evaluates the map, interpolating linearly between atoms and constant beyond them."""
        return np.interp(np.asarray(y, dtype=float), self.sources, self.images)

    @property
    def pairs(self) -> List[Tuple[float, float, float]]:
        """List[Tuple[:class:`float`, :class:`float`, :class:`float`]]: Returns ``(y, v, mass)`` for every charged cell."""
        return [(float(self._rows[i]), float(self._cols[j]), float(self.plan.matrix[i, j])) for i, j in self.plan.support]

    def __repr__(self):
        return '<BrenierMap sense={0} value={1}>'.format(self.sense, self.value)


def brenier_map_1d(nu0: DiscreteMeasure, mu0: DiscreteMeasure, sense: str = Sense.MONOTONE) -> BrenierMap:
    """Builds the monotone (or antitone) quantile coupling of two measures on the line.

    The monotone coupling attains ``W_over(mu0, nu0)`` and the antitone one
    ``W_under(mu0, nu0)``.

    Raises
    ------
    DimensionUnsupported:
        A measure is not one dimensional.
    """
    if nu0.dim != 1 or mu0.dim != 1:
        raise DimensionUnsupported('Brenier maps are built on the line only')

    rows = np.argsort(nu0.points[:, 0], kind='stable')
    cols = np.argsort(mu0.points[:, 0], kind='stable')
    if sense == Sense.ANTITONE:
        cols = cols[::-1]
    elif sense != Sense.MONOTONE:
        raise ValueError('unknown sense {0!r}'.format(sense))

    sorted_flow, _ = _northwest_corner(nu0.weights[rows], mu0.weights[cols])
    flow = np.zeros((nu0.size, mu0.size))
    flow[np.ix_(rows, cols)] = sorted_flow
    plan = TransportPlan(flow, nu0.weights, mu0.weights)

    y = nu0.points[:, 0]
    v = mu0.points[:, 0]
    value = float(np.sum(flow * np.outer(y, v)))

    charged = rows[nu0.weights[rows] > 0]
    sources = y[charged]
    images = (flow @ v)[charged] / nu0.weights[charged]
    if sources.size == 1:
        axis = np.array([sources[0] - 1.0, sources[0] + 1.0])
        slope = np.full(2, images[0])
    else:
        axis = sources
        slope = images
    primitive = cumulative_trapezoid(slope, axis, initial=0.0)
    flag = Convexity.CONVEX if sense == Sense.MONOTONE else Convexity.CONCAVE
    potential = GridFunction(axis, primitive, flag)
    return BrenierMap(plan, value, sense, sources, images, potential, y, v)

def sinkhorn(cost: CostMatrix, mu: DiscreteMeasure, nu: DiscreteMeasure, epsilon: float = 1e-2, max_iter: int = 10_000, tol: float = 1e-9) -> Tuple[np.ndarray, float]:
    """Approximates the min problem by entropic regularisation in the log domain.

    This is a preview only; :func:`solve_min` is the exact solver.

    Returns
    -------
    Tuple[:class:`numpy.ndarray`, :class:`float`]
        The regularised plan and its (unregularised) cost.

    Raises
    ------
    NoConvergence:
        The marginals did not settle within ``max_iter`` sweeps.
    """
    _check_sizes(cost, mu, nu)
    if epsilon <= 0:
        raise ValueError('epsilon must be positive')

    C = cost.entries
    # massless atoms get log weight -inf and carry no mass
    log_a = np.log(mu.weights, out=np.full(mu.size, -np.inf), where=mu.weights > 0)
    log_b = np.log(nu.weights, out=np.full(nu.size, -np.inf), where=nu.weights > 0)
    f = np.zeros(mu.size)
    g = np.zeros(nu.size)

    for iteration in range(max_iter):
        f = epsilon * (log_a - logsumexp((g[None, :] - C) / epsilon, axis=1))
        g = epsilon * (log_b - logsumexp((f[:, None] - C) / epsilon, axis=0))
        plan = np.exp((f[:, None] + g[None, :] - C) / epsilon)
        error = np.abs(plan.sum(axis=1) - mu.weights).max()
        if error < tol:
            _log.debug('Sinkhorn converged after %d sweeps', iteration + 1)
            break
    else:
        raise NoConvergence('Sinkhorn marginals did not settle', max_iter)

    finite = C < SENTINEL
    return plan, float(np.sum(plan[finite] * C[finite]))
