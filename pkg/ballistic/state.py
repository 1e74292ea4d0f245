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
from typing import TYPE_CHECKING, Any, Callable, Dict, List, Optional, Sequence, Tuple

import configparser
import logging
import os

import numpy as np

from .abc import Certificate, Report
from .costs import CostSpec, ballistic_cost_matrix, dual_fixed_end_cost_matrix, fixed_end_cost_matrix, verify_cost_dualities
from .enums import Direction, Provenance, Variant
from .errors import ConfigError, VariantUnsupported
from .eulerian import convergence_table, displacement_path, eulerian_upper_bound_check
from .hamiltonian import lp_support_map, map_from_concave_potential, trajectory_optimality_check, verify_support
from .interpolation import factorization_check, duality_check, initial_potential, interpolate_max, interpolate_min, refinement_table, reverse_interpolate
from .lagrangian import AssumptionParams, LagrangianSpec, profile_from_name, validate_assumptions
from .measure import DiscreteMeasure
from .transport import CostMatrix, OTResult, ballistic_over, ballistic_under, bilinear_cost, check_potentials, sinkhorn, solve_max, solve_min
from .utils import MISSING, make_axis

if TYPE_CHECKING:
    from .types.config import GridSection, LagrangianSection, MeasuresSection, ProblemSection
    from .types.report import PlanRow, RefinementRow

__all__ = (
    'CommandResult',
    'State',
    'COMMANDS',
)

_log = logging.getLogger(__name__)

#: The commands :meth:`State.process_command` understands.
COMMANDS = ('transport', 'ballistic', 'interpolate', 'reverse', 'duality', 'flowmap', 'eulerian', 'validate')

_VARIANTS = {
    'quadratic': Variant.QUADRATIC,
    'state_independent': Variant.STATE_INDEPENDENT,
    'separable': Variant.SEPARABLE_CONVEX,
    'separable_convex': Variant.SEPARABLE_CONVEX,
}

Table = Tuple[Tuple[str, ...], List[Tuple[Any, ...]]]


class CommandResult:
    """Collects the reports and tables produced by one command.

    Attributes
    ----------
    name: :class:`str`
        The command.
    sections: List[Tuple[:class:`str`, List[:class:`str`], :class:`bool`]]
        ``(title, lines, passed)`` per report, in the order they were added.
    tables: Dict[:class:`str`, Tuple[Tuple[:class:`str`, ...], List[:class:`tuple`]]]
        Plot ready tables by name.
    """
    __slots__ = ('name', 'sections', 'tables')

    def __init__(self, name: str):
        self.name = name
        self.sections = []
        self.tables = {}

    def add_report(self, title: str, report: Report) -> None:
        self.sections.append((title, report.to_lines(), bool(report.passed)))

    def add_values(self, title: str, values: Dict[str, Any]) -> None:
        lines = ['{0}: {1}'.format(k, _render(v)) for k, v in values.items()]
        self.sections.append((title, lines, True))

    def add_table(self, name: str, header: Sequence[str], rows: List[Tuple[Any, ...]]) -> None:
        self.tables[name] = (tuple(header), rows)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.sections)

    def to_lines(self) -> List[str]:
        lines = ['command: {0}'.format(self.name), 'status: {0}'.format('pass' if self.passed else 'fail')]
        for title, body, _ in self.sections:
            lines.append('')
            lines.append('[{0}]'.format(title))
            lines.extend(body)
        return lines

    def __repr__(self):
        return '<CommandResult name={0} passed={1}>'.format(self.name, self.passed)


def _render(value: Any) -> str:
    if isinstance(value, float):
        return '{0:.12g}'.format(value)
    return str(value)


class State:
    """
    A class that implements configuration loading and the handling of commands.

    Each command ``name`` is served by a ``handle_{name}`` method that reads
    its own section of the configuration.

    Parameters
    ----------
    parser: :class:`configparser.ConfigParser`
        The parsed configuration.
    base: :class:`str`
        The directory measure paths are resolved against.
    seed: Optional[:class:`int`]
        Overrides ``[problem] seed``.
    tol: Optional[:class:`float`]
        Overrides ``[problem] tolerance``.
    """
    if TYPE_CHECKING:
        parser: configparser.ConfigParser
        base: str

    def __init__(self, parser: configparser.ConfigParser, *, base: str = '.', seed: Optional[int] = None, tol: Optional[float] = None):
        self.parser = parser
        self.base = base
        self._seed = seed
        self._tol = tol
        self._measures = {}

    @classmethod
    def from_file(cls, path: str, **options: Any) -> State:
        """Reads an INI configuration file.

        Raises
        ------
        ConfigError:
            The file is missing or malformed.
        """
        if not os.path.isfile(path):
            raise ConfigError('configuration file {0!r} does not exist'.format(path))

        parser = configparser.ConfigParser(inline_comment_prefixes=('#', ';'))
        try:
            parser.read(path, encoding='utf-8')
        except configparser.Error as exc:
            raise ConfigError('cannot parse {0!r}: {1}'.format(path, exc)) from exc
        return cls(parser, base=os.path.dirname(os.path.abspath(path)), **options)

    # configuration access

    def get(self, section: str, key: str, fallback: Any = MISSING, kind: Callable[[str], Any] = float) -> Any:
        try:
            raw = self.parser.get(section, key)
        except (configparser.NoSectionError, configparser.NoOptionError):
            if fallback is MISSING:
                raise ConfigError('missing [{0}] {1}'.format(section, key)) from None
            return fallback

        try:
            if kind is bool:
                return self.parser.getboolean(section, key)
            return kind(raw)
        except ValueError:
            raise ConfigError('[{0}] {1} = {2!r} is not a valid {3}'.format(section, key, raw, kind.__name__)) from None

    def problem(self) -> ProblemSection:
        return {
            'horizon': self.get('problem', 'horizon', 1.0),
            'dimension': self.get('problem', 'dimension', 1, int),
            'seed': self.seed,
            'tolerance': self.tolerance,
        }

    @property
    def seed(self) -> Optional[int]:
        if self._seed is not None:
            return self._seed
        return self.get('problem', 'seed', None, int)

    @property
    def tolerance(self) -> float:
        if self._tol is not None:
            return self._tol
        return self.get('problem', 'tolerance', 1e-9)

    def require_seed(self) -> int:
        seed = self.seed
        if seed is None:
            raise ConfigError('randomized probes need [problem] seed or --seed')
        return seed

    def grid(self, section: str = 'grid') -> GridSection:
        lo = self.get(section, 'lo', self.get('grid', 'lo', -8.0))
        hi = self.get(section, 'hi', self.get('grid', 'hi', 8.0))
        spacing = self.get(section, 'spacing', self.get('grid', 'spacing', 0.01))
        if hi <= lo or spacing <= 0:
            raise ConfigError('[{0}] needs lo < hi and a positive spacing'.format(section))
        return {'lo': lo, 'hi': hi, 'spacing': spacing, 'path_segments': self.get('grid', 'path_segments', 32, int)}

    def axes(self, section: str = 'grid') -> Tuple[np.ndarray, ...]:
        grid = self.grid(section)
        axis = make_axis(grid['lo'], grid['hi'], grid['spacing'])
        return (axis,) * self.problem()['dimension']

    def lagrangian_section(self) -> LagrangianSection:
        section: LagrangianSection = {
            'variant': self.get('lagrangian', 'variant', 'quadratic', str).strip().lower(),
            'mass': self.get('lagrangian', 'mass', 1.0),
            'l0': self.get('lagrangian', 'l0', 'quadratic', str),
            'l0_scale': self.get('lagrangian', 'l0_scale', 1.0),
            'theta': self.get('lagrangian', 'theta', 'zero', str),
            'theta_scale': self.get('lagrangian', 'theta_scale', 1.0),
            'rho': self.get('lagrangian', 'rho', 0.0),
            'alpha': self.get('lagrangian', 'alpha', 0.0),
            'beta': self.get('lagrangian', 'beta', 0.0),
        }
        potential = self.get('lagrangian', 'potential', None, str)
        if potential is not None:
            section['potential'] = potential
            section['potential_scale'] = self.get('lagrangian', 'potential_scale', 1.0)
        return section

    def lagrangian(self) -> LagrangianSpec:
        section = self.lagrangian_section()
        try:
            variant = _VARIANTS[section['variant']]
        except KeyError:
            raise ConfigError('unknown Lagrangian variant {0!r}'.format(section['variant'])) from None

        dim = self.problem()['dimension']
        try:
            params = AssumptionParams.from_profile(
                section['theta'],
                section['theta_scale'],
                rho=section['rho'],
                alpha=section['alpha'],
                beta=section['beta'],
            )
            if variant == Variant.QUADRATIC:
                return LagrangianSpec.quadratic(section['mass'], params=params, dim=dim)

            l0 = profile_from_name(section['l0'], section['l0_scale'])
            if variant == Variant.STATE_INDEPENDENT:
                return LagrangianSpec.state_independent(l0, params=params, dim=dim)

            if 'potential' not in section:
                raise ConfigError('missing [lagrangian] potential')
            potential = profile_from_name(section['potential'], section['potential_scale'])
            return LagrangianSpec.separable(l0, potential, params=params, dim=dim)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError('invalid [lagrangian] section: {0}'.format(exc)) from exc

    def cost_spec(self) -> CostSpec:
        grid = self.grid()
        horizon = self.problem()['horizon']
        if horizon < 0:
            raise ConfigError('[problem] horizon must be non-negative')
        return CostSpec(self.lagrangian(), horizon, grid['path_segments'], self.axes())

    def measures(self) -> MeasuresSection:
        section: MeasuresSection = {
            'source': self.get('measures', 'source', kind=str),
            'target': self.get('measures', 'target', kind=str),
        }
        intermediate = self.get('measures', 'intermediate', None, str)
        if intermediate is not None:
            section['intermediate'] = intermediate
        return section

    def measure(self, key: str, fallback: Any = MISSING) -> DiscreteMeasure:
        try:
            return self._measures[key]
        except KeyError:
            pass

        path = self.measures().get(key, fallback)
        if path is MISSING:
            raise ConfigError('missing [measures] {0}'.format(key))
        if path is None:
            return None
        path = os.path.join(self.base, path)
        if not os.path.isfile(path):
            raise ConfigError('[measures] {0} = {1!r} does not exist'.format(key, path))

        measure = DiscreteMeasure.loadtxt(path, self.problem()['dimension'])
        self._measures[key] = measure
        return measure

    # commands

    def process_command(self, name: str) -> CommandResult:
        handler = getattr(self, 'handle_{0}'.format(name.lower()), None)
        if handler is None:
            raise ConfigError('unknown command {0!r}'.format(name))

        result = CommandResult(name.lower())
        _log.info('Running %s', result.name)
        handler(result)
        return result

    def handle_transport(self, result: CommandResult) -> None:
        mu, nu = self.measure('source'), self.measure('target')
        kind = self.get('transport', 'cost', Provenance.BILINEAR, str)
        direction = self.get('transport', 'direction', Direction.MIN, str)
        if direction not in (Direction.MIN, Direction.MAX):
            raise ConfigError('[transport] direction must be min or max')

        if kind == Provenance.BILINEAR:
            cost = bilinear_cost(mu, nu)
        else:
            spec = self.cost_spec()
            builders = {
                Provenance.BALLISTIC: ballistic_cost_matrix,
                Provenance.FIXED_END: fixed_end_cost_matrix,
                Provenance.DUAL_FIXED_END: dual_fixed_end_cost_matrix,
            }
            try:
                build = builders[kind]
            except KeyError:
                raise ConfigError('unknown [transport] cost {0!r}'.format(kind)) from None
            cost = CostMatrix(build(spec, mu.points, nu.points), kind)

        solved = solve_min(cost, mu, nu) if direction == Direction.MIN else solve_max(cost, mu, nu)
        result.add_values('solution', solved.to_dict())
        result.add_report('potentials', check_potentials(solved, cost))

        epsilon = self.get('transport', 'sinkhorn_epsilon', None)
        if epsilon is not None and direction == Direction.MIN:
            _, approx = sinkhorn(cost, mu, nu, epsilon)
            result.add_values('entropic preview', {'epsilon': epsilon, 'value': approx})

        self._plan_table(result, solved, mu, nu)
        result.add_table('potentials', ('side', 'index', 'value'),
                         [('source', i, float(g)) for i, g in enumerate(solved.g)] + [('target', j, float(h)) for j, h in enumerate(solved.h)])

    def handle_ballistic(self, result: CommandResult) -> None:
        spec = self.cost_spec()
        mu, nu = self.measure('source'), self.measure('target')
        lower = ballistic_under(spec, mu, nu)
        upper = ballistic_over(spec, mu, nu)
        result.add_values('B_under', lower.to_dict())
        result.add_values('B_over', upper.to_dict())
        result.add_report('order', Certificate('B_under <= B_over', lower.value, upper.value, self.tolerance, inequality=True))
        if self.get('ballistic', 'dualities', True, bool):
            result.add_report('cost dualities', verify_cost_dualities(spec, mu.points, nu.points, self.get('ballistic', 'tolerance', 1e-6)))
        self._plan_table(result, lower, mu, nu)

    def handle_interpolate(self, result: CommandResult) -> None:
        spec = self.cost_spec()
        mu, nu = self.measure('source'), self.measure('target')
        direction = self.get('interpolate', 'direction', Direction.MIN, str)
        probes = self.get('interpolate', 'probes', 0, int)
        seed = self.require_seed() if probes else None
        tol = self.get('interpolate', 'tolerance', self.tolerance)

        Y = self.axes('interpolate')
        run = interpolate_min if direction == Direction.MIN else interpolate_max
        report = run(spec, mu, nu, Y, probes=probes, seed=seed, tol=tol)
        result.add_report('interpolation', report)
        result.add_table('intermediate', ('point', 'weight'), [(tuple(p.tolist()), float(w)) for p, w in report.intermediate])

        levels = self.get('interpolate', 'levels', 0, int)
        if levels and direction == Direction.MIN and spec.dim == 1:
            grid = self.grid('interpolate')
            table = refinement_table(spec, mu, nu, grid['lo'], grid['hi'], self.get('interpolate', 'intervals', 8, int), levels)
            result.add_report('refinement', table)
            rows: List[RefinementRow] = [{'spacing': s, 'value': v, 'error': e} for s, v, e in table.to_table()]
            result.add_table('refinement', ('spacing', 'value', 'error'), [(r['spacing'], r['value'], r['error']) for r in rows])

    def handle_reverse(self, result: CommandResult) -> None:
        spec = self.cost_spec()
        nu0, nuT = self.measure('source'), self.measure('target')
        probes = self.get('reverse', 'probes', 0, int)
        seed = self.require_seed() if probes else None
        report = reverse_interpolate(spec, nu0, nuT, probes, seed, self.get('reverse', 'tolerance', 1e-6))
        result.add_report('reverse', report)
        if report.momenta is not None:
            result.add_table('momenta', ('point', 'weight'), [(tuple(p.tolist()), float(w)) for p, w in report.momenta])

        if self.get('reverse', 'factorization', False, bool):
            L = spec.lagrangian
            if L.potential is not None:
                raise VariantUnsupported('the factorization check needs a state independent Lagrangian')
            factor = factorization_check(L.kinetic, nu0, nuT, spec.inner_axes, require_map=self.get('reverse', 'require_map', False, bool))
            result.add_report('factorization', factor)

    def handle_duality(self, result: CommandResult) -> None:
        spec = self.cost_spec()
        mu, nu = self.measure('source'), self.measure('target')
        report = duality_check(spec, mu, nu, self.axes('duality'), self.axes('duality'), self.get('duality', 'tolerance', 1e-4))
        result.add_report('duality', report)
        result.add_table('perturbations', ('index', 'objective'), list(enumerate(report.perturbed)))

    def handle_flowmap(self, result: CommandResult) -> None:
        spec = self.cost_spec()
        mu, nu = self.measure('source'), self.measure('target')
        steps = self.get('flowmap', 'steps', 1000, int)
        radius = self.get('flowmap', 'radius', self.grid()['spacing'])

        lower = ballistic_under(spec, mu, nu)
        axes = self.axes('flowmap')
        k = initial_potential(spec, mu, nu, axes, axes, lower)
        sample = map_from_concave_potential(spec, k, mu.points, axes, steps=steps)
        off = verify_support(lower.plan, sample, nu.points, radius)
        result.add_report('support', Certificate('mass off the flow graph', off, 0.0, self.get('flowmap', 'tolerance', 1e-8), inequality=True))

        lp = lp_support_map(lower.plan, mu.points, nu.points)
        result.add_values('agreement', {'max distance to LP map': float(np.abs(lp.outputs - sample.outputs).max())})

        for i, j in lower.plan.support[:self.get('flowmap', 'trajectories', 1, int)]:
            y = sample.starts[i]
            result.add_report('trajectory {0}->{1}'.format(i, j), trajectory_optimality_check(spec, y, nu.points[j], steps=steps))

        result.add_table('map', ('covector', 'start', 'end'),
                         [(tuple(v.tolist()), tuple(y.tolist()), tuple(x.tolist())) for v, y, x in zip(sample.inputs, sample.starts, sample.outputs)])

    def handle_eulerian(self, result: CommandResult) -> None:
        spec = self.cost_spec()
        mu, nuT = self.measure('source'), self.measure('target')
        nu0 = self.measure('intermediate', None)
        if nu0 is None:
            nu0 = interpolate_min(spec, mu, nuT).intermediate

        lo = self.get('eulerian', 'lo', -8.0)
        hi = self.get('eulerian', 'hi', 8.0)
        cells = self.get('eulerian', 'cells', 400, int)
        steps = self.get('eulerian', 'steps', 100, int)
        bandwidth = self.get('eulerian', 'bandwidth', 0.1)
        edges = np.linspace(lo, hi, cells + 1)

        rho, w = displacement_path(nu0, nuT, steps, edges, spec.horizon, bandwidth)
        bound = eulerian_upper_bound_check(
            spec, mu, rho, w, nuT,
            nuT_tol=self.get('eulerian', 'terminal_tolerance', 2.0 * bandwidth),
            tol=self.get('eulerian', 'tolerance', 10.0 * (rho.width + spec.horizon / steps)),
        )
        result.add_report('upper bound', bound)

        levels = self.get('eulerian', 'levels', 0, int)
        if levels:
            table = convergence_table(spec, nu0, nuT, lo, hi, max(1, cells // 2 ** (levels - 1)), max(1, steps // 2 ** (levels - 1)), levels)
            result.add_report('convergence', table)
            result.add_table('convergence', ('cell_width', 'time_step', 'action', 'error'), table.to_table())

    def handle_validate(self, result: CommandResult) -> None:
        L = self.lagrangian()
        lo = self.get('validate', 'lo', -4.0)
        hi = self.get('validate', 'hi', 4.0)
        samples = self.get('validate', 'samples', 10_000, int)
        report = validate_assumptions(L, (lo, hi), samples, self.require_seed(), self.get('validate', 'tolerance', 1e-9))
        result.add_report('assumptions', report)

    def _plan_table(self, result: CommandResult, solved: OTResult, mu: DiscreteMeasure, nu: DiscreteMeasure) -> None:
        rows: List[PlanRow] = [
            {'row': i, 'col': j, 'source': mu.points[i].tolist(), 'target': nu.points[j].tolist(), 'mass': float(solved.plan.matrix[i, j])}
            for i, j in solved.plan.support
        ]
        result.add_table('plan', ('row', 'col', 'source', 'target', 'mass'),
                         [(r['row'], r['col'], tuple(r['source']), tuple(r['target']), r['mass']) for r in rows])
