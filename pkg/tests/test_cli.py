import csv

import pytest

from ballistic import ConfigError
from ballistic.cli import EXIT_FAIL, EXIT_INPUT, EXIT_NUMERICAL, EXIT_PASS, build_parser, main, write_result
from ballistic.state import CommandResult, State


def extend(config, text):
    config.write_text(config.read_text() + '\n' + text)
    return config


def run(config, command, tmp_path, *extra):
    return main([command, '--config', str(config), '--out', str(tmp_path / 'out'), *extra])


def values(result, title):
    for name, lines, _ in result.sections:
        if name == title:
            return dict(line.split(': ', 1) for line in lines)
    raise KeyError(title)


def test_parser():
    args = build_parser().parse_args(['-vv', 'interpolate', '--config', 'p.ini', '--seed', '3'])
    assert args.command == 'interpolate'
    assert args.verbose == 2
    assert args.seed == 3
    assert args.tol is None

    with pytest.raises(SystemExit):
        build_parser().parse_args(['interpolate'])
    with pytest.raises(SystemExit):
        build_parser().parse_args(['launch', '--config', 'p.ini'])


def test_transport_writes_report_and_tables(config, tmp_path):
    assert run(config, 'transport', tmp_path) == EXIT_PASS

    lines = (tmp_path / 'out' / 'transport.txt').read_text().splitlines()
    assert lines[0].startswith('# generated ')
    assert lines[1:3] == ['command: transport', 'status: pass']
    value = next(line for line in lines if line.startswith('value: '))
    assert float(value.split(': ')[1]) == pytest.approx(-1.0)

    with open(tmp_path / 'out' / 'transport_plan.csv', newline='') as fp:
        rows = list(csv.reader(fp))
    assert rows[0] == ['row', 'col', 'source', 'target', 'mass']
    assert sorted((r[2], r[3]) for r in rows[1:]) == [('-1', '2'), ('1', '0')]
    assert (tmp_path / 'out' / 'transport_potentials.csv').exists()


def test_ballistic_command(config):
    result = State.from_file(str(config)).process_command('ballistic')
    assert result.passed, result.to_lines()
    assert float(values(result, 'B_under')['value']) == pytest.approx(-1.5)
    assert float(values(result, 'B_over')['value']) == pytest.approx(0.5)


def test_interpolate_command(config):
    extend(config, '[interpolate]\nprobes = 3\nlevels = 2\nintervals = 4\nlo = -4\nhi = 4\n')
    result = State.from_file(str(config)).process_command('interpolate')
    assert result.passed, result.to_lines()
    points = sorted(row[0] for row in result.tables['intermediate'][1])
    assert points == [pytest.approx((-1.0,)), pytest.approx((3.0,))]
    assert len(result.tables['refinement'][1]) == 2


def test_reverse_command_with_factorization(config):
    extend(config, '[reverse]\nprobes = 4\nfactorization = yes\n')
    result = State.from_file(str(config)).process_command('reverse')
    assert result.passed, result.to_lines()
    assert [title for title, _, _ in result.sections] == ['reverse', 'factorization']
    assert [row[0] for row in result.tables['momenta'][1]] == [(1.0,)]


def test_flowmap_command(config):
    result = State.from_file(str(config)).process_command('flowmap')
    assert result.passed, result.to_lines()
    ends = sorted(row[2] for row in result.tables['map'][1])
    assert ends == [pytest.approx((0.0,)), pytest.approx((2.0,))]


def test_eulerian_command(config):
    extend(config, '[eulerian]\nlo = -3\nhi = 5\ncells = 400\nsteps = 100\n')
    result = State.from_file(str(config)).process_command('eulerian')
    assert result.passed, result.to_lines()


def test_validate_failure_exits_with_one(config, tmp_path):
    extend(config, '[validate]\nsamples = 2000\n')
    assert run(config, 'validate', tmp_path) == EXIT_PASS

    text = config.read_text().replace('mass = 1.0\n', 'mass = 1.0\ntheta = quadratic\ntheta_scale = 2.0\n')
    config.write_text(text)
    assert run(config, 'validate', tmp_path) == EXIT_FAIL
    assert 'status: fail' in (tmp_path / 'out' / 'validate.txt').read_text()


def test_validate_needs_a_seed(config, tmp_path):
    config.write_text(config.read_text().replace('seed = 7\n', ''))
    assert run(config, 'validate', tmp_path) == EXIT_INPUT
    assert run(config, 'validate', tmp_path, '--seed', '5') in (EXIT_PASS, EXIT_FAIL)


def test_input_errors_exit_with_two(config, tmp_path):
    assert run(tmp_path / 'missing.ini', 'transport', tmp_path) == EXIT_INPUT

    (tmp_path / 'nuT.txt').unlink()
    assert run(config, 'transport', tmp_path) == EXIT_INPUT
    with pytest.raises(ConfigError):
        State.from_file(str(config)).measure('target')


def test_numerical_failures_exit_with_three(config, tmp_path):
    # at horizon zero nothing can move, so no atom of mu0 reaches nuT
    config.write_text(config.read_text().replace('horizon = 1.0', 'horizon = 0.0'))
    extend(config, '[transport]\ncost = fixed_end\n')
    assert run(config, 'transport', tmp_path) == EXIT_NUMERICAL


def test_configuration_errors(config):
    state = State.from_file(str(config))
    with pytest.raises(ConfigError):
        state.process_command('launch')
    with pytest.raises(ConfigError):
        state.get('problem', 'missing')
    assert state.get('problem', 'missing', 4.0) == 4.0

    extend(config, '[transport]\ndirection = sideways\n')
    with pytest.raises(ConfigError):
        State.from_file(str(config)).process_command('transport')

    config.write_text(config.read_text().replace('variant = quadratic', 'variant = relativistic'))
    with pytest.raises(ConfigError):
        State.from_file(str(config)).lagrangian()


def test_write_result(tmp_path):
    result = CommandResult('demo')
    result.add_values('values', {'x': 0.5, 'label': 'ok'})
    result.add_table('points', ('point', 'weight'), [((1.0, 2.0), 0.25)])
    paths = write_result(result, str(tmp_path), stamp='2026-01-01T00:00:00+00:00')
    assert [p.rsplit('/', 1)[-1] for p in paths] == ['demo.txt', 'demo_points.csv']

    text = (tmp_path / 'demo.txt').read_text().splitlines()
    assert text == ['# generated 2026-01-01T00:00:00+00:00', 'command: demo', 'status: pass', '', '[values]', 'x: 0.5', 'label: ok']
    with open(tmp_path / 'demo_points.csv', newline='') as fp:
        assert list(csv.reader(fp)) == [['point', 'weight'], ['1 2', '0.25']]


def test_reverse_with_a_massless_atom(config, tmp_path):
    (tmp_path / 'mu0.txt').write_text('0 0.5\n0.5 0\n1 0.5\n')
    (tmp_path / 'nuT.txt').write_text('1 0.5\n1.5 0\n2 0.5\n')
    extend(config, '[reverse]\nprobes = 3\n')
    assert run(config, 'reverse', tmp_path) == EXIT_PASS
    with open(tmp_path / 'out' / 'reverse_momenta.csv', newline='') as fp:
        assert list(csv.reader(fp))[1:] == [['1', '1']]


@pytest.mark.parametrize(('error', 'code'), [(ValueError, EXIT_INPUT), (FloatingPointError, EXIT_NUMERICAL), (RuntimeError, EXIT_NUMERICAL)])
def test_stray_errors_map_to_exit_codes(config, tmp_path, monkeypatch, error, code):
    def handler(self, result):
        raise error('boom')

    monkeypatch.setattr(State, 'handle_transport', handler)
    assert run(config, 'transport', tmp_path) == code
