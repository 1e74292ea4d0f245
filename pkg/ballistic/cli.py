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
from typing import List, Optional, Sequence

import argparse
import csv
import datetime
import logging
import os
import sys

from .errors import InputError, NumericalError
from .state import COMMANDS, CommandResult, State

__all__ = (
    'EXIT_PASS',
    'EXIT_FAIL',
    'EXIT_INPUT',
    'EXIT_NUMERICAL',
    'build_parser',
    'write_result',
    'main',
)

_log = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='ballistic', description='Ballistic optimal transport on discrete measures.')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='log more (repeat for debug output)')
    sub = parser.add_subparsers(dest='command', required=True, metavar='command')
    for name in COMMANDS:
        cmd = sub.add_parser(name, help='run the {0} check'.format(name))
        cmd.add_argument('--config', required=True, help='path of the INI problem file')
        cmd.add_argument('--out', default=os.path.join('.', 'out'), help='directory for reports (default ./out)')
        cmd.add_argument('--seed', type=int, default=None, help='overrides [problem] seed')
        cmd.add_argument('--tol', type=float, default=None, help='overrides [problem] tolerance')
    return parser

def write_result(result: CommandResult, out: str, stamp: Optional[str] = None) -> List[str]:
    """Writes ``<command>.txt`` and one ``<command>_<table>.csv`` per table into ``out``.

    The first line of the report holds the timestamp; everything after it
    depends only on the configuration and the seed.

    Returns
    -------
    List[:class:`str`]
        The paths written.
    """
    os.makedirs(out, exist_ok=True)
    if stamp is None:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec='seconds')

    paths = []
    report = os.path.join(out, '{0}.txt'.format(result.name))
    with open(report, 'w', encoding='utf-8') as fp:
        fp.write('# generated {0}\n'.format(stamp))
        for line in result.to_lines():
            fp.write(line + '\n')
    paths.append(report)

    for name, (header, rows) in result.tables.items():
        path = os.path.join(out, '{0}_{1}.csv'.format(result.name, name))
        with open(path, 'w', encoding='utf-8', newline='') as fp:
            writer = csv.writer(fp)
            writer.writerow(header)
            for row in rows:
                writer.writerow([' '.join('{0:.12g}'.format(c) for c in cell) if isinstance(cell, tuple) else
                                 ('{0:.12g}'.format(cell) if isinstance(cell, float) else cell) for cell in row])
        paths.append(path)
    return paths

def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')

    try:
        state = State.from_file(args.config, seed=args.seed, tol=args.tol)
        result = state.process_command(args.command)
    except InputError as exc:
        print('error: {0}'.format(exc), file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print('numerical failure: {0}'.format(exc), file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, TypeError) as exc:
        _log.debug('Rejected input', exc_info=exc)
        print('error: {0}'.format(exc), file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:
        _log.debug('Unexpected failure', exc_info=exc)
        print('numerical failure: {0}: {1}'.format(type(exc).__name__, exc), file=sys.stderr)
        return EXIT_NUMERICAL

    for path in write_result(result, args.out):
        _log.info('Wrote %s', path)
    return EXIT_PASS if result.passed else EXIT_FAIL
