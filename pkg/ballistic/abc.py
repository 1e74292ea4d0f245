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
from typing import TYPE_CHECKING, Any, Dict, List

import math

if TYPE_CHECKING:
    from .types.report import CertificateRow

__all__ = ('Report', 'Certificate')

class Report:
    """
    An ABC that implements common operations on a check report.

    Almost all the checks of this library return a subclass of this one.
    Subclasses set :attr:`passed` and list the fields rendered by
    :meth:`to_lines` in ``_fields``.
    """
    _fields: tuple = ()
    passed: bool

    def __bool__(self) -> bool:
        return bool(self.passed)

    def to_dict(self) -> Dict[str, Any]:
        """Returns the rendered fields of this report as a dictionary."""
        out = {'passed': bool(self.passed)}
        for name in self._fields:
            out[name] = getattr(self, name)
        return out

    def to_lines(self) -> List[str]:
        """Returns the report body as ``key: value`` lines, with deterministic float formatting."""
        lines = ['{0}: {1}'.format('passed', 'pass' if self.passed else 'fail')]
        for name in self._fields:
            lines.append('{0}: {1}'.format(name, _format(getattr(self, name))))
        return lines

    def __repr__(self):
        return '<{0} passed={1}>'.format(self.__class__.__name__, bool(self.passed))


class Certificate(Report):
    """Represents a two sided comparison with a declared tolerance.

    Attributes
    ----------
    name: :class:`str`
        What is being compared.
    lhs: :class:`float`
        The left hand side.
    rhs: :class:`float`
        The right hand side.
    tolerance: :class:`float`
        The largest admissible difference.
    inequality: :class:`bool`
        If ``True`` the certificate asserts ``lhs <= rhs + tolerance`` instead of an equality.
    """
    __slots__ = ('name', 'lhs', 'rhs', 'tolerance', 'inequality')
    _fields = ('name', 'lhs', 'rhs', 'difference', 'tolerance')

    def __init__(self, name: str, lhs: float, rhs: float, tolerance: float, *, inequality: bool = False):
        self.name = name
        self.lhs = float(lhs)
        self.rhs = float(rhs)
        self.tolerance = float(tolerance)
        self.inequality = inequality

    @property
    def difference(self) -> float:
        """:class:`float`: Returns ``|lhs - rhs|``."""
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        if self.inequality:
            return self.lhs <= self.rhs + self.tolerance
        return self.difference <= self.tolerance

    def to_row(self) -> CertificateRow:
        return {
            'name': self.name,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'difference': self.difference,
            'tolerance': self.tolerance,
            'passed': self.passed,
        }

    def __repr__(self):
        return '<Certificate name={0!r} lhs={1} rhs={2} passed={3}>'.format(
            self.name, self.lhs, self.rhs, self.passed)


def _format(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        if math.isfinite(value):
            return '{0:.12g}'.format(value)
        return str(value)
    if isinstance(value, (list, tuple)):
        return '[' + ', '.join(_format(v) for v in value) + ']'
    return str(value)
