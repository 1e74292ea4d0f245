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
from typing import Any, Callable, Optional, Set

__all__ = ('AssumptionFlags',)

class BaseFlags:
    VALID_FLAGS: Set[str]

    def __init__(self, value: Optional[int] = None, **flags: Any):
        invalid = set(flags.keys()) - set(self.VALID_FLAGS)
        if invalid:
            raise TypeError('Invalid keyword arguments {0} for {1}()'.format(invalid, self.__class__.__name__))

        if value:
            self._value = value
        else:
            self._value: int = sum([getattr(self.__class__, name) for name in flags if flags[name] is True])

    @property
    def value(self) -> int:
        return self._value

    @value.setter
    def value(self, new: int) -> None:
        if not isinstance(new, int):
            raise TypeError('new value must be an int.')

        self._value = new

    @classmethod
    def from_value(cls, value: int):
        # bypass __init__ and set the raw value directly
        flags = cls.__new__(cls)
        flags._value = value
        return flags

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, self.__class__) and self._value == other._value

    def __iter__(self):
        for name in sorted(self.VALID_FLAGS):
            yield name, getattr(self, name)

    def __repr__(self):
        return '<{0} value={1}>'.format(self.__class__.__name__, self._value)


class flag:
    def __init__(self, func: Callable[[Any], int]):
        self.func = func
        self.flag_val = func(None)
        self.__doc__ = func.__doc__

    def __get__(self, instance: Optional[BaseFlags], *_: Any):
        if not instance:
            return self.flag_val

        return (self.flag_val & instance.value) == self.flag_val

    def __set__(self, instance: Optional[BaseFlags], val: bool):
        if not instance:
            return

        exists = (self.flag_val & instance.value) == self.flag_val

        if val is False and exists:
            instance._value -= self.flag_val
        elif val is True and not exists:
            instance._value += self.flag_val

    def __repr__(self):
        return f'<flag value={self.flag_val}>'

class AssumptionFlags(BaseFlags):
    """Represents which of the standing hypotheses on a Lagrangian passed sampling.

    - :attr:`a1`: joint convexity, properness and lower semi-continuity.
    - :attr:`a2`: the effective domain of ``L(x, .)`` stays within ``rho(1 + |x|)`` of the origin.
    - :attr:`a3`: the coercive lower bound through ``theta``, ``alpha`` and ``beta``.
    - :attr:`superlinear`: the supplied ``theta`` looks superlinear on its sampled range.

    Attributes
    ----------
    value: :class:`int`
        The raw integer value of the flags.
    """
    VALID_FLAGS = {
        'a1',
        'a2',
        'a3',
        'superlinear',
    }

    def __init__(self, **checks: bool):
        super().__init__(**checks)

    @property
    def all_passed(self) -> bool:
        """:class:`bool`: Returns ``True`` if (A1), (A2) and (A3) all passed."""
        return self.a1 and self.a2 and self.a3

    @flag
    def a1(self) -> int:
        """:class:`bool`: Returns ``True`` if the midpoint convexity samples passed."""
        return 1 << 0

    @flag
    def a2(self) -> int:
        """:class:`bool`: Returns ``True`` if the effective domain bound held at every sample."""
        return 1 << 1

    @flag
    def a3(self) -> int:
        """:class:`bool`: Returns ``True`` if the coercive lower bound held at every sample."""
        return 1 << 2

    @flag
    def superlinear(self) -> int:
        """:class:`bool`: Returns ``True`` if ``theta`` grows faster than linearly on its grid.

        This is a heuristic flag, not a proof.
        """
        return 1 << 3
