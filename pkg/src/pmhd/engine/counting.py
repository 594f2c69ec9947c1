"""Operation counting by operator overloading.

Kernels are written against plain scalars so numba can compile them.  For a
counting run the same Python source is re-bound to globals in which every
compiled helper is replaced by its counting twin, array arguments are wrapped
in :class:`CountingArray` and scalar arguments in :class:`CountingScalar`.
"""

from __future__ import annotations

import math
import types
from dataclasses import dataclass

import numpy as np

try:
    from numba.core.registry import CPUDispatcher as _Dispatcher
except ImportError:  # pragma: no cover
    from numba.core.dispatcher import Dispatcher as _Dispatcher


@dataclass
class Tally:
    flops: int = 0
    # every element access (register/L1 traffic)
    loads: int = 0
    stores: int = 0
    # distinct elements touched (streaming DRAM model)
    distinct_read: int = 0
    distinct_written: int = 0

    @property
    def bytes_read(self) -> int:
        return 8 * self.distinct_read

    @property
    def bytes_written(self) -> int:
        return 8 * self.distinct_written

    @property
    def bytes(self) -> int:
        return self.bytes_read + self.bytes_written

    @property
    def l1_bytes(self) -> int:
        return 8 * (self.loads + self.stores)

    def add(self, other: "Tally") -> None:
        self.flops += other.flops
        self.loads += other.loads
        self.stores += other.stores
        self.distinct_read += other.distinct_read
        self.distinct_written += other.distinct_written


def _val(x):
    return x.value if isinstance(x, CountingScalar) else x


class CountingScalar:
    """A float that charges every +, -, *, / and sqrt to a shared tally.

    Values are computed with ordinary Python floats, so results are
    identical to the uncounted path. Negation, abs, min/max and comparisons
    are free.
    """

    __slots__ = ("value", "tally")
    __array_ufunc__ = None

    def __init__(self, value, tally: Tally):
        self.value = float(value)
        self.tally = tally

    def _op(self, result):
        self.tally.flops += 1
        return CountingScalar(result, self.tally)

    def __add__(self, o):
        return self._op(self.value + _val(o))

    def __radd__(self, o):
        return self._op(_val(o) + self.value)

    def __sub__(self, o):
        return self._op(self.value - _val(o))

    def __rsub__(self, o):
        return self._op(_val(o) - self.value)

    def __mul__(self, o):
        return self._op(self.value * _val(o))

    def __rmul__(self, o):
        return self._op(_val(o) * self.value)

    def __truediv__(self, o):
        return self._op(self.value / _val(o))

    def __rtruediv__(self, o):
        return self._op(_val(o) / self.value)

    def __neg__(self):
        return CountingScalar(-self.value, self.tally)

    def __pos__(self):
        return self

    def __abs__(self):
        return CountingScalar(abs(self.value), self.tally)

    def __lt__(self, o):
        return self.value < _val(o)

    def __le__(self, o):
        return self.value <= _val(o)

    def __gt__(self, o):
        return self.value > _val(o)

    def __ge__(self, o):
        return self.value >= _val(o)

    def __eq__(self, o):
        return self.value == _val(o)

    def __ne__(self, o):
        return self.value != _val(o)

    __hash__ = None

    def __float__(self):
        return self.value

    def __bool__(self):
        return self.value != 0.0

    def sqrt(self):
        return self._op(math.sqrt(self.value))

    def __repr__(self):
        return f"CountingScalar({self.value!r})"


def counting_sqrt(x):
    if isinstance(x, CountingScalar):
        return x.sqrt()
    return math.sqrt(x)


class CountingArray:
    """Array proxy recording loads/stores and the set of distinct elements touched."""

    __slots__ = ("data", "tally", "_read", "_written")

    def __init__(self, data: np.ndarray, tally: Tally):
        self.data = data
        self.tally = tally
        self._read = np.zeros(data.shape, dtype=bool)
        self._written = np.zeros(data.shape, dtype=bool)

    @property
    def shape(self):
        return self.data.shape

    def __getitem__(self, idx):
        self.tally.loads += 1
        if not self._read[idx]:
            self._read[idx] = True
            self.tally.distinct_read += 1
        v = self.data[idx]
        if self.data.dtype.kind == "f":
            return CountingScalar(v, self.tally)
        return v.item()

    def __setitem__(self, idx, value):
        self.tally.stores += 1
        if not self._written[idx]:
            self._written[idx] = True
            self.tally.distinct_written += 1
        self.data[idx] = _val(value)


def wrap_args(args: tuple, tally: Tally) -> tuple:
    out = []
    for a in args:
        if isinstance(a, np.ndarray):
            out.append(CountingArray(a, tally))
        elif isinstance(a, float):
            out.append(CountingScalar(a, tally))
        elif isinstance(a, tuple):
            out.append(wrap_args(a, tally))
        else:
            out.append(a)
    return tuple(out)


_counting_twins: dict[int, types.FunctionType] = {}


def counting_twin(fn):
    """Return a pure-Python copy of a compiled kernel/helper whose callees are
    counting twins as well."""
    key = id(fn)
    if key in _counting_twins:
        return _counting_twins[key]
    py = fn.py_func if isinstance(fn, _Dispatcher) else fn
    g = dict(py.__globals__)
    twin = types.FunctionType(py.__code__, g, py.__name__, py.__defaults__, py.__closure__)
    _counting_twins[key] = twin
    for name, value in list(g.items()):
        if isinstance(value, _Dispatcher):
            g[name] = counting_twin(value)
        elif value is math.sqrt:
            g[name] = counting_sqrt
    return twin


def is_dispatcher(fn) -> bool:
    return isinstance(fn, _Dispatcher)
