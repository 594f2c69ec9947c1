"""Kernel dispatch: ``par_for`` / ``par_reduce`` over the four loop patterns.

A kernel body has the signature ``body(k, j, i, args) -> None`` (or a float
for reductions) and must only write locations that are a function of its own
``(k, j, i)``.  Each (pattern, body) pair gets its own compiled driver; the
drivers split the iteration space into ``policy.workers`` static contiguous
chunks and run the chunks under ``prange``.
"""

from __future__ import annotations

import math
import warnings
from contextlib import contextmanager

import numba
import numpy as np
from numba import njit, prange

from .counting import Tally, _val, counting_twin, wrap_args
from .policy import LoopBounds, LoopPolicy, Pattern, iter_chunks
from .profiling import active_profiler

_JIT_OPTS = dict(nogil=True, error_model="numpy")

_kernels: dict[int, object] = {}


class UnsupportedKernelError(TypeError):
    pass


def device(fn):
    """Compile a helper callable from kernels (the inline-function analog)."""
    return njit(**_JIT_OPTS)(fn)


def kernel(fn):
    """Compile and register a cell kernel ``body(k, j, i, args)``."""
    d = njit(**_JIT_OPTS)(fn)
    _kernels[id(d)] = d
    return d


def is_kernel(fn) -> bool:
    return id(fn) in _kernels and _kernels[id(fn)] is fn


@device
def sum_op(a, b):
    return a + b


@device
def min_op(a, b):
    return a if a <= b else b


@device
def max_op(a, b):
    return a if a >= b else b


# -- compiled drivers -------------------------------------------------------

def _for_driver(pattern: Pattern, body):
    if pattern is Pattern.SIMD_NESTED:
        @njit(parallel=True, nogil=True)
        def drive(ks, ke, js, je, is_, ie, nchunk, ts, tk, args):
            nk = ke - ks
            for c in prange(nchunk):
                k0 = ks + (nk * c) // nchunk
                k1 = ks + (nk * (c + 1)) // nchunk
                for k in range(k0, k1):
                    for j in range(js, je):
                        for i in range(is_, ie):
                            body(k, j, i, args)
    elif pattern is Pattern.MDRANGE:
        @njit(parallel=True, nogil=True)
        def drive(ks, ke, js, je, is_, ie, nchunk, ts, tk, args):
            nj = je - js
            n = (ke - ks) * nj
            for c in prange(nchunk):
                for p in range((n * c) // nchunk, (n * (c + 1)) // nchunk):
                    k = ks + p // nj
                    j = js + p % nj
                    for i in range(is_, ie):
                        body(k, j, i, args)
    elif pattern is Pattern.FLAT1D:
        @njit(parallel=True, nogil=True)
        def drive(ks, ke, js, je, is_, ie, nchunk, ts, tk, args):
            nj = je - js
            ni = ie - is_
            n = (ke - ks) * nj * ni
            for c in prange(nchunk):
                for idx in range((n * c) // nchunk, (n * (c + 1)) // nchunk):
                    k = idx // (nj * ni)
                    j = (idx - k * nj * ni) // ni
                    i = idx - k * nj * ni - j * ni
                    body(ks + k, js + j, is_ + i, args)
    else:
        @njit(parallel=True, nogil=True)
        def drive(ks, ke, js, je, is_, ie, nchunk, ts, tk, args):
            league = (ke - ks + tk - 1) // tk
            for c in prange(nchunk):
                for t in range((league * c) // nchunk, (league * (c + 1)) // nchunk):
                    k0 = ks + t * tk
                    k1 = min(k0 + tk, ke)
                    for m in range(ts):
                        for k in range(k0, k1):
                            for j in range(js + m, je, ts):
                                for i in range(is_, ie):
                                    body(k, j, i, args)
    return drive


def neumaier(acc, comp, v):
    """One step of compensated summation; ``comp`` collects the lost low bits."""
    t = acc + v
    if abs(acc) >= abs(v):
        comp += (acc - t) + v
    else:
        comp += (v - t) + acc
    return t, comp


_neumaier = njit(**_JIT_OPTS)(neumaier)


def _folder(combine):
    if combine is sum_op:
        return _neumaier

    @njit(**_JIT_OPTS)
    def fold(acc, comp, v):
        return combine(acc, v), comp
    return fold


def _reduce_driver(pattern: Pattern, body, combine):
    fold = _folder(combine)
    if pattern is Pattern.SIMD_NESTED:
        @njit(parallel=True, nogil=True)
        def drive(ks, ke, js, je, is_, ie, nchunk, ts, tk, identity, args):
            partial = np.zeros((nchunk, 2))
            nk = ke - ks
            for c in prange(nchunk):
                acc, comp = identity, 0.0
                for k in range(ks + (nk * c) // nchunk, ks + (nk * (c + 1)) // nchunk):
                    for j in range(js, je):
                        for i in range(is_, ie):
                            acc, comp = fold(acc, comp, body(k, j, i, args))
                partial[c, 0] = acc
                partial[c, 1] = comp
            return partial
    elif pattern is Pattern.MDRANGE:
        @njit(parallel=True, nogil=True)
        def drive(ks, ke, js, je, is_, ie, nchunk, ts, tk, identity, args):
            partial = np.zeros((nchunk, 2))
            nj = je - js
            n = (ke - ks) * nj
            for c in prange(nchunk):
                acc, comp = identity, 0.0
                for p in range((n * c) // nchunk, (n * (c + 1)) // nchunk):
                    k = ks + p // nj
                    j = js + p % nj
                    for i in range(is_, ie):
                        acc, comp = fold(acc, comp, body(k, j, i, args))
                partial[c, 0] = acc
                partial[c, 1] = comp
            return partial
    elif pattern is Pattern.FLAT1D:
        @njit(parallel=True, nogil=True)
        def drive(ks, ke, js, je, is_, ie, nchunk, ts, tk, identity, args):
            partial = np.zeros((nchunk, 2))
            nj = je - js
            ni = ie - is_
            n = (ke - ks) * nj * ni
            for c in prange(nchunk):
                acc, comp = identity, 0.0
                for idx in range((n * c) // nchunk, (n * (c + 1)) // nchunk):
                    k = idx // (nj * ni)
                    j = (idx - k * nj * ni) // ni
                    i = idx - k * nj * ni - j * ni
                    acc, comp = fold(acc, comp, body(ks + k, js + j, is_ + i, args))
                partial[c, 0] = acc
                partial[c, 1] = comp
            return partial
    else:
        @njit(parallel=True, nogil=True)
        def drive(ks, ke, js, je, is_, ie, nchunk, ts, tk, identity, args):
            partial = np.zeros((nchunk, 2))
            league = (ke - ks + tk - 1) // tk
            for c in prange(nchunk):
                acc, comp = identity, 0.0
                for t in range((league * c) // nchunk, (league * (c + 1)) // nchunk):
                    k0 = ks + t * tk
                    k1 = min(k0 + tk, ke)
                    for m in range(ts):
                        for k in range(k0, k1):
                            for j in range(js + m, je, ts):
                                for i in range(is_, ie):
                                    acc, comp = fold(acc, comp, body(k, j, i, args))
                partial[c, 0] = acc
                partial[c, 1] = comp
            return partial
    return drive


def _finish(partial, combine) -> float:
    """Sums: correctly rounded total of the compensated chunk partials.
    Other operators: fixed pairwise tree over the chunk values."""
    if combine is sum_op:
        return math.fsum(list(partial[:, 0]) + list(partial[:, 1]))
    return float(tree_combine(list(partial[:, 0]), combine))


_for_cache: dict = {}
_reduce_cache: dict = {}
_warned_workers: set[int] = set()

# counting mode state
_counting: list[Tally] = []
kernel_tallies: dict[str, Tally] = {}


def _set_threads(workers: int) -> None:
    limit = numba.config.NUMBA_NUM_THREADS
    if workers > limit and workers not in _warned_workers:
        _warned_workers.add(workers)
        warnings.warn(
            f"{workers} workers requested but only {limit} hardware threads are available; "
            "chunks will be time-shared", RuntimeWarning, stacklevel=3)
    numba.set_num_threads(min(workers, limit))


def tree_combine(partials, combine):
    """Fixed-shape pairwise combination of per-chunk partials."""
    vals = list(partials)
    while len(vals) > 1:
        nxt = [combine(vals[n], vals[n + 1]) for n in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _name(body) -> str:
    return getattr(body, "__name__", None) or getattr(body, "py_func").__name__


def _counted_for(policy, bounds, body, args) -> Tally:
    tally = Tally()
    twin = counting_twin(body)
    cargs = wrap_args(args, tally)
    for chunk in iter_chunks(policy, bounds):
        for k, j, i in chunk:
            twin(k, j, i, cargs)
    return tally


def _record(body, tally: Tally) -> None:
    for t in _counting:
        t.add(tally)
    kernel_tallies.setdefault(_name(body), Tally()).add(tally)
    active_profiler().charge(tally)


def par_for(policy: LoopPolicy, bounds: LoopBounds, body, args: tuple) -> None:
    """Invoke ``body(k, j, i, args)`` exactly once for every index in ``bounds``."""
    if bounds.empty:
        return
    if _counting:
        if not is_kernel(body):
            raise UnsupportedKernelError(f"{body!r} is not a registered kernel")
        _record(body, _counted_for(policy, bounds, body, args))
        return
    key = (policy.pattern, id(body))
    drive = _for_cache.get(key)
    if drive is None:
        drive = _for_cache[key] = _for_driver(policy.pattern, body)
    _set_threads(policy.workers)
    drive(*bounds.as_tuple(), policy.workers, policy.team_size, policy.tile_k, args)


def par_reduce(policy: LoopPolicy, bounds: LoopBounds, body, args: tuple,
               combine=sum_op, identity: float = 0.0) -> float:
    """Deterministic reduction: serial fold per chunk, then a fixed pairwise tree.

    Sums use compensated accumulation per chunk and an exact final combine,
    so the result does not depend on how the pattern groups the terms."""
    if bounds.empty:
        return float(identity)
    if _counting:
        if not is_kernel(body):
            raise UnsupportedKernelError(f"{body!r} is not a registered kernel")
        tally = Tally()
        twin = counting_twin(body)
        comb = counting_twin(combine)
        cargs = wrap_args(args, tally)
        partials = []
        for chunk in iter_chunks(policy, bounds):
            counted = acc = float(identity)
            comp = 0.0
            for k, j, i in chunk:
                v = twin(k, j, i, cargs)
                counted = comb(counted, v)    # charges the combine operation
                if combine is sum_op:
                    acc, comp = neumaier(acc, comp, _val(v))
                else:
                    acc = _val(counted)
            partials.append((acc, comp))
        _record(body, tally)
        return _finish(np.array(partials), combine)
    key = (policy.pattern, id(body), id(combine))
    drive = _reduce_cache.get(key)
    if drive is None:
        drive = _reduce_cache[key] = _reduce_driver(policy.pattern, body, combine)
    _set_threads(policy.workers)
    partial = drive(*bounds.as_tuple(), policy.workers, policy.team_size, policy.tile_k,
                    float(identity), args)
    return _finish(partial, combine)


@contextmanager
def counting():
    """Run every ``par_for``/``par_reduce`` inside the block through the
    counting twins; yields the aggregate tally."""
    tally = Tally()
    _counting.append(tally)
    try:
        yield tally
    finally:
        _counting.remove(tally)



class KernelCount:
    """Tallies of one counting evaluation of a kernel over a bounds box."""

    def __init__(self, tally: Tally):
        self.tally = tally
        self.flops = tally.flops
        self.bytes = tally.bytes
        self.intensity_defined = tally.bytes > 0
        self.intensity = tally.flops / tally.bytes if tally.bytes else 0.0

    def __repr__(self):
        return (f"KernelCount(flops={self.flops}, bytes={self.bytes}, "
                f"intensity={self.intensity!r}, defined={self.intensity_defined})")


def count_kernel_ops(body, bounds: LoopBounds, args: tuple,
                     policy: LoopPolicy = LoopPolicy()) -> KernelCount:
    """Count FLOPs and streamed bytes of one ``par_for`` of ``body``.

    Bytes follow the streaming model: 8 bytes per distinct array element read
    plus 8 per distinct element written.
    """
    if not is_kernel(body):
        raise UnsupportedKernelError(f"{body!r} is not a registered kernel")
    if bounds.empty:
        return KernelCount(Tally())
    return KernelCount(_counted_for(policy, bounds, body, args))
