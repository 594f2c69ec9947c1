"""Quick host measurements for a desk-machine roofline record."""

from __future__ import annotations

import time

import numba
import numpy as np

from .model import RooflinePlatform


@numba.njit(nogil=True, cache=True)
def _triad(a, b, c, s):
    for i in range(a.size):
        a[i] = b[i] + s * c[i]


def stream_triad(nbytes: int = 256 * 2 ** 20, repeat: int = 5) -> float:
    """Best-of-``repeat`` triad bandwidth in byte/s; the three arrays together
    span ``nbytes`` (default 256 MiB, well beyond any last-level cache)."""
    n = max(nbytes // 24, 1024)
    a = np.zeros(n)
    b = np.ones(n)
    c = np.full(n, 2.0)
    _triad(a, b, c, 3.0)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        _triad(a, b, c, 3.0)
        best = min(best, time.perf_counter() - t)
    return 24.0 * n / best


def dgemm_flops(n: int = 1024, repeat: int = 3) -> float:
    """Best-of-``repeat`` double-precision matrix-multiply rate in FLOP/s."""
    rng = np.random.default_rng(0)
    a = rng.random((n, n))
    b = rng.random((n, n))
    a @ b
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        a @ b
        best = min(best, time.perf_counter() - t)
    return 2.0 * n ** 3 / best


def host_platform(pid: str = "host", nbytes: int = 256 * 2 ** 20) -> RooflinePlatform:
    return RooflinePlatform(pid, dgemm_flops(), {"dram": stream_triad(nbytes)},
                            {"t_peak": "empirical", "dram": "empirical"})
