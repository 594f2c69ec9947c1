"""Loop policies, loop bounds and the static work decomposition they imply."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator


class Pattern(str, enum.Enum):
    """The four loop structures a kernel can be dispatched with."""

    SIMD_NESTED = "simd"   # tight k/j loops around a vectorizable i loop
    MDRANGE = "mdrange"    # (k, j) pairs distributed, serial inner i
    FLAT1D = "flat1d"      # collapsed index, explicitly decoded
    TILED_TEAM = "team"    # k-slabs per team, j per member, i as vector range

    @classmethod
    def parse(cls, text: str) -> "Pattern":
        key = text.strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "simd": cls.SIMD_NESTED, "simdfor": cls.SIMD_NESTED, "simdnested": cls.SIMD_NESTED,
            "mdrange": cls.MDRANGE,
            "flat1d": cls.FLAT1D, "1drange": cls.FLAT1D, "flat": cls.FLAT1D,
            "team": cls.TILED_TEAM, "tiledteam": cls.TILED_TEAM, "teampolicy": cls.TILED_TEAM,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown loop policy {text!r}") from None


@dataclass(frozen=True)
class LoopPolicy:
    pattern: Pattern = Pattern.SIMD_NESTED
    workers: int = 1
    team_size: int = 4
    tile_k: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("worker count must be >= 1")
        if self.team_size < 1 or self.tile_k < 1:
            raise ValueError("team size and tile extent must be >= 1")


@dataclass(frozen=True)
class LoopBounds:
    """Half-open index ranges ``[ks, ke) x [js, je) x [is_, ie)``."""

    ks: int
    ke: int
    js: int
    je: int
    is_: int
    ie: int

    def __post_init__(self):
        if self.ke < self.ks or self.je < self.js or self.ie < self.is_:
            raise ValueError(f"inverted loop bounds {self}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.ke - self.ks, self.je - self.js, self.ie - self.is_)

    @property
    def size(self) -> int:
        nk, nj, ni = self.shape
        return nk * nj * ni

    @property
    def empty(self) -> bool:
        return self.size == 0

    def as_tuple(self) -> tuple[int, int, int, int, int, int]:
        return (self.ks, self.ke, self.js, self.je, self.is_, self.ie)


def decode_flat_index(idx: int, nj: int, ni: int) -> tuple[int, int, int]:
    """Invert ``idx = k*nj*ni + j*ni + i``."""
    k = idx // (nj * ni)
    j = (idx - k * nj * ni) // ni
    i = idx - k * nj * ni - j * ni
    return k, j, i


def chunk_range(n: int, nchunk: int, c: int) -> tuple[int, int]:
    """Static contiguous split of ``range(n)`` into ``nchunk`` pieces."""
    return (n * c) // nchunk, (n * (c + 1)) // nchunk


def num_chunks(policy: LoopPolicy) -> int:
    return policy.workers


def iter_chunks(policy: LoopPolicy, bounds: LoopBounds) -> Iterator[Iterator[tuple[int, int, int]]]:
    """Yield, per worker chunk, the (k, j, i) visit order the compiled driver uses.

    This is the reference definition of each pattern's iteration space; the
    numba drivers in ``dispatch`` mirror it loop for loop.
    """
    ks, ke, js, je, is_, ie = bounds.as_tuple()
    nk, nj, ni = bounds.shape
    nchunk = num_chunks(policy)
    pattern = policy.pattern

    def simd(c):
        k0, k1 = chunk_range(nk, nchunk, c)
        for k in range(ks + k0, ks + k1):
            for j in range(js, je):
                for i in range(is_, ie):
                    yield k, j, i

    def mdrange(c):
        p0, p1 = chunk_range(nk * nj, nchunk, c)
        for p in range(p0, p1):
            k = ks + p // nj
            j = js + p % nj
            for i in range(is_, ie):
                yield k, j, i

    def flat(c):
        f0, f1 = chunk_range(nk * nj * ni, nchunk, c)
        for idx in range(f0, f1):
            k, j, i = decode_flat_index(idx, nj, ni)
            yield ks + k, js + j, is_ + i

    def team(c):
        tk = policy.tile_k
        ts = policy.team_size
        league = -(-nk // tk)
        t0, t1 = chunk_range(league, nchunk, c)
        for t in range(t0, t1):
            k0 = ks + t * tk
            k1 = min(k0 + tk, ke)
            for m in range(ts):
                for k in range(k0, k1):
                    for j in range(js + m, je, ts):
                        for i in range(is_, ie):
                            yield k, j, i

    body = {Pattern.SIMD_NESTED: simd, Pattern.MDRANGE: mdrange,
            Pattern.FLAT1D: flat, Pattern.TILED_TEAM: team}[pattern]
    for c in range(nchunk):
        yield body(c)
