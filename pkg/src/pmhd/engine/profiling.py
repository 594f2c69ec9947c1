"""Named timing regions and the per-region profile report."""

from __future__ import annotations

import csv
import io
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, TypeVar

from .counting import Tally

T = TypeVar("T")


@dataclass
class KernelProfile:
    name: str
    calls: int = 0
    time_s: float = 0.0
    tally: Tally | None = None  # only set by counting runs

    @property
    def flops(self) -> int | None:
        return None if self.tally is None else self.tally.flops

    @property
    def bytes(self) -> int | None:
        return None if self.tally is None else self.tally.bytes

    @property
    def intensity(self) -> float | None:
        if self.tally is None:
            return None
        return self.tally.flops / self.tally.bytes if self.tally.bytes else 0.0


@dataclass
class Profiler:
    regions: dict[str, KernelProfile] = field(default_factory=dict)
    _stack: list[str] = field(default_factory=list)

    def get(self, name: str) -> KernelProfile:
        prof = self.regions.get(name)
        if prof is None:
            prof = self.regions[name] = KernelProfile(name)
        return prof

    @contextmanager
    def region(self, name: str):
        prof = self.get(name)
        self._stack.append(name)
        t0 = time.perf_counter()
        try:
            yield prof
        finally:
            prof.time_s += time.perf_counter() - t0
            prof.calls += 1
            self._stack.pop()

    @property
    def current(self) -> str | None:
        return self._stack[-1] if self._stack else None

    def charge(self, tally: Tally) -> None:
        """Attribute a counting tally to every open region."""
        for name in set(self._stack):
            prof = self.get(name)
            if prof.tally is None:
                prof.tally = Tally()
            prof.tally.add(tally)

    def reset(self) -> None:
        self.regions.clear()

    def total_time(self, names=None) -> float:
        names = self.regions if names is None else names
        return sum(self.regions[n].time_s for n in names if n in self.regions)

    def normalized_times(self, reference_prefix: str = "riemann") -> dict[str, float]:
        """Region times divided by the fastest region whose name starts with
        ``reference_prefix`` (NaN when there is no such region)."""
        refs = [p.time_s for n, p in self.regions.items() if n.startswith(reference_prefix)]
        ref = min(refs) if refs else 0.0
        return {n: (p.time_s / ref if ref > 0 else float("nan")) for n, p in self.regions.items()}

    def to_csv(self, path=None) -> str:
        norm = self.normalized_times()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["region", "calls", "time_s", "time_normalized", "flops", "bytes", "intensity"])
        for name, p in self.regions.items():
            w.writerow([
                name, p.calls, repr(p.time_s), repr(norm[name]),
                "" if p.flops is None else p.flops,
                "" if p.bytes is None else p.bytes,
                "" if p.intensity is None else repr(p.intensity),
            ])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


_active = Profiler()


def active_profiler() -> Profiler:
    return _active


def set_profiler(prof: Profiler) -> Profiler:
    global _active
    old, _active = _active, prof
    return old


def region(name: str):
    return _active.region(name)


def with_region(name: str, thunk: Callable[[], T]) -> T:
    with _active.region(name):
        return thunk()
