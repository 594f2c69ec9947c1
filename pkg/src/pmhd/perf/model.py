"""Roofline ceilings, architectural efficiency and the harmonic-mean
performance-portability metric."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field


class PerfInputError(ValueError):
    pass


class PerfDomainError(ValueError):
    pass


class EfficiencyAboveOne(UserWarning):
    """An efficiency above 1 means the measurement or the counters disagree with the model."""


UNSUPPORTED = None


@dataclass(frozen=True)
class RooflinePlatform:
    """Peak double-precision throughput (FLOP/s) and bandwidths (byte/s) per memory space."""

    id: str
    t_peak: float
    bandwidth: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.t_peak > 0:
            raise PerfInputError(f"{self.id}: T_peak must be positive")
        for m, b in self.bandwidth.items():
            if not b > 0:
                raise PerfInputError(f"{self.id}: bandwidth for {m!r} must be positive")
        if len({m.lower() for m in self.bandwidth}) != len(self.bandwidth):
            raise PerfInputError(f"{self.id}: duplicate memory-space labels")


@dataclass(frozen=True)
class KernelIntensitySet:
    app: str
    problem: str
    intensity: dict   # memory space -> FLOP/byte

    def __post_init__(self):
        for m, v in self.intensity.items():
            if not v >= 0:
                raise PerfInputError(f"intensity for {m!r} must be non-negative")


@dataclass(frozen=True)
class MeasuredRun:
    app: str
    problem: str
    platform: str
    epsilon: float                 # achieved FLOP/s
    cell_updates: float | None = None

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise PerfInputError("achieved performance must be non-negative")


@dataclass(frozen=True)
class PortabilityInput:
    """Efficiency per platform; ``UNSUPPORTED`` (None) marks a platform the
    application cannot run on."""

    efficiencies: dict

    def __post_init__(self):
        if len(self.efficiencies) < 1:
            raise PerfInputError("the platform set must not be empty")


@dataclass(frozen=True)
class RooflineCap:
    p_max: float
    binding: str                  # memory space label, or "compute"
    per_space: dict               # space -> min(T_peak, B*I)


def space_cap(plat: RooflinePlatform, intensity: float, space: str) -> float:
    if space not in plat.bandwidth:
        raise PerfInputError(f"platform {plat.id} has no memory space {space!r}")
    return min(plat.t_peak, plat.bandwidth[space] * intensity)


def roofline_cap(plat: RooflinePlatform, ints: KernelIntensitySet) -> RooflineCap:
    """Lowest ceiling over all memory spaces for which an intensity is known."""
    if not ints.intensity:
        raise PerfInputError("no intensities given")
    per = {m: space_cap(plat, i, m) for m, i in ints.intensity.items()}
    m = min(per, key=per.__getitem__)
    p = per[m]
    binding = "compute" if p >= plat.t_peak else m
    return RooflineCap(p, binding, per)


def arch_efficiency(run: MeasuredRun, plat: RooflinePlatform, ints: KernelIntensitySet,
                    space: str) -> float:
    """Achieved throughput over the roofline cap of one memory space."""
    if space not in ints.intensity:
        raise PerfInputError(f"no intensity for memory space {space!r}")
    cap = space_cap(plat, ints.intensity[space], space)
    if not cap > 0:
        raise PerfInputError(f"zero roofline cap for {plat.id}/{space}")
    e = run.epsilon / cap
    if e > 1.0:
        warnings.warn(f"{plat.id}/{space}: efficiency {e:.4f} exceeds 1", EfficiencyAboveOne,
                      stacklevel=2)
    return e


def pp_metric(inp: PortabilityInput) -> float:
    """Harmonic mean of efficiencies, or 0 when any platform is unsupported."""
    vals = list(inp.efficiencies.values())
    if any(v is UNSUPPORTED for v in vals):
        return 0.0
    for name, v in inp.efficiencies.items():
        if not v > 0:
            raise PerfDomainError(f"efficiency on supported platform {name} must be positive, got {v}")
    if all(v == vals[0] for v in vals):
        return float(vals[0])
    return len(vals) / math.fsum(1.0 / v for v in vals)
