"""``key = value`` run configuration with ``#`` comments."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .engine import LoopPolicy, Pattern
from .mesh import MeshConfig
from .mhd.eos import PrimState
from .mhd.integrator import SolverOptions
from .mhd.linear_wave import WaveSetup


class ConfigParseError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _ints(text):
    vals = tuple(int(x) for x in text.replace(",", " ").split())
    if not vals:
        raise ValueError("empty list")
    return vals


@dataclass(frozen=True)
class RunConfig:
    # mesh
    nx1: int = 16
    nx2: int = 16
    nx3: int = 16
    mb1: int = 0          # 0 means a single block along that axis
    mb2: int = 0
    mb3: int = 0
    ng: int = 2
    x1len: float = 1.0
    x2len: float = 1.0
    x3len: float = 1.0
    gamma: float = 5.0 / 3.0
    cfl: float = 0.3
    # solver
    riemann: str = "roe"
    emf: str = "upwind"
    # wave (background in the wave frame)
    amplitude: float = 1e-6
    wave_n1: int = 1
    wave_n2: int = 0
    wave_n3: int = 0
    rho: float = 1.0
    v1: float = 0.0
    v2: float = 0.0
    v3: float = 0.0
    pressure: float = 0.6
    b1: float = 1.0
    b2: float = 2.0 ** 0.5
    b3: float = 0.5
    # execution
    policy: str = "simd"
    workers: int = 1
    team_size: int = 4
    tile_k: int = 1
    # run control
    cycle_limit: int = -1     # negative: no limit
    tlim: float = -1.0        # negative: one wave period
    out: str = "."
    # bench / scale / roofline
    conv_sizes: tuple = (16, 32)
    bench_sizes: tuple = (8, 16, 32, 64, 128)
    bench_cycles: int = 5
    warmup: int = 2
    scale_mode: str = "weak"
    scale_workers: tuple = (1, 2, 4)
    scale_cells: int = 16
    platform_file: str = ""
    platform_id: str = "host"

    def __post_init__(self):
        Pattern.parse(self.policy)
        SolverOptions(self.riemann, self.emf)
        if self.workers < 1 or min(self.scale_workers) < 1:
            raise ConfigParseError("worker counts must be at least 1")
        if self.scale_mode not in ("weak", "strong"):
            raise ConfigParseError(f"scale_mode must be weak or strong, got {self.scale_mode!r}")
        if len(self.conv_sizes) < 2 or min(self.conv_sizes) < 1:
            raise ConfigParseError("conv_sizes needs at least two positive resolutions")
        if self.bench_cycles < 1 or self.warmup < 0:
            raise ConfigParseError("bench_cycles must be >= 1 and warmup >= 0")

    def mesh_config(self) -> MeshConfig:
        nx = (self.nx1, self.nx2, self.nx3)
        mb = tuple(m if m > 0 else n for m, n in zip((self.mb1, self.mb2, self.mb3), nx))
        return MeshConfig(nx=nx, mb=mb, ng=self.ng, length=(self.x1len, self.x2len, self.x3len),
                          gamma=self.gamma, cfl=self.cfl)

    def loop_policy(self, workers: int | None = None) -> LoopPolicy:
        return LoopPolicy(Pattern.parse(self.policy), workers or self.workers,
                          self.team_size, self.tile_k)

    def wave_setup(self) -> WaveSetup:
        bg = PrimState(self.rho, self.v1, self.v2, self.v3, self.pressure, self.b1, self.b2, self.b3)
        return WaveSetup(bg, (self.wave_n1, self.wave_n2, self.wave_n3), self.amplitude)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(self.riemann, self.emf)


_FIELDS = {f.name: f for f in fields(RunConfig)}
_CONVERT = {int: int, float: float, str: str, tuple: _ints, "int": int, "float": float,
            "str": str, "tuple": _ints}


def _convert(name: str, text: str):
    kind = _FIELDS[name].type
    conv = _CONVERT[kind]
    if name == "policy":
        Pattern.parse(text)
    return conv(text)


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Typed config; later keys override earlier ones, omitted keys keep defaults."""
    values = {}
    where = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key:
            raise ConfigParseError(f"expected 'key = value', got {raw.strip()!r}", n)
        if key not in _FIELDS:
            raise ConfigParseError(f"unknown key {key!r}", n)
        try:
            values[key] = _convert(key, val)
            where[key] = n
        except ValueError as exc:
            raise ConfigParseError(f"bad value for {key}: {val!r} ({exc})", n) from None
    base = base or default_config()
    try:
        return replace(base, **values)
    except ValueError as exc:
        # report the first line whose value makes the config invalid
        partial = {}
        for key in sorted(values, key=where.__getitem__):
            partial[key] = values[key]
            try:
                replace(base, **partial)
            except ValueError:
                raise ConfigParseError(str(exc), where[key]) from None
        raise ConfigParseError(str(exc)) from None


def default_config() -> RunConfig:
    """Defaults, with ``PMHD_WORKERS`` overriding the worker count."""
    env = os.environ.get("PMHD_WORKERS", "").strip()
    if env:
        try:
            return RunConfig(workers=int(env))
        except ValueError:
            raise ConfigParseError(f"PMHD_WORKERS must be a positive integer, got {env!r}") from None
    return RunConfig()


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())
