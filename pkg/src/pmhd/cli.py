"""Command-line front end: ``pmhd run|convergence|bench|scale|roofline|report``."""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigParseError, RunConfig, default_config, load_config
from .engine import LoopPolicy, Pattern, Profiler, counting, set_profiler
from .mesh import ConfigurationError, MeshConfig, build_mesh, max_divergence_b
from .mhd.eos import UnphysicalStateError
from .mhd.integrator import evolve
from .mhd.linear_wave import WaveSetupError, append_errors, init_linear_wave, l1_error
from .perf import (KernelIntensitySet, MeasuredRun, PerfInputError, find_platform,
                   load_platform_table, reference_measurements)
from .perf.microbench import host_platform
from .perf.report import emit_roofline_report, write_portability_report
from .snapshot import digest, write_snapshot

BENCH_COLUMNS = ["size", "policy", "workers", "cycles", "wall_s", "cell_updates_per_s"]
CONVERGENCE_COLUMNS = ["resolution", "cycles", "L1_combined", "order"]
SCALE_COLUMNS = ["mode", "workers", "cells", "cycles", "p80_cell_updates_per_s", "efficiency",
                 "baseline_bitwise"]
REFERENCE_NOTE = ("reference (published, not asserted on this machine): "
                  ">1e8 cell-updates/s on a single V100")


def make_mesh(cfg: RunConfig, policy: LoopPolicy | None = None, mesh_cfg: MeshConfig | None = None):
    mesh = build_mesh(mesh_cfg or cfg.mesh_config(), policy or cfg.loop_policy())
    mesh.solver = cfg.solver_options()
    init_linear_wave(mesh, cfg.wave_setup())
    return mesh


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for r in rows:
            wr.writerow([repr(x) if isinstance(x, float) else x for x in r])


def _timed_cycles(mesh, ncycles: int) -> list[float]:
    out = []
    for _ in range(ncycles):
        t = time.perf_counter()
        evolve(mesh, ncycles=1)
        out.append(time.perf_counter() - t)
    return out


def cmd_run(cfg: RunConfig, out: Path) -> dict:
    """Evolve the wave for one period (or ``tlim``/``cycle_limit``), then write
    the snapshot, an errors.csv row and the region profile."""
    prof = Profiler()
    old = set_profiler(prof)
    try:
        mesh = make_mesh(cfg)
        div0 = max_divergence_b(mesh)
        t_end = cfg.tlim if cfg.tlim >= 0 else mesh.wave.period
        ncyc = cfg.cycle_limit if cfg.cycle_limit >= 0 else None
        t = time.perf_counter()
        cycles = evolve(mesh, t_end=t_end, ncycles=ncyc)
        wall = time.perf_counter() - t
    finally:
        set_profiler(old)
    err = l1_error(mesh)
    divb = max_divergence_b(mesh)
    out.mkdir(parents=True, exist_ok=True)
    write_snapshot(mesh, out / "snapshot.pmhd")
    append_errors(out / "errors.csv", cfg.nx1, cycles, err)
    prof.to_csv(out / "profile.csv")
    cells = mesh.cfg.ncells
    cups = cells * cycles / wall if wall > 0 else 0.0
    print(f"cycles {cycles}  time {mesh.time!r}  wall {wall:.3f} s  "
          f"cell-updates/s {cups:.4g}")
    print(f"L1 combined {err.combined:.6e}  max div B {divb:.3e} (initial {div0:.3e})  "
          f"Roe fallbacks {mesh.diagnostics['roe_fallbacks']}")
    return {"mesh": mesh, "cycles": cycles, "wall": wall, "errors": err, "divb": divb,
            "profile": prof}


def cmd_convergence(cfg: RunConfig, out: Path) -> list:
    """One wave period on cubic grids of each size in ``conv_sizes``; the
    order column compares each resolution with the previous one."""
    rows = []
    prev = None
    for n in cfg.conv_sizes:
        mc = replace(cfg.mesh_config(), nx=(n, n, n), mb=(n, n, n))
        mesh = make_mesh(cfg, mesh_cfg=mc)
        cycles = evolve(mesh, t_end=mesh.wave.period)
        err = l1_error(mesh).combined
        order = math.log(prev[1] / err) / math.log(n / prev[0]) if prev else float("nan")
        rows.append((n, cycles, err, order))
        prev = (n, err)
        print(f"{n:4d}^3  cycles {cycles}  L1 {err:.6e}  order {order:.3f}")
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "convergence.csv", CONVERGENCE_COLUMNS, rows)
    return rows


def cmd_bench(cfg: RunConfig, out: Path) -> list:
    """Throughput over a sweep of cubic single-block problem sizes."""
    rows = []
    policy = cfg.loop_policy()
    for n in cfg.bench_sizes:
        mc = replace(cfg.mesh_config(), nx=(n, n, n), mb=(n, n, n))
        mesh = make_mesh(cfg, policy, mc)
        evolve(mesh, ncycles=cfg.warmup)
        times = _timed_cycles(mesh, cfg.bench_cycles)
        wall = math.fsum(times)
        cups = n ** 3 * cfg.bench_cycles / wall
        rows.append((n, policy.pattern.value, policy.workers, cfg.bench_cycles, wall, cups))
        print(f"{n:4d}^3  {cups:.4g} cell-updates/s")
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "bench.csv", BENCH_COLUMNS, rows)
    print(REFERENCE_NOTE)
    return rows


def cmd_scale(cfg: RunConfig, out: Path) -> list:
    """Weak (fixed cells per worker) or strong (fixed global size) scaling.

    Throughput per configuration is the 80th percentile of per-cycle
    cell-updates/s.  The one-worker state after the timed cycles is compared
    bit for bit against a serial (SIMD-nested, one worker) run.
    """
    hw = os.cpu_count() or 1
    if max(cfg.scale_workers) > hw:
        warnings.warn(f"up to {max(cfg.scale_workers)} workers requested on {hw} hardware threads")
    m = cfg.scale_cells
    rows = []
    base = None
    ncyc = cfg.warmup + cfg.bench_cycles
    for w in cfg.scale_workers:
        if cfg.scale_mode == "weak":
            nx = (m * w, m, m)
        else:
            nx = (cfg.nx1, cfg.nx2, cfg.nx3)
        mb = (nx[0] // w, nx[1], nx[2]) if nx[0] % w == 0 else nx
        mc = replace(cfg.mesh_config(), nx=nx, mb=mb, length=(nx[0] / m, 1.0, 1.0)
                     if cfg.scale_mode == "weak" else cfg.mesh_config().length)
        mesh = make_mesh(cfg, cfg.loop_policy(w), mc)
        evolve(mesh, ncycles=cfg.warmup)
        times = _timed_cycles(mesh, cfg.bench_cycles)
        cells = mc.ncells
        perf = float(np.percentile([cells / t for t in times], 80))
        bitwise = ""
        if w == 1:
            base = perf
            ref = make_mesh(cfg, LoopPolicy(Pattern.SIMD_NESTED, 1), mc)
            evolve(ref, ncycles=ncyc)
            bitwise = str(digest(ref) == digest(mesh)).lower()
        if base is None:
            raise ConfigParseError("scale_workers must start with 1 to define the baseline")
        eff = perf / (w * base)
        rows.append((cfg.scale_mode, w, cells, cfg.bench_cycles, perf, eff, bitwise))
        print(f"workers {w}: cells {cells}  p80 {perf:.4g} cell-updates/s  efficiency {eff:.3f}")
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "scale.csv", SCALE_COLUMNS, rows)
    return rows


def count_cycle(cfg: RunConfig, mesh_cfg: MeshConfig | None = None):
    """FLOPs and streamed bytes of one full cycle (counting mode), plus the mesh."""
    mesh = make_mesh(cfg, LoopPolicy(), mesh_cfg)
    with counting() as tally:
        evolve(mesh, ncycles=1)
    return tally, mesh


def cmd_roofline(cfg: RunConfig, out: Path) -> dict:
    """Counted intensity + timed throughput on the configured mesh, against the
    host platform record (measured, or looked up in ``platform_file``)."""
    tally, _ = count_cycle(cfg)
    if cfg.platform_file:
        plat = find_platform(load_platform_table(cfg.platform_file), cfg.platform_id)
    elif cfg.platform_id == "host":
        plat = host_platform()
    else:
        raise PerfInputError(f"no platform file given for platform {cfg.platform_id!r}")
    mesh = make_mesh(cfg)
    evolve(mesh, ncycles=cfg.warmup)
    times = _timed_cycles(mesh, cfg.bench_cycles)
    cycle_s = float(np.percentile(times, 20))      # 80th percentile of throughput
    eps = tally.flops / cycle_s
    intensity = {"dram": tally.flops / tally.bytes}
    if "l1" in plat.bandwidth:
        intensity["l1"] = tally.flops / tally.l1_bytes
    ints = KernelIntensitySet("pmhd", f"linear_wave_{cfg.nx1}x{cfg.nx2}x{cfg.nx3}", intensity)
    run = MeasuredRun(ints.app, ints.problem, plat.id, eps, mesh.cfg.ncells / cycle_s)
    out.mkdir(parents=True, exist_ok=True)
    emit_roofline_report(plat, ints, [run], out / "roofline.csv", out / "roofline.svg")
    pp = write_portability_report(out / "portability.csv", [(plat, ints, run)], "dram")
    print(f"flops/cycle {tally.flops}  bytes/cycle {tally.bytes}  I_dram {intensity['dram']:.4f}")
    print(f"achieved {eps / 1e9:.4g} GFLOP/s on {plat.id}; DRAM efficiency {pp:.4f}")
    return {"tally": tally, "platform": plat, "intensity": ints, "run": run, "efficiency": pp}


def cmd_report(cfg: RunConfig, out: Path) -> dict:
    """Published-data portability report and a profiled region breakdown."""
    out.mkdir(parents=True, exist_ok=True)
    pp = write_portability_report(out / "portability_reference.csv", reference_measurements(), "dram")
    prof = Profiler()
    old = set_profiler(prof)
    try:
        mesh = make_mesh(cfg)
        evolve(mesh, ncycles=cfg.warmup)
        prof.reset()
        evolve(mesh, ncycles=cfg.bench_cycles)
    finally:
        set_profiler(old)
    prof.to_csv(out / "profile.csv")
    cyc = prof.regions["cycle"].time_s
    covered = prof.total_time([n for n in prof.regions if n != "cycle"]) / cyc
    print(f"published V100 data: DRAM architectural efficiency {pp:.4f}")
    print(f"named regions cover {100 * covered:.1f}% of cycle time")
    for name, t in sorted(prof.normalized_times().items(), key=lambda x: -x[1]):
        print(f"  {name:12s} {t:8.3f}")
    print(REFERENCE_NOTE)
    return {"pp": pp, "profile": prof, "coverage": covered}


COMMANDS = {"run": cmd_run, "convergence": cmd_convergence, "bench": cmd_bench, "scale": cmd_scale, "roofline": cmd_roofline,
            "report": cmd_report}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmhd", description=__doc__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--policy", help="loop pattern: simd, mdrange, flat1d or team")
    ap.add_argument("--workers", type=int, help="worker threads (overrides PMHD_WORKERS)")
    ap.add_argument("--out", help="output directory")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        over = {}
        if args.policy:
            over["policy"] = args.policy
        if args.workers is not None:
            over["workers"] = args.workers
        if args.out:
            over["out"] = args.out
        cfg = replace(cfg, **over)
        COMMANDS[args.command](cfg, Path(cfg.out))
    except (ConfigParseError, ConfigurationError, PerfInputError, WaveSetupError, ValueError,
            OSError) as exc:
        print(f"pmhd: error: {exc}", file=sys.stderr)
        return 1
    except UnphysicalStateError as exc:
        print(f"pmhd: solver error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
