"""Roofline and portability walk-through.

Prints the bundled platform table with each device's ridge point, reproduces
the published V100 efficiency, then counts one cycle of the solver on this
host and places it under the host's measured ceilings.

    python demos/roofline_report.py [outdir]
"""

import sys
from pathlib import Path

from pmhd.cli import count_cycle
from pmhd.config import parse_config
from pmhd.perf import KernelIntensitySet, PortabilityInput, arch_efficiency, pp_metric
from pmhd.perf.platforms import reference_measurements, reference_platforms
from pmhd.perf.microbench import host_platform
from pmhd.perf.report import emit_roofline_report

out = Path(sys.argv[1] if len(sys.argv) > 1 else "roofline_demo")
out.mkdir(exist_ok=True)

print(f"{'platform':12s} {'T_peak GF/s':>12s} {'DRAM GB/s':>10s} {'ridge F/B':>10s}")
for p in reference_platforms():
    bw = p.bandwidth["dram"]
    print(f"{p.id:12s} {p.t_peak / 1e9:12.1f} {bw / 1e9:10.1f} {p.t_peak / bw:10.2f}")

plat, ints, run = reference_measurements()[0]
e = arch_efficiency(run, plat, ints, "dram")
print(f"\npublished V100 point: {run.epsilon / 1e9:.0f} GF/s under a "
      f"{plat.bandwidth['dram'] * ints.intensity['dram'] / 1e9:.0f} GF/s cap -> e = {e:.4f}")
print("harmonic mean of {e, 0.5}:", round(pp_metric(PortabilityInput({"v100": e, "other": 0.5})), 4))

cfg = parse_config("nx1 = 8\nnx2 = 8\nnx3 = 8\n")
tally, mesh = count_cycle(cfg)
host = host_platform(nbytes=64 * 2 ** 20)
ints = KernelIntensitySet("pmhd", "linear_wave_8^3", {"dram": tally.flops / tally.bytes})
print(f"\none 8^3 cycle: {tally.flops} flops, {tally.bytes} bytes, "
      f"I = {ints.intensity['dram']:.3f} flop/byte, {tally.flops / mesh.cfg.ncells:.0f} flops/cell")
print(f"host: {host.t_peak / 1e9:.1f} GF/s dgemm, {host.bandwidth['dram'] / 1e9:.1f} GB/s triad")
emit_roofline_report(host, ints, [], out / "host_roofline.csv", out / "host_roofline.svg")
print(f"wrote {out / 'host_roofline.csv'} and {out / 'host_roofline.svg'}")
