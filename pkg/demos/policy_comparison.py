"""Same problem under each loop pattern: wall time per cycle and snapshot digest.

The digests must all agree; the timings show what each traversal order costs
on this machine.

    python demos/policy_comparison.py [n] [workers]
"""

import sys
import time

from pmhd.engine import LoopPolicy, Pattern
from pmhd.mesh import MeshConfig, build_mesh
from pmhd.mhd.integrator import evolve
from pmhd.mhd.linear_wave import WaveSetup, init_linear_wave
from pmhd.snapshot import digest

n = int(sys.argv[1]) if len(sys.argv) > 1 else 24
workers = int(sys.argv[2]) if len(sys.argv) > 2 else 1

for pattern in Pattern:
    mesh = build_mesh(MeshConfig(nx=(n, n, n)), LoopPolicy(pattern, workers))
    init_linear_wave(mesh, WaveSetup(amplitude=1e-3, wavevector=(1, 1, 1)))
    evolve(mesh, ncycles=1)  # compile
    t = time.perf_counter()
    evolve(mesh, ncycles=5)
    per = (time.perf_counter() - t) / 5
    print(f"{pattern.value:8s} {per * 1e3:8.1f} ms/cycle  {n ** 3 / per:10.4g} cell-updates/s  "
          f"{digest(mesh)[:16]}")
