"""Fast-wave convergence on quasi-1-D grids.

Each run evolves the default wave for one period on an n x 4 x 4 grid whose
transverse extent keeps the cells cubic, then prints the L1 error and the
observed order between successive resolutions.

    python demos/linear_wave_convergence.py 16 32 64 128
"""

import math
import sys
import time

from pmhd.mesh import MeshConfig, build_mesh, max_divergence_b
from pmhd.mhd.integrator import evolve
from pmhd.mhd.linear_wave import init_linear_wave, l1_error


def run(n):
    mesh = build_mesh(MeshConfig(nx=(n, 4, 4), length=(1.0, 4.0 / n, 4.0 / n)))
    wave = init_linear_wave(mesh)
    t = time.perf_counter()
    cycles = evolve(mesh, t_end=wave.period)
    return l1_error(mesh).combined, cycles, time.perf_counter() - t, max_divergence_b(mesh)


def main(sizes):
    print(f"{'n':>5} {'cycles':>7} {'L1':>12} {'order':>6} {'divB':>10} {'wall s':>7}")
    prev = None
    for n in sizes:
        err, cycles, wall, div = run(n)
        order = math.log(prev[1] / err) / math.log(n / prev[0]) if prev else float("nan")
        print(f"{n:5d} {cycles:7d} {err:12.4e} {order:6.2f} {div:10.2e} {wall:7.2f}")
        prev = (n, err)


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [16, 32, 64])
