"""Two-stage van Leer (VL2) predictor-corrector update with constrained transport."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..engine import LoopBounds, LoopPolicy, kernel, min_op, par_for, par_reduce, region
from ..mesh import NVAR, FieldState, Mesh, MeshBlock, exchange_ghosts
from .ct import EMF_MODES, cell_center_emf, ct_emf, ct_update_face_b
from .eos import UnphysicalStateError, cons_to_prim_kernel, dt_kernel, face_to_center_kernel
from .reconstruct import reconstruct
from .riemann import SOLVERS, riemann_kernel


@dataclass(frozen=True)
class SolverOptions:
    riemann: str = "roe"      # "roe" or "hlle"
    emf: str = "upwind"       # "upwind" (contact-upwind) or "arithmetic"

    def __post_init__(self):
        if self.riemann not in SOLVERS:
            raise ValueError(f"unknown Riemann solver {self.riemann!r}")
        if self.emf not in EMF_MODES:
            raise ValueError(f"unknown EMF averaging {self.emf!r}")


class Scratch:
    """Per-block work arrays, all with the block's cell shape."""

    def __init__(self, shape):
        self.wl = np.zeros((NVAR,) + shape)
        self.wr = np.zeros((NVAR,) + shape)
        self.flx = [np.zeros((7,) + shape) for _ in range(3)]
        self.wgt = [np.zeros(shape) for _ in range(3)]
        self.flag = [np.zeros(shape, dtype=np.int8) for _ in range(3)]
        self.cc = np.zeros((3,) + shape)
        self.emf = [np.zeros(shape) for _ in range(3)]


def _scratch(blk: MeshBlock) -> Scratch:
    if blk.scratch is None:
        blk.scratch = Scratch(blk.shape)
    return blk.scratch


@kernel
def integrate_kernel(k, j, i, args):
    u_in, u_out, f1, f2, f3, dtdx1, dtdx2, dtdx3 = args
    for v in range(5):
        u_out[v, k, j, i] = u_in[v, k, j, i] - (
            dtdx1 * (f1[v, k, j, i + 1] - f1[v, k, j, i])
            + dtdx2 * (f2[v, k, j + 1, i] - f2[v, k, j, i])
            + dtdx3 * (f3[v, k + 1, j, i] - f3[v, k, j, i]))


def _face_bounds(blk: MeshBlock, dim: int) -> LoopBounds:
    """Faces normal to ``dim`` needed by the EMF stencil: active along ``dim``
    (both ends), one ghost layer either side transversely."""
    lo = [blk.ks - 1, blk.js - 1, blk.is_ - 1]
    hi = [blk.ke + 1, blk.je + 1, blk.ie + 1]
    lo[3 - dim] += 1
    return LoopBounds(lo[0], hi[0], lo[1], hi[1], lo[2], hi[2])


def _fluxes(mesh: Mesh, blk: MeshBlock, faces: FieldState, dt: float, order: int,
            opts: SolverOptions) -> None:
    pol = mesh.policy
    sc = _scratch(blk)
    solver = SOLVERS[opts.riemann]
    for dim in (1, 2, 3):
        bounds = _face_bounds(blk, dim)
        with region("reconstruct"):
            reconstruct(pol, bounds, blk.w, sc.wl, sc.wr, dim, order)
        with region("riemann"):
            flag = sc.flag[dim - 1]
            flag[...] = 0
            vfac = 1024.0 * dt / blk.dx[dim - 1]
            par_for(pol, bounds, riemann_kernel,
                    (sc.wl, sc.wr, faces.bf[dim - 1], sc.flx[dim - 1], sc.wgt[dim - 1], flag,
                     mesh.gamma, vfac, dim - 1, solver))
            if solver == 0:
                mesh.diagnostics["roe_fallbacks"] += int(flag.sum())
    with region("ct_emf"):
        mode = EMF_MODES[opts.emf]
        if mode == 0:
            cell_center_emf(pol, blk.active, blk.w, sc.cc)
        ct_emf(pol, blk.active, sc.flx, sc.wgt, sc.cc, sc.emf, mode)


def _update(mesh: Mesh, blk: MeshBlock, src: FieldState, dst: FieldState, dt: float) -> None:
    pol = mesh.policy
    sc = _scratch(blk)
    dx1, dx2, dx3 = blk.dx
    with region("integrate"):
        par_for(pol, blk.active, integrate_kernel,
                (src.u, dst.u, sc.flx[0], sc.flx[1], sc.flx[2], dt / dx1, dt / dx2, dt / dx3))
    with region("ct_update"):
        ct_update_face_b(pol, blk.active, src.bf, dst.bf, sc.emf, dt, blk.dx)
        face_to_center_b(blk, dst, pol)


def face_to_center_b(blk: MeshBlock, state: FieldState | None = None, policy=None) -> None:
    """Cell-centred field as the mean of the two bounding face values (active cells)."""
    st = state or blk.state
    par_for(policy or LoopPolicy(), blk.active, face_to_center_kernel, (st.u, st.b1f, st.b2f, st.b3f))


def update_primitives(mesh: Mesh, half: bool = False, stage: str | None = None) -> None:
    """Primitives over whole blocks (ghosts included) from the selected state."""
    with region("prims"):
        for blk in mesh.blocks:
            st = blk.half if half else blk.state
            par_for(mesh.policy, blk.whole, cons_to_prim_kernel, (st.u, blk.w, mesh.gamma))
            _check_physical(blk, stage)


def _check_physical(blk: MeshBlock, stage) -> None:
    rho = blk.w[0]
    p = blk.w[4]
    bad = ~((rho > 0.0) & (p > 0.0))
    if bad.any():
        k, j, i = (int(x) for x in np.argwhere(bad)[0])
        cell = (blk.offset[0] + i - blk.ng, blk.offset[1] + j - blk.ng, blk.offset[2] + k - blk.ng)
        raise UnphysicalStateError(
            f"unphysical state (rho={rho[k, j, i]}, p={p[k, j, i]}) at global cell {cell}"
            + (f" during {stage}" if stage else ""), cell=cell, stage=stage)


def compute_dt(mesh: Mesh) -> float:
    """CFL-limited time step from the current primitives."""
    with region("newdt"):
        out = math.inf
        for blk in mesh.blocks:
            dx1, dx2, dx3 = blk.dx
            val = par_reduce(mesh.policy, blk.active, dt_kernel,
                             (blk.w, mesh.gamma, dx1, dx2, dx3), min_op, math.inf)
            out = min(out, val)
    return mesh.cfg.cfl * out


def vl2_step(mesh: Mesh, dt: float, options: SolverOptions | None = None) -> None:
    """Advance the mesh by ``dt``; expects current ghosts and primitives and
    leaves them current."""
    opts = options or getattr(mesh, "solver", None) or SolverOptions()
    # predictor: donor-cell fluxes, half step into the scratch state
    for blk in mesh.blocks:
        _fluxes(mesh, blk, blk.state, dt, 1, opts)
        _update(mesh, blk, blk.state, blk.half, 0.5 * dt)
    exchange_ghosts(mesh, half=True)
    update_primitives(mesh, half=True, stage="predictor")
    # corrector: PLM on the half state, full step from the original state
    for blk in mesh.blocks:
        _fluxes(mesh, blk, blk.half, dt, 2, opts)
        _update(mesh, blk, blk.state, blk.half, dt)
        blk.state, blk.half = blk.half, blk.state
    exchange_ghosts(mesh)
    update_primitives(mesh, stage="corrector")
    mesh.time += dt
    mesh.cycle += 1


def evolve(mesh: Mesh, t_end: float | None = None, ncycles: int | None = None,
           options: SolverOptions | None = None, callback=None) -> int:
    """Step until ``t_end`` (landing on it exactly) or for ``ncycles`` cycles.

    When ``t_end`` is given the CFL step is shrunk so an integer number of
    equal steps reaches it.  Returns the number of cycles taken.
    """
    if t_end is None and ncycles is None:
        raise ValueError("give t_end, ncycles or both")
    taken = 0
    while True:
        if ncycles is not None and taken >= ncycles:
            break
        if t_end is not None:
            remaining = t_end - mesh.time
            if remaining <= 0.0:
                break
        with region("cycle"):
            dt = compute_dt(mesh)
            if t_end is not None:
                dt = remaining / math.ceil(remaining / dt)
            vl2_step(mesh, dt, options)
        if t_end is not None and math.isclose(mesh.time, t_end, rel_tol=1e-12, abs_tol=1e-14):
            mesh.time = t_end
        taken += 1
        if callback is not None:
            callback(mesh, dt)
    return taken
