"""Constrained transport: edge EMFs from face fluxes and the staggered field update.

Sign convention: a direction-n flux array stores F(B_t1) in slot 5 and F(B_t2)
in slot 6 with t1 = n+1, t2 = n+2 (cyclic).  Since F(B_t1) = -E_t2 and
F(B_t2) = +E_t1, the face electric fields are

    x1 faces: E3 = -flx1[5], E2 = +flx1[6]
    x2 faces: E1 = -flx2[5], E3 = +flx2[6]
    x3 faces: E2 = -flx3[5], E1 = +flx3[6]
"""

from __future__ import annotations

from ..engine import LoopBounds, LoopPolicy, kernel, par_for

EMF_UPWIND = 0
EMF_ARITHMETIC = 1
EMF_MODES = {"upwind": EMF_UPWIND, "contact": EMF_UPWIND, "arithmetic": EMF_ARITHMETIC,
             "mean": EMF_ARITHMETIC}


@kernel
def cc_emf_kernel(k, j, i, args):
    """Cell-centred E = -v x B."""
    w, cc = args
    v1 = w[1, k, j, i]
    v2 = w[2, k, j, i]
    v3 = w[3, k, j, i]
    b1 = w[5, k, j, i]
    b2 = w[6, k, j, i]
    b3 = w[7, k, j, i]
    cc[0, k, j, i] = v3 * b2 - v2 * b3
    cc[1, k, j, i] = v1 * b3 - v3 * b1
    cc[2, k, j, i] = v2 * b1 - v1 * b2


@kernel
def emf3_kernel(k, j, i, args):
    flx1, flx2, w1, w2, cc, e3, mode = args
    a1 = -flx1[5, k, j, i]
    a1m = -flx1[5, k, j - 1, i]
    a2 = flx2[6, k, j, i]
    a2m = flx2[6, k, j, i - 1]
    if mode == 1:
        e3[k, j, i] = 0.25 * (a1 + a1m + a2 + a2m)
        return
    wl = w1[k, j - 1, i]
    wr = w1[k, j, i]
    de_l2 = (1.0 - wl) * (a2 - cc[2, k, j - 1, i]) + wl * (a2m - cc[2, k, j - 1, i - 1])
    de_r2 = (1.0 - wr) * (a2 - cc[2, k, j, i]) + wr * (a2m - cc[2, k, j, i - 1])
    wl = w2[k, j, i - 1]
    wr = w2[k, j, i]
    de_l1 = (1.0 - wl) * (a1 - cc[2, k, j, i - 1]) + wl * (a1m - cc[2, k, j - 1, i - 1])
    de_r1 = (1.0 - wr) * (a1 - cc[2, k, j, i]) + wr * (a1m - cc[2, k, j - 1, i])
    e3[k, j, i] = 0.25 * (de_l1 + de_r1 + de_l2 + de_r2 + a2m + a2 + a1m + a1)


@kernel
def emf1_kernel(k, j, i, args):
    flx2, flx3, w2, w3, cc, e1, mode = args
    a2 = -flx2[5, k, j, i]
    a2m = -flx2[5, k - 1, j, i]
    a3 = flx3[6, k, j, i]
    a3m = flx3[6, k, j - 1, i]
    if mode == 1:
        e1[k, j, i] = 0.25 * (a2 + a2m + a3 + a3m)
        return
    wl = w2[k - 1, j, i]
    wr = w2[k, j, i]
    de_l3 = (1.0 - wl) * (a3 - cc[0, k - 1, j, i]) + wl * (a3m - cc[0, k - 1, j - 1, i])
    de_r3 = (1.0 - wr) * (a3 - cc[0, k, j, i]) + wr * (a3m - cc[0, k, j - 1, i])
    wl = w3[k, j - 1, i]
    wr = w3[k, j, i]
    de_l2 = (1.0 - wl) * (a2 - cc[0, k, j - 1, i]) + wl * (a2m - cc[0, k - 1, j - 1, i])
    de_r2 = (1.0 - wr) * (a2 - cc[0, k, j, i]) + wr * (a2m - cc[0, k - 1, j, i])
    e1[k, j, i] = 0.25 * (de_l3 + de_r3 + de_l2 + de_r2 + a3m + a3 + a2m + a2)


@kernel
def emf2_kernel(k, j, i, args):
    flx3, flx1, w3, w1, cc, e2, mode = args
    a3 = -flx3[5, k, j, i]
    a3m = -flx3[5, k, j, i - 1]
    a1 = flx1[6, k, j, i]
    a1m = flx1[6, k - 1, j, i]
    if mode == 1:
        e2[k, j, i] = 0.25 * (a3 + a3m + a1 + a1m)
        return
    wl = w3[k, j, i - 1]
    wr = w3[k, j, i]
    de_l1 = (1.0 - wl) * (a1 - cc[1, k, j, i - 1]) + wl * (a1m - cc[1, k - 1, j, i - 1])
    de_r1 = (1.0 - wr) * (a1 - cc[1, k, j, i]) + wr * (a1m - cc[1, k - 1, j, i])
    wl = w1[k - 1, j, i]
    wr = w1[k, j, i]
    de_l3 = (1.0 - wl) * (a3 - cc[1, k - 1, j, i]) + wl * (a3m - cc[1, k - 1, j, i - 1])
    de_r3 = (1.0 - wr) * (a3 - cc[1, k, j, i]) + wr * (a3m - cc[1, k, j, i - 1])
    e2[k, j, i] = 0.25 * (de_l1 + de_r1 + de_l3 + de_r3 + a1m + a1 + a3m + a3)


@kernel
def update_b1_kernel(k, j, i, args):
    b_in, b_out, e2, e3, dt_dx2, dt_dx3 = args
    b_out[k, j, i] = b_in[k, j, i] - (dt_dx2 * (e3[k, j + 1, i] - e3[k, j, i])
                                      - dt_dx3 * (e2[k + 1, j, i] - e2[k, j, i]))


@kernel
def update_b2_kernel(k, j, i, args):
    b_in, b_out, e1, e3, dt_dx1, dt_dx3 = args
    b_out[k, j, i] = b_in[k, j, i] + (dt_dx1 * (e3[k, j, i + 1] - e3[k, j, i])
                                      - dt_dx3 * (e1[k + 1, j, i] - e1[k, j, i]))


@kernel
def update_b3_kernel(k, j, i, args):
    b_in, b_out, e1, e2, dt_dx1, dt_dx2 = args
    b_out[k, j, i] = b_in[k, j, i] + (dt_dx2 * (e1[k, j + 1, i] - e1[k, j, i])
                                      - dt_dx1 * (e2[k, j, i + 1] - e2[k, j, i]))


def cell_center_emf(policy: LoopPolicy, active: LoopBounds, w, cc) -> None:
    """Cell-centred E over the active zone plus one ghost layer."""
    b = LoopBounds(active.ks - 1, active.ke + 1, active.js - 1, active.je + 1,
                   active.is_ - 1, active.ie + 1)
    par_for(policy, b, cc_emf_kernel, (w, cc))


def ct_emf(policy: LoopPolicy, active: LoopBounds, flux, weights, cc, emf,
           mode: int = EMF_UPWIND) -> None:
    """Edge EMFs bounding the active zone.

    ``flux`` and ``weights`` are per-direction face arrays, ``cc`` the
    cell-centred E (only read in upwind mode), ``emf`` the output (e1, e2, e3).
    """
    flx1, flx2, flx3 = flux
    w1, w2, w3 = weights
    e1, e2, e3 = emf
    ks, ke, js, je, is_, ie = active.as_tuple()
    par_for(policy, LoopBounds(ks, ke, js, je + 1, is_, ie + 1), emf3_kernel,
            (flx1, flx2, w1, w2, cc, e3, mode))
    par_for(policy, LoopBounds(ks, ke + 1, js, je + 1, is_, ie), emf1_kernel,
            (flx2, flx3, w2, w3, cc, e1, mode))
    par_for(policy, LoopBounds(ks, ke + 1, js, je, is_, ie + 1), emf2_kernel,
            (flx3, flx1, w3, w1, cc, e2, mode))


def ct_update_face_b(policy: LoopPolicy, active: LoopBounds, faces_in, faces_out, emf,
                     dt: float, dx) -> None:
    """Advance face fields by dt times the discrete curl of the edge EMFs.

    Every face bounding the active zone is updated, including both faces on
    each block boundary.
    """
    b1, b2, b3 = faces_in
    o1, o2, o3 = faces_out
    e1, e2, e3 = emf
    dx1, dx2, dx3 = dx
    ks, ke, js, je, is_, ie = active.as_tuple()
    par_for(policy, LoopBounds(ks, ke, js, je, is_, ie + 1), update_b1_kernel,
            (b1, o1, e2, e3, dt / dx2, dt / dx3))
    par_for(policy, LoopBounds(ks, ke, js, je + 1, is_, ie), update_b2_kernel,
            (b2, o2, e1, e3, dt / dx1, dt / dx3))
    par_for(policy, LoopBounds(ks, ke + 1, js, je, is_, ie), update_b3_kernel,
            (b3, o3, e1, e2, dt / dx1, dt / dx2))
