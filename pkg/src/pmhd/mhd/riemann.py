"""Approximate Riemann solvers for ideal MHD along a face normal.

States are given in the rotated frame (normal, tangential 1, tangential 2);
the normal field component is a face quantity shared by both sides.  Fluxes
have seven components: mass, three momenta, energy and the two tangential
field components.
"""

from __future__ import annotations

from math import sqrt

import numpy as np

from ..engine import device, kernel
from .eos import PrimState, fast_speed_sq


class RiemannDiagnostics:
    """Counters for Roe interfaces that needed the HLLE fallback."""

    def __init__(self):
        self.roe_fallbacks = 0

    def reset(self):
        self.roe_fallbacks = 0


diagnostics = RiemannDiagnostics()


@device
def physical_flux(rho, vn, vt1, vt2, p, bn, bt1, bt2, gamma):
    """Flux and conserved vector of one state; returns a 14-tuple."""
    m1 = rho * vn
    m2 = rho * vt1
    m3 = rho * vt2
    pb = 0.5 * (bn * bn + bt1 * bt1 + bt2 * bt2)
    e = p / (gamma - 1.0) + 0.5 * (m1 * vn + m2 * vt1 + m3 * vt2) + pb
    pt = p + pb
    vb = vn * bn + vt1 * bt1 + vt2 * bt2
    return (m1,
            m1 * vn + pt - bn * bn,
            m1 * vt1 - bn * bt1,
            m1 * vt2 - bn * bt2,
            (e + pt) * vn - bn * vb,
            bt1 * vn - bn * vt1,
            bt2 * vn - bn * vt2,
            rho, m1, m2, m3, e, bt1, bt2)


@device
def hlle_point(rl, ul, vl, wl, pl, byl, bzl, rr, ur, vr, wr, pr, byr, bzr, bx, gamma):
    fl0, fl1, fl2, fl3, fl4, fl5, fl6, ul0, ul1, ul2, ul3, ul4, ul5, ul6 = physical_flux(
        rl, ul, vl, wl, pl, bx, byl, bzl, gamma)
    fr0, fr1, fr2, fr3, fr4, fr5, fr6, ur0, ur1, ur2, ur3, ur4, ur5, ur6 = physical_flux(
        rr, ur, vr, wr, pr, bx, byr, bzr, gamma)
    cfl = sqrt(fast_speed_sq(rl, pl, bx, byl, bzl, gamma))
    cfr = sqrt(fast_speed_sq(rr, pr, bx, byr, bzr, gamma))
    sl = min(ul - cfl, ur - cfr)
    sr = max(ul + cfl, ur + cfr)
    if sl >= 0.0:
        return fl0, fl1, fl2, fl3, fl4, fl5, fl6
    if sr <= 0.0:
        return fr0, fr1, fr2, fr3, fr4, fr5, fr6
    idb = 1.0 / (sr - sl)
    a = 0.5 * (sr + sl) * idb
    b = sr * sl * idb
    return (0.5 * (fl0 + fr0) - a * (fr0 - fl0) + b * (ur0 - ul0),
            0.5 * (fl1 + fr1) - a * (fr1 - fl1) + b * (ur1 - ul1),
            0.5 * (fl2 + fr2) - a * (fr2 - fl2) + b * (ur2 - ul2),
            0.5 * (fl3 + fr3) - a * (fr3 - fl3) + b * (ur3 - ul3),
            0.5 * (fl4 + fr4) - a * (fr4 - fl4) + b * (ur4 - ul4),
            0.5 * (fl5 + fr5) - a * (fr5 - fl5) + b * (ur5 - ul5),
            0.5 * (fl6 + fr6) - a * (fr6 - fl6) + b * (ur6 - ul6))


@device
def roe_average(rl, ul, vl, wl, pl, byl, bzl, rr, ur, vr, wr, pr, byr, bzr, bx, gamma):
    """Roe-averaged primitive state (rho, u, v, w, p, by, bz)."""
    sql = sqrt(rl)
    sqr = sqrt(rr)
    isq = 1.0 / (sql + sqr)
    rho = sql * sqr
    u = (sql * ul + sqr * ur) * isq
    v = (sql * vl + sqr * vr) * isq
    w = (sql * wl + sqr * wr) * isq
    bsql = bx * bx + byl * byl + bzl * bzl
    bsqr = bx * bx + byr * byr + bzr * bzr
    el = pl / (gamma - 1.0) + 0.5 * rl * (ul * ul + vl * vl + wl * wl) + 0.5 * bsql
    er = pr / (gamma - 1.0) + 0.5 * rr * (ur * ur + vr * vr + wr * wr) + 0.5 * bsqr
    hl = (el + pl + 0.5 * bsql) / rl
    hr = (er + pr + 0.5 * bsqr) / rr
    h = (sql * hl + sqr * hr) * isq
    # transverse field weighted by the opposite side's density
    by = (sqr * byl + sql * byr) * isq
    bz = (sqr * bzl + sql * bzr) * isq
    bsq = bx * bx + by * by + bz * bz
    p = (gamma - 1.0) / gamma * (rho * h - 0.5 * rho * (u * u + v * v + w * w) - bsq)
    return rho, u, v, w, p, by, bz


@device
def roe_point(rl, ul, vl, wl, pl, byl, bzl, rr, ur, vr, wr, pr, byr, bzr, bx, gamma):
    """Roe flux; the trailing flag is 1.0 when HLLE replaced an invalid linearisation."""
    gm1 = gamma - 1.0
    fl0, fl1, fl2, fl3, fl4, fl5, fl6, ul0, ul1, ul2, ul3, ul4, ul5, ul6 = physical_flux(
        rl, ul, vl, wl, pl, bx, byl, bzl, gamma)
    fr0, fr1, fr2, fr3, fr4, fr5, fr6, ur0, ur1, ur2, ur3, ur4, ur5, ur6 = physical_flux(
        rr, ur, vr, wr, pr, bx, byr, bzr, gamma)
    rho, u, v, w, p, by, bz = roe_average(rl, ul, vl, wl, pl, byl, bzl,
                                          rr, ur, vr, wr, pr, byr, bzr, bx, gamma)
    if not p > 0.0:
        h0, h1, h2, h3, h4, h5, h6 = hlle_point(rl, ul, vl, wl, pl, byl, bzl,
                                                rr, ur, vr, wr, pr, byr, bzr, bx, gamma)
        return h0, h1, h2, h3, h4, h5, h6, 1.0

    di = 1.0 / rho
    sqrtd = sqrt(rho)
    a2 = gamma * p * di
    a = sqrt(a2)
    can2 = bx * bx * di
    cat2 = (by * by + bz * bz) * di
    diff = a2 - can2 - cat2
    cf2 = 0.5 * (a2 + can2 + cat2 + sqrt(diff * diff + 4.0 * a2 * cat2))
    cs2 = a2 * can2 / cf2
    cf = sqrt(cf2)
    cs = sqrt(cs2)
    ca = sqrt(can2)
    den = cf2 - cs2
    if den <= 0.0:
        af = 1.0
        als = 0.0
    else:
        af2 = (a2 - cs2) / den
        as2 = (cf2 - a2) / den
        af = sqrt(af2) if af2 > 0.0 else 0.0
        als = sqrt(as2) if as2 > 0.0 else 0.0
    bt = sqrt(by * by + bz * bz)
    if bt > 0.0:
        bey = by / bt
        bez = bz / bt
    else:
        bey = sqrt(0.5)
        bez = bey
    sgn = 1.0 if bx >= 0.0 else -1.0

    # jump in primitives, linearised about the Roe state
    drho = ur0 - ul0
    dmu = ur1 - ul1
    dmv = ur2 - ul2
    dmw = ur3 - ul3
    de = ur4 - ul4
    dby = ur5 - ul5
    dbz = ur6 - ul6
    du = (dmu - u * drho) * di
    dv = (dmv - v * drho) * di
    dw = (dmw - w * drho) * di
    v2 = u * u + v * v + w * w
    dp = gm1 * (de - (u * dmu + v * dmv + w * dmw) + 0.5 * v2 * drho - (by * dby + bz * dbz))

    xt = bey * dv + bez * dw
    xb = bey * dby + bez * dbz
    yt = bey * dw - bez * dv
    yb = bey * dbz - bez * dby
    ia2 = 1.0 / a2
    iasd = 1.0 / (a * sqrtd)

    fast_s = (af * cf * du - als * cs * sgn * xt) * ia2
    fast_c = af * dp * ia2 * di + als * xb * iasd
    slow_s = (als * cs * du + af * cf * sgn * xt) * ia2
    slow_c = als * dp * ia2 * di - af * xb * iasd
    alf_c = yt
    alf_s = sgn * yb / sqrtd

    # wave strengths scaled by |speed|
    gfp = abs(u + cf) * 0.5 * (fast_c + fast_s)
    gfm = abs(u - cf) * 0.5 * (fast_c - fast_s)
    gsp = abs(u + cs) * 0.5 * (slow_c + slow_s)
    gsm = abs(u - cs) * 0.5 * (slow_c - slow_s)
    gap = abs(u + ca) * 0.5 * (alf_c - alf_s)
    gam = abs(u - ca) * 0.5 * (alf_c + alf_s)
    ge = abs(u) * (drho - dp * ia2)

    fsum = gfp + gfm
    fdif = gfp - gfm
    ssum = gsp + gsm
    sdif = gsp - gsm
    asum = gap + gam
    adif = gap - gam

    d_rho = rho * (af * fsum + als * ssum) + ge
    d_u = af * cf * fdif + als * cs * sdif
    d_v = sgn * bey * (af * cf * sdif - als * cs * fdif) - bez * asum
    d_w = sgn * bez * (af * cf * sdif - als * cs * fdif) + bey * asum
    d_p = rho * a2 * (af * fsum + als * ssum)
    mag = a * sqrtd * (als * fsum - af * ssum)
    d_by = bey * mag + sgn * sqrtd * bez * adif
    d_bz = bez * mag - sgn * sqrtd * bey * adif

    c1 = u * d_rho + rho * d_u
    c2 = v * d_rho + rho * d_v
    c3 = w * d_rho + rho * d_w
    c4 = (d_p / gm1 + 0.5 * v2 * d_rho + rho * (u * d_u + v * d_v + w * d_w)
          + by * d_by + bz * d_bz)

    return (0.5 * (fl0 + fr0) - 0.5 * d_rho,
            0.5 * (fl1 + fr1) - 0.5 * c1,
            0.5 * (fl2 + fr2) - 0.5 * c2,
            0.5 * (fl3 + fr3) - 0.5 * c3,
            0.5 * (fl4 + fr4) - 0.5 * c4,
            0.5 * (fl5 + fr5) - 0.5 * d_by,
            0.5 * (fl6 + fr6) - 0.5 * d_bz,
            0.0)


SOLVER_ROE = 0
SOLVER_HLLE = 1
SOLVERS = {"roe": SOLVER_ROE, "hlle": SOLVER_HLLE}


@kernel
def riemann_kernel(k, j, i, args):
    """Face flux in direction ``n`` from reconstructed states.

    Results go to ``flx`` in lab-frame order (mass, m1, m2, m3, energy, F(B_t1),
    F(B_t2)); ``wgt`` receives the contact-upwind weight used by the EMF
    averaging and ``flag`` marks Roe fallbacks.
    """
    wl, wr, bn_arr, flx, wgt, flag, gamma, vfac, n, solver = args
    t1 = (n + 1) % 3
    t2 = (n + 2) % 3
    bn = bn_arr[k, j, i]
    rl = wl[0, k, j, i]
    rr = wr[0, k, j, i]
    if solver == 0:
        f0, f1, f2, f3, f4, f5, f6, fb = roe_point(
            rl, wl[1 + n, k, j, i], wl[1 + t1, k, j, i], wl[1 + t2, k, j, i], wl[4, k, j, i],
            wl[5 + t1, k, j, i], wl[5 + t2, k, j, i],
            rr, wr[1 + n, k, j, i], wr[1 + t1, k, j, i], wr[1 + t2, k, j, i], wr[4, k, j, i],
            wr[5 + t1, k, j, i], wr[5 + t2, k, j, i], bn, gamma)
        if fb > 0.0:
            flag[k, j, i] = 1
    else:
        f0, f1, f2, f3, f4, f5, f6 = hlle_point(
            rl, wl[1 + n, k, j, i], wl[1 + t1, k, j, i], wl[1 + t2, k, j, i], wl[4, k, j, i],
            wl[5 + t1, k, j, i], wl[5 + t2, k, j, i],
            rr, wr[1 + n, k, j, i], wr[1 + t1, k, j, i], wr[1 + t2, k, j, i], wr[4, k, j, i],
            wr[5 + t1, k, j, i], wr[5 + t2, k, j, i], bn, gamma)
    flx[0, k, j, i] = f0
    flx[1 + n, k, j, i] = f1
    flx[1 + t1, k, j, i] = f2
    flx[1 + t2, k, j, i] = f3
    flx[4, k, j, i] = f4
    flx[5, k, j, i] = f5
    flx[6, k, j, i] = f6
    x = vfac * f0 / (rl + rr)
    if x > 0.5:
        x = 0.5
    elif x < -0.5:
        x = -0.5
    wgt[k, j, i] = 0.5 + x


def _rotated(w: PrimState, b_normal: float):
    return (w.rho, w.v1, w.v2, w.v3, w.p, w.B2, w.B3)


def roe_flux(wl: PrimState, wr: PrimState, b_normal: float, gamma: float) -> np.ndarray:
    """Roe flux between two states whose first component is face-normal.

    Returns the seven flux components (mass, m_n, m_t1, m_t2, energy, B_t1,
    B_t2).  A non-physical Roe average falls back to HLLE and bumps
    ``diagnostics.roe_fallbacks``.
    """
    out = roe_point(*_rotated(wl, b_normal), *_rotated(wr, b_normal), float(b_normal), float(gamma))
    if out[7] > 0.0:
        diagnostics.roe_fallbacks += 1
    return np.array(out[:7])


def hlle_flux(wl: PrimState, wr: PrimState, b_normal: float, gamma: float) -> np.ndarray:
    """Two-wave HLLE flux with fast-magnetosonic signal-speed bounds."""
    return np.array(hlle_point(*_rotated(wl, b_normal), *_rotated(wr, b_normal),
                               float(b_normal), float(gamma)))


def flux_from_prim(w: PrimState, b_normal: float, gamma: float) -> np.ndarray:
    """Exact physical flux of a single state (first seven of the flux tuple)."""
    return np.array(physical_flux(w.rho, w.v1, w.v2, w.v3, w.p, float(b_normal),
                                  w.B2, w.B3, float(gamma))[:7])


def roe_state(wl: PrimState, wr: PrimState, b_normal: float, gamma: float) -> PrimState:
    """The Roe-averaged state about which the flux is linearised."""
    rho, u, v, w, p, by, bz = roe_average(*_rotated(wl, b_normal), *_rotated(wr, b_normal),
                                          float(b_normal), float(gamma))
    return PrimState(rho, u, v, w, p, float(b_normal), by, bz)
